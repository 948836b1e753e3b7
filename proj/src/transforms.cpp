#include "minexp/transforms.hpp"

#include <algorithm>

namespace minexp {

PartialEvalResult partial_eval(const CnfFormula& s, const PartialAssignment& l) {
  PartialEvalResult r;
  r.simplified.num_vars = s.num_vars;
  for (std::size_t id = 0; id < s.clauses.size(); ++id) {
    const Clause& c = s.clauses[id];
    bool satisfied = c.tautological();
    std::vector<Literal> open;
    for (auto lit : c) {
      if (satisfied) break;
      switch (l.value(lit)) {
        case Truth::True: satisfied = true; break;
        case Truth::Unknown: open.push_back(lit); break;
        case Truth::False: break;
      }
    }
    if (satisfied) {
      r.removed.push_back(id);
    } else if (open.empty()) {
      r.falsified.push_back(id);
    } else {
      r.simplified.clauses.emplace_back(std::move(open));
      r.kept.push_back(id);
    }
  }
  return r;
}

bool cnf_valid_after(const CnfFormula& s, const PartialAssignment& l) {
  for (const auto& c : s.clauses) {
    if (c.tautological()) continue;
    bool sat = std::any_of(c.begin(), c.end(), [&](Literal x) { return l.value(x) == Truth::True; });
    if (!sat) return false;
  }
  return true;
}

namespace {

class TseitinBuilder {
 public:
  explicit TseitinBuilder(Var first) : next_(first) {}

  Literal encode(const Formula& f) {
    switch (f.kind()) {
      case NodeKind::Atom:
        return Literal::pos(f.var());
      case NodeKind::Neg: {
        Literal x = encode(f.child());
        Literal a = fresh();
        add({~a, ~x});
        add({a, x});
        return a;
      }
      case NodeKind::And: {
        Literal x = encode(f.left());
        Literal y = encode(f.right());
        Literal a = fresh();
        add({~a, x});
        add({~a, y});
        add({a, ~x, ~y});
        return a;
      }
      case NodeKind::Or: {
        Literal x = encode(f.left());
        Literal y = encode(f.right());
        Literal a = fresh();
        add({~a, x, y});
        add({a, ~x});
        add({a, ~y});
        return a;
      }
      case NodeKind::Verum: {
        Literal a = fresh();
        add({a});
        return a;
      }
      case NodeKind::Falsum: {
        Literal a = fresh();
        add({~a});
        return a;
      }
    }
    return {};
  }

  CnfFormula cnf;
  Var next_;

 private:
  Literal fresh() { return Literal::pos(next_++); }
  void add(std::vector<Literal> lits) { cnf.add_clause(std::move(lits)); }
};

}  // namespace

TseitinResult tseitin(const Formula& f, Var original_vars) {
  Var base = std::max(original_vars, max_var(f));
  TseitinBuilder b(base + 1);
  Literal root = b.encode(f);
  TseitinResult r;
  r.cnf = std::move(b.cnf);
  r.cnf.num_vars = std::max(r.cnf.num_vars, std::max(base, root.var()));
  r.root = root;
  r.first_aux = base + 1;
  r.last_aux = b.next_ - 1;
  return r;
}

std::size_t dm_size(const std::vector<Literal>& chi, Target mode) {
  if (chi.empty()) return 0;
  std::size_t negatives = 0;
  for (auto l : chi) negatives += l.negative();
  std::size_t positives = chi.size() - negatives;
  bool has_negation = mode == Target::Top ? negatives > 0 : positives > 0;
  return 2 * chi.size() - 1 + (has_negation ? 1 : 0);
}

Explanation dm_render(std::vector<Literal> chi, Target mode) {
  std::sort(chi.begin(), chi.end());
  chi.erase(std::unique(chi.begin(), chi.end()), chi.end());
  for (std::size_t i = 1; i < chi.size(); ++i)
    if (chi[i].var() == chi[i - 1].var())
      throw std::invalid_argument("inconsistent subconjunction: variable " +
                                  std::to_string(chi[i].var()) + " in both polarities");

  std::vector<Formula> pos, neg;
  for (auto l : chi) (l.positive() ? pos : neg).push_back(Formula::atom(l.var()));

  Explanation e;
  e.mode = mode;
  if (chi.empty()) {
    e.rendered = mode == Target::Top ? Formula::verum() : Formula::falsum();
  } else if (mode == Target::Top) {
    std::vector<Formula> parts;
    if (!pos.empty()) parts.push_back(conj_chain(pos));
    if (!neg.empty()) parts.push_back(Formula::negation(disj_chain(neg)));
    e.rendered = conj_chain(parts);
  } else {
    std::vector<Formula> parts;
    if (!pos.empty()) parts.push_back(Formula::negation(conj_chain(pos)));
    if (!neg.empty()) parts.push_back(disj_chain(neg));
    e.rendered = disj_chain(parts);
  }
  e.size = formula_size(e.rendered);
  e.chi = std::move(chi);
  return e;
}

namespace {

using ClauseList = std::vector<std::vector<Literal>>;

// cnf of an NNF formula; false on overflow
bool distribute(const Formula& f, std::size_t cap, ClauseList& out) {
  switch (f.kind()) {
    case NodeKind::Atom:
      out = {{Literal::pos(f.var())}};
      return true;
    case NodeKind::Neg:  // NNF: only over atoms
      out = {{Literal::neg(f.child().var())}};
      return true;
    case NodeKind::Verum:
      out.clear();
      return true;
    case NodeKind::Falsum:
      out = {{}};
      return true;
    case NodeKind::And: {
      ClauseList l, r;
      if (!distribute(f.left(), cap, l) || !distribute(f.right(), cap, r)) return false;
      if (l.size() + r.size() > cap) return false;
      l.insert(l.end(), r.begin(), r.end());
      out = std::move(l);
      return true;
    }
    case NodeKind::Or: {
      ClauseList l, r;
      if (!distribute(f.left(), cap, l) || !distribute(f.right(), cap, r)) return false;
      if (l.size() * r.size() > cap) return false;
      out.clear();
      for (const auto& a : l)
        for (const auto& b : r) {
          Clause c([&] {
            auto v = a;
            v.insert(v.end(), b.begin(), b.end());
            return v;
          }());
          if (!c.tautological()) out.push_back(c.literals());
        }
      return true;
    }
  }
  return false;
}

}  // namespace

std::optional<CnfFormula> clausal_form(const Formula& f, std::size_t max_clauses) {
  ClauseList cl;
  if (!distribute(dualize(dualize(f)), max_clauses, cl)) return std::nullopt;
  CnfFormula out;
  out.num_vars = max_var(f);
  for (auto& c : cl) {
    Clause clause(std::move(c));
    if (!clause.tautological()) out.add_clause(std::move(clause));
  }
  return out;
}

Formula to_formula(const CnfFormula& s) {
  std::vector<Formula> parts;
  for (const auto& c : s.clauses) {
    std::vector<Formula> lits;
    for (auto l : c) lits.push_back(Formula::literal(l));
    parts.push_back(disj_chain(lits));
  }
  return conj_chain(parts);
}

}  // namespace minexp
