#include "minexp/explain.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

#include "minexp/hitting_set.hpp"
#include "minexp/sat_solver.hpp"

namespace minexp {

namespace {

struct DeadlineHit {};

constexpr std::size_t kNoLimit = std::numeric_limits<std::size_t>::max();

Var instance_vars(const ProblemInstance& inst) {
  Var psi_vars = std::visit(
      [](const auto& p) -> Var {
        if constexpr (std::is_same_v<std::decay_t<decltype(p)>, CnfFormula>)
          return p.num_vars;
        else
          return max_var(p);
      },
      inst.psi);
  return std::max(psi_vars, inst.assignment.max_var());
}

/// CNF whose unsatisfiability under assumptions chi means chi explains the
/// target: psi itself for Bottom, the definitional CNF of ¬psi for Top.
CnfFormula refutation_base(const ProblemInstance& inst) {
  if (const auto* cnf = std::get_if<CnfFormula>(&inst.psi)) {
    if (inst.target == Target::Bottom) return *cnf;
    // only reached for checks on a CNF with Top; ¬S as a formula
    TseitinResult t = tseitin(to_formula(*cnf), instance_vars(inst));
    t.cnf.add_clause({~t.root});
    return std::move(t.cnf);
  }
  const auto& f = std::get<Formula>(inst.psi);
  TseitinResult t = tseitin(f, instance_vars(inst));
  t.cnf.add_clause({inst.target == Target::Top ? ~t.root : t.root});
  return std::move(t.cnf);
}

bool uses_set_cover(const ProblemInstance& inst) {
  return inst.target == Target::Top && std::holds_alternative<CnfFormula>(inst.psi);
}

std::vector<Literal> pick(const std::vector<Literal>& lits, const std::vector<std::uint32_t>& idx) {
  std::vector<Literal> out;
  out.reserve(idx.size());
  for (auto i : idx) out.push_back(lits[i]);
  return out;
}

// Produces constraints every explanation must satisfy, and tells whether a
// candidate subset of L already is an explanation.
class Minimizer {
 public:
  Minimizer(const ProblemInstance& inst, const ExplainOptions& opts)
      : inst_(inst), opts_(opts), lits_(inst.assignment.literals()),
        deadline_(Clock::now() + opts.timeout) {
    sys_.num_candidates = static_cast<std::uint32_t>(lits_.size());
    for (std::size_t i = 0; i < lits_.size(); ++i)
      preferred_.push_back(inst.target == Target::Top ? lits_[i].positive() : lits_[i].negative());

    if (uses_set_cover(inst)) {
      // exact: chi must hit every non-tautological clause with a true literal
      const auto& s = std::get<CnfFormula>(inst.psi);
      for (const auto& c : s.clauses) {
        if (c.tautological()) continue;
        std::vector<std::uint32_t> set;
        for (std::uint32_t i = 0; i < lits_.size(); ++i)
          if (c.contains(lits_[i])) set.push_back(i);
        sys_.add(std::move(set));
      }
      if (auto g = greedy_hitting_set(sys_)) incumbent_ = *g;
    } else {
      SolverOptions so;
      so.deadline = deadline_;
      solver_.emplace(refutation_base(inst), so);
    }
  }

  const std::vector<Literal>& literals() const { return lits_; }
  const std::vector<bool>& preferred() const { return preferred_; }
  ExplainStats& stats() { return stats_; }
  std::size_t lower_bound() const { return lower_bound_; }
  const std::optional<std::vector<std::uint32_t>>& incumbent() const { return incumbent_; }

  /// Minimum cardinality, or nullopt when it exceeds `limit`.
  std::optional<std::vector<std::uint32_t>> minimize(std::size_t limit) {
    for (;;) {
      HittingSetOptions ho;
      ho.limit = limit;
      ho.deadline = deadline_;
      ++stats_.hitting_set_calls;
      HittingSetResult r = minimum_hitting_set(sys_, ho);
      lower_bound_ = std::max(lower_bound_, r.lower_bound);
      if (r.status == SearchStatus::Timeout) throw DeadlineHit{};
      if (r.status == SearchStatus::Infeasible) return std::nullopt;
      lower_bound_ = std::max(lower_bound_, r.best.size());
      if (!refute(r.best)) return r.best;
    }
  }

  /// Lexicographically first explanation of cardinality m among `allowed`
  /// candidates (m must be the minimum cardinality).
  std::optional<std::vector<std::uint32_t>> first_of_size(std::size_t m,
                                                          const std::vector<bool>& allowed) {
    for (;;) {
      HittingSetOptions ho;
      ho.allowed = allowed;
      ho.deadline = deadline_;
      ++stats_.hitting_set_calls;
      HittingSetResult r = lex_first_hitting_set(sys_, m, ho);
      if (r.status == SearchStatus::Timeout) throw DeadlineHit{};
      if (r.status == SearchStatus::Infeasible) return std::nullopt;
      if (!refute(r.best)) return r.best;
    }
  }

  bool any_preferred() const {
    return std::any_of(preferred_.begin(), preferred_.end(), [](bool b) { return b; });
  }

 private:
  void offer_incumbent(std::vector<std::uint32_t> sol) {
    if (!incumbent_ || sol.size() < incumbent_->size()) incumbent_ = std::move(sol);
  }

  std::vector<std::uint32_t> index_of(const std::vector<Literal>& core) const {
    std::vector<std::uint32_t> out;
    for (auto l : core) {
      auto it = std::lower_bound(lits_.begin(), lits_.end(), l);
      if (it != lits_.end() && *it == l) out.push_back(static_cast<std::uint32_t>(it - lits_.begin()));
    }
    return out;
  }

  // Adds a correction set and returns true when `chosen` is not an explanation.
  bool refute(const std::vector<std::uint32_t>& chosen) {
    if (!solver_) return false;  // set-cover constraints are exact
    ++stats_.sat_calls;
    SatResult r = solver_->solve(pick(lits_, chosen));
    if (r.status == SatStatus::Unknown) throw DeadlineHit{};
    if (r.status == SatStatus::Unsat) {
      offer_incumbent(index_of(r.core));
      return false;
    }
    std::vector<char> satisfied(lits_.size(), 0);
    auto absorb = [&](const PartialAssignment& model) {
      for (std::size_t i = 0; i < lits_.size(); ++i)
        if (model.value(lits_[i]) == Truth::True) satisfied[i] = 1;
    };
    absorb(r.model);
    if (opts_.grow_correction_sets) {
      for (std::size_t i = 0; i < lits_.size(); ++i) {
        if (satisfied[i]) continue;
        std::vector<Literal> trial;
        for (std::size_t j = 0; j < lits_.size(); ++j)
          if (satisfied[j] || j == i) trial.push_back(lits_[j]);
        ++stats_.sat_calls;
        SatResult g = solver_->solve(trial);
        if (g.status == SatStatus::Unknown) throw DeadlineHit{};
        if (g.status == SatStatus::Sat) absorb(g.model);
      }
    }
    std::vector<std::uint32_t> correction;
    for (std::uint32_t i = 0; i < lits_.size(); ++i)
      if (!satisfied[i]) correction.push_back(i);
    if (correction.empty())
      throw std::logic_error("model satisfies every literal of L; precondition should have failed");
    ++stats_.correction_sets;
    sys_.add(std::move(correction));
    return true;
  }

  const ProblemInstance& inst_;
  const ExplainOptions& opts_;
  std::vector<Literal> lits_;
  std::vector<bool> preferred_;
  Clock::time_point deadline_;
  SetSystem sys_;
  std::optional<SatSolver> solver_;
  std::optional<std::vector<std::uint32_t>> incumbent_;
  std::size_t lower_bound_ = 0;
  ExplainStats stats_;
};

void verify(const ProblemInstance& inst, const std::vector<Literal>& chi) {
  bool ok = false;
  if (uses_set_cover(inst))
    ok = cnf_valid_after(std::get<CnfFormula>(inst.psi), PartialAssignment::from_literals(chi));
  else
    ok = solve(refutation_base(inst), chi).status == SatStatus::Unsat;
  if (!ok) throw std::logic_error("explanation failed its soundness re-check");
}

}  // namespace

bool check_precondition(const ProblemInstance& inst) {
  if (const auto* f = std::get_if<Formula>(&inst.psi)) {
    auto as = atoms(*f);
    bool total = std::all_of(as.begin(), as.end(), [&](Var v) { return inst.assignment.assigned(v); });
    if (total) return eval(*f, inst.assignment) == (inst.target == Target::Top);
  } else if (inst.target == Target::Top) {
    return cnf_valid_after(std::get<CnfFormula>(inst.psi), inst.assignment);
  }
  return solve(refutation_base(inst), inst.assignment.literals()).status == SatStatus::Unsat;
}

ExplainResult explain_min(const ProblemInstance& inst, const ExplainOptions& opts) {
  ExplainResult res;
  if (!check_precondition(inst)) return res;

  Minimizer mz(inst, opts);
  const auto& lits = mz.literals();
  try {
    auto best = mz.minimize(kNoLimit);
    if (!best) throw std::logic_error("no explanation although the precondition holds");
    std::size_t m = best->size();
    std::optional<std::vector<std::uint32_t>> chosen;
    if (mz.any_preferred()) chosen = mz.first_of_size(m, mz.preferred());
    if (!chosen) chosen = mz.first_of_size(m, {});
    if (!chosen) throw std::logic_error("tie-break lost the minimum explanation");
    auto chi = pick(lits, *chosen);
    verify(inst, chi);
    res.status = ExplainStatus::Ok;
    res.explanation = dm_render(chi, inst.target);
    res.lower_bound = m;
  } catch (const DeadlineHit&) {
    res.status = ExplainStatus::Timeout;
    res.lower_bound = mz.lower_bound();
    if (mz.incumbent()) res.explanation = dm_render(pick(lits, *mz.incumbent()), inst.target);
  }
  res.stats = mz.stats();
  return res;
}

DecideResult decide_bounded(const ProblemInstance& inst, std::size_t k, const ExplainOptions& opts) {
  DecideResult res;
  if (!check_precondition(inst)) return res;

  // size(DM) = 2c-1 without the extra negation, 2c with it
  const std::size_t any_card = k / 2;
  const std::size_t pref_card = (k + 1) / 2;
  Minimizer mz(inst, opts);
  const auto& lits = mz.literals();
  try {
    res.status = ExplainStatus::Ok;
    auto best = mz.minimize(pref_card);
    if (!best) return res;
    if (best->size() <= any_card) {
      res.answer = Answer::Yes;
      res.witness = dm_render(pick(lits, *best), inst.target);
      return res;
    }
    if (mz.any_preferred()) {
      if (auto chosen = mz.first_of_size(best->size(), mz.preferred())) {
        res.answer = Answer::Yes;
        res.witness = dm_render(pick(lits, *chosen), inst.target);
      }
    }
  } catch (const DeadlineHit&) {
    res.status = ExplainStatus::Timeout;
  }
  return res;
}

// --- brute force ----------------------------------------------------------

ExplainResult brute_force_explain(const ProblemInstance& inst) {
  const auto lits = inst.assignment.literals();
  if (lits.size() > 20)
    throw BudgetExceeded("brute force limited to |L| <= 20, got " + std::to_string(lits.size()));

  std::vector<Var> vars;
  for (auto l : lits) vars.push_back(l.var());
  std::visit(
      [&](const auto& p) {
        if constexpr (std::is_same_v<std::decay_t<decltype(p)>, CnfFormula>) {
          for (const auto& c : p.clauses)
            for (auto l : c) vars.push_back(l.var());
        } else {
          for (auto v : atoms(p)) vars.push_back(v);
        }
      },
      inst.psi);
  std::sort(vars.begin(), vars.end());
  vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
  if (vars.size() > 24)
    throw BudgetExceeded("brute force limited to 24 variables, got " + std::to_string(vars.size()));

  auto pos_of = [&](Var v) {
    return static_cast<std::size_t>(std::lower_bound(vars.begin(), vars.end(), v) - vars.begin());
  };
  const bool want = inst.target == Target::Top;

  // every total assignment on which psi disagrees with the target
  std::vector<std::uint32_t> bad;
  PartialAssignment s(vars.empty() ? 0 : vars.back());
  for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << vars.size()); ++bits) {
    for (std::size_t i = 0; i < vars.size(); ++i) s.set(vars[i], (bits >> i) & 1u);
    bool value = std::visit(
        [&](const auto& p) -> bool {
          if constexpr (std::is_same_v<std::decay_t<decltype(p)>, CnfFormula>) {
            return std::all_of(p.clauses.begin(), p.clauses.end(), [&](const Clause& c) {
              return std::any_of(c.begin(), c.end(),
                                 [&](Literal l) { return s.value(l) == Truth::True; });
            });
          } else {
            return eval(p, s);
          }
        },
        inst.psi);
    if (value != want) bad.push_back(static_cast<std::uint32_t>(bits));
  }

  std::vector<std::uint32_t> lit_mask(lits.size()), lit_val(lits.size());
  for (std::size_t i = 0; i < lits.size(); ++i) {
    lit_mask[i] = std::uint32_t{1} << pos_of(lits[i].var());
    lit_val[i] = lits[i].positive() ? lit_mask[i] : 0;
  }
  auto explains = [&](const std::vector<std::size_t>& idx) {
    std::uint32_t mask = 0, val = 0;
    for (auto i : idx) {
      mask |= lit_mask[i];
      val |= lit_val[i];
    }
    return std::none_of(bad.begin(), bad.end(), [&](std::uint32_t b) { return (b & mask) == val; });
  };

  ExplainResult res;
  std::vector<std::size_t> all(lits.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  if (!explains(all)) return res;

  auto is_pref = [&](std::size_t i) {
    return want ? lits[i].positive() : lits[i].negative();
  };
  std::vector<std::size_t> pref;
  for (std::size_t i = 0; i < lits.size(); ++i)
    if (is_pref(i)) pref.push_back(i);

  // first k-combination of `pool` (lexicographic) passing `accept`
  auto search = [&](const std::vector<std::size_t>& pool, std::size_t k,
                    auto&& accept) -> std::optional<std::vector<std::size_t>> {
    if (k > pool.size()) return std::nullopt;
    std::vector<std::size_t> comb(k);
    for (std::size_t i = 0; i < k; ++i) comb[i] = i;
    for (;;) {
      std::vector<std::size_t> idx(k);
      for (std::size_t i = 0; i < k; ++i) idx[i] = pool[comb[i]];
      if (accept(idx)) return idx;
      std::size_t i = k;
      while (i > 0 && comb[i - 1] == pool.size() - k + i - 1) --i;
      if (i == 0) return std::nullopt;
      ++comb[i - 1];
      for (std::size_t j = i; j < k; ++j) comb[j] = comb[j - 1] + 1;
    }
  };

  for (std::size_t k = 0; k <= lits.size(); ++k) {
    auto found = search(pref, k, explains);
    if (!found) found = search(all, k, explains);
    if (found) {
      res.status = ExplainStatus::Ok;
      std::vector<Literal> chi;
      for (auto i : *found) chi.push_back(lits[i]);
      res.explanation = dm_render(chi, inst.target);
      res.lower_bound = k;
      return res;
    }
  }
  throw std::logic_error("unreachable: L itself explains the target");
}

}  // namespace minexp
