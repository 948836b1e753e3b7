#include "minexp/formula.hpp"

#include <algorithm>
#include <set>

namespace minexp {

Literal Literal::from_dimacs(long long value) {
  if (value == 0) throw std::invalid_argument("literal 0 is not a literal");
  return value > 0 ? pos(static_cast<Var>(value)) : neg(static_cast<Var>(-value));
}

Clause::Clause(std::vector<Literal> literals) : literals_(std::move(literals)) {
  std::sort(literals_.begin(), literals_.end());
  literals_.erase(std::unique(literals_.begin(), literals_.end()), literals_.end());
}

bool Clause::contains(Literal l) const {
  return std::binary_search(literals_.begin(), literals_.end(), l);
}

bool Clause::tautological() const {
  // sorted by (var, polarity): a complementary pair is adjacent
  for (std::size_t i = 1; i < literals_.size(); ++i)
    if (literals_[i].var() == literals_[i - 1].var()) return true;
  return false;
}

CnfFormula::CnfFormula(Var vars, std::vector<Clause> cs) : num_vars(vars), clauses(std::move(cs)) {
  for (const auto& c : clauses)
    for (auto l : c)
      if (l.var() > num_vars) throw std::invalid_argument("literal exceeds declared variable count");
}

std::size_t CnfFormula::add_clause(std::vector<Literal> literals) {
  return add_clause(Clause(std::move(literals)));
}

std::size_t CnfFormula::add_clause(Clause c) {
  for (auto l : c) num_vars = std::max(num_vars, l.var());
  clauses.push_back(std::move(c));
  return clauses.size() - 1;
}

PartialAssignment PartialAssignment::from_literals(const std::vector<Literal>& lits) {
  Var top = 0;
  for (auto l : lits) top = std::max(top, l.var());
  PartialAssignment a(top);
  for (auto l : lits) {
    Truth want = l.negative() ? Truth::False : Truth::True;
    if (a.values_[l.var()] != Truth::Unknown && a.values_[l.var()] != want)
      throw std::invalid_argument("complementary literals for variable " + std::to_string(l.var()));
    a.values_[l.var()] = want;
  }
  return a;
}

PartialAssignment PartialAssignment::all_true(Var num_vars) {
  PartialAssignment a(num_vars);
  for (Var v = 1; v <= num_vars; ++v) a.values_[v] = Truth::True;
  return a;
}

Truth PartialAssignment::value(Literal l) const {
  Truth t = value(l.var());
  if (t == Truth::Unknown || l.positive()) return t;
  return t == Truth::True ? Truth::False : Truth::True;
}

void PartialAssignment::set(Var v, bool value) {
  if (v == 0) throw std::invalid_argument("variable 0");
  if (v >= values_.size()) values_.resize(v + 1, Truth::Unknown);
  values_[v] = value ? Truth::True : Truth::False;
}

void PartialAssignment::unset(Var v) {
  if (v < values_.size()) values_[v] = Truth::Unknown;
}

std::vector<Literal> PartialAssignment::literals() const {
  std::vector<Literal> out;
  for (Var v = 1; v < values_.size(); ++v) {
    if (values_[v] == Truth::True) out.push_back(Literal::pos(v));
    if (values_[v] == Truth::False) out.push_back(Literal::neg(v));
  }
  return out;
}

std::size_t PartialAssignment::count_assigned() const {
  return static_cast<std::size_t>(
      std::count_if(values_.begin(), values_.end(), [](Truth t) { return t != Truth::Unknown; }));
}

bool PartialAssignment::total_over(Var num_vars) const {
  for (Var v = 1; v <= num_vars; ++v)
    if (!assigned(v)) return false;
  return true;
}

bool operator==(const PartialAssignment& a, const PartialAssignment& b) {
  return a.literals() == b.literals();
}

// --- Formula --------------------------------------------------------------

Formula Formula::atom(Var v) {
  if (v == 0) throw std::invalid_argument("atom index must be positive");
  return Formula(std::make_shared<const Node>(Node{NodeKind::Atom, v, nullptr, nullptr}));
}

Formula Formula::negation(Formula f) {
  return Formula(std::make_shared<const Node>(
      Node{NodeKind::Neg, 0, std::make_shared<const Formula>(std::move(f)), nullptr}));
}

Formula Formula::conj(Formula l, Formula r) {
  return Formula(std::make_shared<const Node>(Node{NodeKind::And, 0,
                                                   std::make_shared<const Formula>(std::move(l)),
                                                   std::make_shared<const Formula>(std::move(r))}));
}

Formula Formula::disj(Formula l, Formula r) {
  return Formula(std::make_shared<const Node>(Node{NodeKind::Or, 0,
                                                   std::make_shared<const Formula>(std::move(l)),
                                                   std::make_shared<const Formula>(std::move(r))}));
}

Formula Formula::verum() {
  static const Formula t(std::make_shared<const Node>(Node{NodeKind::Verum, 0, nullptr, nullptr}));
  return t;
}

Formula Formula::falsum() {
  static const Formula f(std::make_shared<const Node>(Node{NodeKind::Falsum, 0, nullptr, nullptr}));
  return f;
}

Formula Formula::literal(Literal l) {
  return l.negative() ? negation(atom(l.var())) : atom(l.var());
}

bool operator==(const Formula& a, const Formula& b) {
  if (a.node_ == b.node_) return true;
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case NodeKind::Atom:
      return a.var() == b.var();
    case NodeKind::Neg:
      return a.child() == b.child();
    case NodeKind::And:
    case NodeKind::Or:
      return a.left() == b.left() && a.right() == b.right();
    case NodeKind::Verum:
    case NodeKind::Falsum:
      return true;
  }
  return false;
}

std::size_t formula_size(const Formula& f) {
  switch (f.kind()) {
    case NodeKind::Atom:
      return 1;
    case NodeKind::Neg:
      return 1 + formula_size(f.child());
    case NodeKind::And:
    case NodeKind::Or:
      return 1 + formula_size(f.left()) + formula_size(f.right());
    case NodeKind::Verum:
    case NodeKind::Falsum:
      return 0;
  }
  return 0;
}

namespace {

void collect_atoms(const Formula& f, std::set<Var>& out, std::size_t& occurrences) {
  switch (f.kind()) {
    case NodeKind::Atom:
      out.insert(f.var());
      ++occurrences;
      return;
    case NodeKind::Neg:
      collect_atoms(f.child(), out, occurrences);
      return;
    case NodeKind::And:
    case NodeKind::Or:
      collect_atoms(f.left(), out, occurrences);
      collect_atoms(f.right(), out, occurrences);
      return;
    default:
      return;
  }
}

}  // namespace

Var max_var(const Formula& f) {
  auto as = atoms(f);
  return as.empty() ? 0 : as.back();
}

std::vector<Var> atoms(const Formula& f) {
  std::set<Var> s;
  std::size_t n = 0;
  collect_atoms(f, s, n);
  return {s.begin(), s.end()};
}

std::size_t atom_occurrences(const Formula& f) {
  std::set<Var> s;
  std::size_t n = 0;
  collect_atoms(f, s, n);
  return n;
}

IncompleteAssignment::IncompleteAssignment(Var v)
    : std::runtime_error("assignment leaves atom " + std::to_string(v) + " unknown"), var_(v) {}

bool eval(const Formula& f, const PartialAssignment& s) {
  switch (f.kind()) {
    case NodeKind::Atom: {
      Truth t = s.value(f.var());
      if (t == Truth::Unknown) throw IncompleteAssignment(f.var());
      return t == Truth::True;
    }
    case NodeKind::Neg:
      return !eval(f.child(), s);
    case NodeKind::And:
      // both sides evaluated so a missing atom is always reported
      return eval(f.left(), s) & eval(f.right(), s);
    case NodeKind::Or:
      return eval(f.left(), s) | eval(f.right(), s);
    case NodeKind::Verum:
      return true;
    case NodeKind::Falsum:
      return false;
  }
  return false;
}

namespace {

Formula nnf(const Formula& f, bool negate) {
  switch (f.kind()) {
    case NodeKind::Atom:
      return negate ? Formula::negation(f) : f;
    case NodeKind::Neg:
      return nnf(f.child(), !negate);
    case NodeKind::And: {
      auto l = nnf(f.left(), negate), r = nnf(f.right(), negate);
      return negate ? Formula::disj(l, r) : Formula::conj(l, r);
    }
    case NodeKind::Or: {
      auto l = nnf(f.left(), negate), r = nnf(f.right(), negate);
      return negate ? Formula::conj(l, r) : Formula::disj(l, r);
    }
    case NodeKind::Verum:
      return negate ? Formula::falsum() : f;
    case NodeKind::Falsum:
      return negate ? Formula::verum() : f;
  }
  return f;
}

}  // namespace

Formula dualize(const Formula& f) { return nnf(f, true); }

Formula conj_chain(const std::vector<Formula>& parts) {
  if (parts.empty()) return Formula::verum();
  Formula acc = parts.front();
  for (std::size_t i = 1; i < parts.size(); ++i) acc = Formula::conj(acc, parts[i]);
  return acc;
}

Formula disj_chain(const std::vector<Formula>& parts) {
  if (parts.empty()) return Formula::falsum();
  Formula acc = parts.front();
  for (std::size_t i = 1; i < parts.size(); ++i) acc = Formula::disj(acc, parts[i]);
  return acc;
}

namespace {

void print(const Formula& f, const NameTable& names, std::string& out) {
  switch (f.kind()) {
    case NodeKind::Atom: {
      auto it = names.find(f.var());
      out += it != names.end() ? it->second : "p" + std::to_string(f.var());
      return;
    }
    case NodeKind::Neg:
      out += '~';
      print(f.child(), names, out);
      return;
    case NodeKind::And:
    case NodeKind::Or:
      out += '(';
      print(f.left(), names, out);
      out += f.kind() == NodeKind::And ? " & " : " | ";
      print(f.right(), names, out);
      out += ')';
      return;
    case NodeKind::Verum:
      out += "true";
      return;
    case NodeKind::Falsum:
      out += "false";
      return;
  }
}

}  // namespace

std::string to_string(const Formula& f, const NameTable& names) {
  std::string out;
  print(f, names, out);
  return out;
}

}  // namespace minexp
