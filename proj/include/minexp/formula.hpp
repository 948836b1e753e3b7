#pragma once

#include <compare>
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace minexp {

using Var = std::uint32_t;

/// A propositional literal: an atom or its negation. Variables are 1-based.
class Literal {
 public:
  constexpr Literal() = default;
  constexpr Literal(Var var, bool negative) : var_(var), negative_(negative) {}

  static constexpr Literal pos(Var v) { return {v, false}; }
  static constexpr Literal neg(Var v) { return {v, true}; }
  /// Signed DIMACS integer; throws std::invalid_argument on 0.
  static Literal from_dimacs(long long value);

  constexpr Var var() const { return var_; }
  constexpr bool negative() const { return negative_; }
  constexpr bool positive() const { return !negative_; }
  constexpr Literal operator~() const { return {var_, !negative_}; }
  long long to_dimacs() const {
    return negative_ ? -static_cast<long long>(var_) : static_cast<long long>(var_);
  }

  // Ordered by variable, positive before negative.
  friend constexpr std::strong_ordering operator<=>(Literal a, Literal b) {
    if (auto c = a.var_ <=> b.var_; c != 0) return c;
    return a.negative_ <=> b.negative_;
  }
  friend constexpr bool operator==(Literal, Literal) = default;

 private:
  Var var_ = 0;
  bool negative_ = false;
};

/// Disjunction of literals, kept sorted and free of duplicates.
class Clause {
 public:
  Clause() = default;
  explicit Clause(std::vector<Literal> literals);

  const std::vector<Literal>& literals() const { return literals_; }
  std::size_t size() const { return literals_.size(); }
  bool empty() const { return literals_.empty(); }
  bool contains(Literal l) const;
  /// True when the clause holds a complementary pair.
  bool tautological() const;

  auto begin() const { return literals_.begin(); }
  auto end() const { return literals_.end(); }

  friend bool operator==(const Clause&, const Clause&) = default;

 private:
  std::vector<Literal> literals_;
};

/// Clause set over variables 1..num_vars. Clause order (and hence clause ids) is
/// the insertion order.
struct CnfFormula {
  Var num_vars = 0;
  std::vector<Clause> clauses;

  CnfFormula() = default;
  CnfFormula(Var vars, std::vector<Clause> cs);

  /// Appends a clause, raising num_vars if needed. Returns its id.
  std::size_t add_clause(std::vector<Literal> literals);
  std::size_t add_clause(Clause c);

  friend bool operator==(const CnfFormula&, const CnfFormula&) = default;
};

enum class Truth : std::uint8_t { False, True, Unknown };

/// Three-valued assignment. Doubles as the literal set L of an explanation
/// instance: {p : v(p)=1} ∪ {¬p : v(p)=0}.
class PartialAssignment {
 public:
  PartialAssignment() = default;
  explicit PartialAssignment(Var num_vars) : values_(num_vars + 1, Truth::Unknown) {}

  /// Throws std::invalid_argument on a complementary pair.
  static PartialAssignment from_literals(const std::vector<Literal>& lits);
  static PartialAssignment all_true(Var num_vars);

  Truth value(Var v) const { return v < values_.size() ? values_[v] : Truth::Unknown; }
  Truth value(Literal l) const;
  bool assigned(Var v) const { return value(v) != Truth::Unknown; }
  void set(Var v, bool value);
  void unset(Var v);
  /// Highest variable index the assignment has room for.
  Var max_var() const { return values_.empty() ? 0 : static_cast<Var>(values_.size() - 1); }

  /// The literal-set view, sorted by variable.
  std::vector<Literal> literals() const;
  std::size_t count_assigned() const;
  bool total_over(Var num_vars) const;

  friend bool operator==(const PartialAssignment& a, const PartialAssignment& b);

 private:
  std::vector<Truth> values_;
};

enum class NodeKind : std::uint8_t { Atom, Neg, And, Or, Verum, Falsum };

/// Immutable propositional formula tree. Subtrees are shared.
///
/// Verum and Falsum are not part of the object language; they stand for the
/// empty explanation and have size 0.
class Formula {
 public:
  static Formula atom(Var v);
  static Formula negation(Formula f);
  static Formula conj(Formula l, Formula r);
  static Formula disj(Formula l, Formula r);
  static Formula verum();
  static Formula falsum();
  static Formula literal(Literal l);

  NodeKind kind() const { return node_->kind; }
  Var var() const { return node_->var; }
  const Formula& child() const { return *node_->left; }
  const Formula& left() const { return *node_->left; }
  const Formula& right() const { return *node_->right; }
  bool is_binary() const { return kind() == NodeKind::And || kind() == NodeKind::Or; }

  /// Structural equality.
  friend bool operator==(const Formula& a, const Formula& b);

 private:
  struct Node {
    NodeKind kind;
    Var var = 0;
    std::shared_ptr<const Formula> left;
    std::shared_ptr<const Formula> right;
  };
  explicit Formula(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

/// Occurrences of atoms, binary connectives and negations.
std::size_t formula_size(const Formula& f);

/// Largest atom index in f (0 when there is none).
Var max_var(const Formula& f);
/// Sorted distinct atoms of f.
std::vector<Var> atoms(const Formula& f);
/// Atom occurrences, counted with multiplicity.
std::size_t atom_occurrences(const Formula& f);

class IncompleteAssignment : public std::runtime_error {
 public:
  explicit IncompleteAssignment(Var v);
  Var var() const { return var_; }

 private:
  Var var_;
};

/// Two-valued evaluation. Throws IncompleteAssignment if an atom is unknown.
bool eval(const Formula& f, const PartialAssignment& s);

/// Negation normal form of ¬f: ∧/∨ swapped and literal polarity flipped.
Formula dualize(const Formula& f);

/// Left-nested chains (((a op b) op c) op d). Empty input yields verum / falsum.
Formula conj_chain(const std::vector<Formula>& parts);
Formula disj_chain(const std::vector<Formula>& parts);

/// Maps atom indices to display names; unnamed atoms print as p<index>.
using NameTable = std::unordered_map<Var, std::string>;

/// Fully parenthesised text in the formula grammar.
std::string to_string(const Formula& f, const NameTable& names = {});

}  // namespace minexp
