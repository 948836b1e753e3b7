#pragma once

#include <chrono>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "minexp/explain.hpp"
#include "minexp/formula.hpp"

namespace minexp {

/// ∃ exist_vars ∀ univ_vars . matrix
struct Qbf2Instance {
  std::vector<Var> exist_vars;
  std::vector<Var> univ_vars;
  Formula matrix = Formula::verum();
};

/// Prefix lines `e 1 2 0` and `a 3 0` (any order, each optional), then the
/// matrix in the formula grammar. Lines starting with `c` are comments.
Qbf2Instance parse_qbf2(std::string_view text);
std::string render_qbf2(const Qbf2Instance& q);

/// Brute-force truth of the 2QBF. Throws BudgetExceeded when n + m > 20.
bool qbf2_eval(const Qbf2Instance& q);

struct Sigma2Reduction {
  ProblemInstance instance;  // psi as a formula tree, all-true assignment, target Top
  std::size_t k = 0;         // 2n - 1 (0 when n = 0)
  std::vector<Var> complement_vars;  // the fresh atom paired with each existential
};

/// psi := ⋀(p_i ∨ p̄_i) ∧ (θ ∨ ⋁(p_i ∧ p̄_i)); the QBF is true iff psi has an
/// explanation of size at most 2n-1 under the all-true assignment.
Sigma2Reduction sigma2_to_explainability(const Qbf2Instance& q);

/// Simple undirected graph on vertices 1..num_vertices.
class Graph {
 public:
  Graph() = default;
  explicit Graph(std::uint32_t n) : adj_(n + 1) {}

  std::uint32_t num_vertices() const { return adj_.empty() ? 0 : static_cast<std::uint32_t>(adj_.size() - 1); }
  /// Throws std::invalid_argument on self-loops or out-of-range endpoints.
  /// Returns false when the edge was already present.
  bool add_edge(std::uint32_t u, std::uint32_t v);
  bool remove_edge(std::uint32_t u, std::uint32_t v);
  bool has_edge(std::uint32_t u, std::uint32_t v) const;
  const std::vector<std::uint32_t>& neighbors(std::uint32_t v) const { return adj_[v]; }
  /// Sorted (u < v) pairs.
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges() const;
  std::size_t num_edges() const;
  bool connected() const;

 private:
  std::vector<std::vector<std::uint32_t>> adj_;  // sorted neighbor lists
};

/// `<u> <v>` per line; an optional `n <count>` line declares isolated vertices.
Graph parse_edge_list(std::string_view text);
std::string render_edge_list(const Graph& g);

bool is_dominating_set(const Graph& g, const std::vector<std::uint32_t>& set);
/// γ(G) by exhaustive subset search. Throws BudgetExceeded above 24 vertices.
std::size_t domination_number(const Graph& g);

/// One clause per vertex v: in(v) ∨ ⋁ in(u) over neighbors u, with in(v) = v.
CnfFormula domset_cnf(const Graph& g);

struct DomsetReduction {
  ProblemInstance instance;  // CNF psi, all-true assignment, target Top
  std::size_t k = 0;         // 2k - 1
};

/// G has a dominating set of size <= k iff the instance has an explanation of
/// size <= 2k-1. Throws std::invalid_argument on an empty graph.
DomsetReduction domset_to_explainability(const Graph& g, std::size_t k);

/// For a CNF psi falsified by the all-true assignment over Φ = {1..num_vars}:
/// psi ∧ ¬q with fresh q = num_vars + 1, assignment all Φ true and q false,
/// target Bottom. A size-1 explanation (the formula q) exists iff psi is
/// unsatisfiable. Throws std::invalid_argument if the all-true assignment
/// satisfies psi.
ProblemInstance conp_gadget(const CnfFormula& psi);

// --- verification harness --------------------------------------------------

using ReductionInput = std::variant<std::vector<Qbf2Instance>, std::vector<Graph>, std::vector<CnfFormula>>;

struct VerifyBudget {
  std::chrono::milliseconds total{60'000};
  std::chrono::milliseconds per_case{10'000};
};

struct ReductionReport {
  std::string kind;  // sigma2 | domset | conp
  std::size_t cases = 0;
  std::size_t agreements = 0;
  std::size_t skipped = 0;  // over budget or oracle limits
  bool complete = true;     // false when the total budget ran out
  std::vector<std::string> disagreements;

  bool all_agree() const { return disagreements.empty() && agreements == cases; }
};

/// Runs both sides of each reduction's iff on every input and tallies agreement:
/// sigma2: qbf2_eval vs decide_bounded at k = 2n-1;
/// domset: exhaustive γ(G) vs decide_bounded at 2k-1 for every k, and the minimum size;
/// conp: unsatisfiability by enumeration vs decide_bounded at 1.
ReductionReport verify_reduction(const ReductionInput& input, const VerifyBudget& budget = {});

// --- random inputs for harnesses -----------------------------------------

/// Random matrix with exactly `size` occurrences of atoms, connectives and
/// negations (size >= 1) over the given atoms.
Formula random_formula(const std::vector<Var>& atoms, std::size_t size, std::mt19937_64& rng);
/// Existentials 1..n, universals n+1..n+m, random matrix of size <= max_size.
Qbf2Instance random_qbf2(std::size_t n, std::size_t m, std::size_t max_size, std::mt19937_64& rng);
/// Erdős–Rényi graph with edge probability p, optionally patched to be connected.
Graph random_graph(std::uint32_t n, double p, bool connected, std::mt19937_64& rng);

}  // namespace minexp
