#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "minexp/formula.hpp"
#include "minexp/transforms.hpp"

namespace minexp {

/// The formula being explained: a clause set or a general formula tree.
using Psi = std::variant<CnfFormula, Formula>;

/// (M, psi, b[, k]): the literal set M (possibly partial), the formula, the
/// truth value to explain and an optional size bound.
struct ProblemInstance {
  PartialAssignment assignment;
  Psi psi;
  Target target = Target::Top;
  std::optional<std::size_t> bound;
};

struct ExplainOptions {
  std::chrono::milliseconds timeout{300'000};
  /// Grow each correction set to a maximal one before adding it (negative case).
  bool grow_correction_sets = true;
};

enum class ExplainStatus : std::uint8_t { Ok, PreconditionFailed, Timeout };

inline const char* to_string(ExplainStatus s) {
  switch (s) {
    case ExplainStatus::Ok: return "ok";
    case ExplainStatus::PreconditionFailed: return "precondition_failed";
    case ExplainStatus::Timeout: return "timeout";
  }
  return "?";
}

struct ExplainStats {
  std::uint64_t sat_calls = 0;
  std::uint64_t hitting_set_calls = 0;
  std::uint64_t correction_sets = 0;
};

struct ExplainResult {
  ExplainStatus status = ExplainStatus::PreconditionFailed;
  /// Ok: the minimum explanation. Timeout: best incumbent, if any.
  std::optional<Explanation> explanation;
  /// Proven lower bound on |chi|.
  std::size_t lower_bound = 0;
  ExplainStats stats;
};

/// psi|L valid (Top) or psi ∧ L unsatisfiable (Bottom). For a formula tree
/// and an assignment covering its atoms this is plain evaluation.
bool check_precondition(const ProblemInstance& inst);

/// Minimum-cardinality subconjunction chi ⊆ L explaining the target, rendered in
/// De Morgan form. Among minimum-cardinality answers the one without the extra
/// negation is preferred, then the lexicographically least literal set.
ExplainResult explain_min(const ProblemInstance& inst, const ExplainOptions& opts = {});

enum class Answer : std::uint8_t { Yes, No };

struct DecideResult {
  ExplainStatus status = ExplainStatus::PreconditionFailed;
  Answer answer = Answer::No;
  std::optional<Explanation> witness;  // Yes: an explanation of size <= k
};

/// Is there an explanation whose De Morgan size is at most k?
DecideResult decide_bounded(const ProblemInstance& inst, std::size_t k,
                            const ExplainOptions& opts = {});

/// Exhaustive oracle: subsets of L by increasing cardinality (preferred
/// polarity first, then lexicographic), each checked against a truth table of
/// psi. Throws BudgetExceeded when |L| > 20 or more than 24 variables are involved.
ExplainResult brute_force_explain(const ProblemInstance& inst);

}  // namespace minexp
