#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "minexp/sat_solver.hpp"

namespace minexp {

/// A family of sets over candidates 0..num_candidates-1. A hitting set picks
/// at least one candidate from every set (equivalently, a set cover where the
/// candidates are the subsets and the sets are the elements).
struct SetSystem {
  std::uint32_t num_candidates = 0;
  std::vector<std::vector<std::uint32_t>> sets;  // each sorted, duplicate-free

  void add(std::vector<std::uint32_t> set);
};

enum class SearchStatus : std::uint8_t {
  Optimal,     // `best` is a minimum hitting set
  Infeasible,  // no hitting set within the allowed candidates and the limit
  Timeout,     // deadline passed; `best` (if any) is the incumbent
};

struct HittingSetOptions {
  /// Candidates that may be picked; empty means all.
  std::vector<bool> allowed;
  /// Only hitting sets of at most this many candidates are of interest.
  std::size_t limit = std::numeric_limits<std::size_t>::max();
  std::optional<Clock::time_point> deadline;
};

struct HittingSetResult {
  SearchStatus status = SearchStatus::Infeasible;
  std::vector<std::uint32_t> best;  // sorted
  std::size_t lower_bound = 0;
  std::uint64_t nodes = 0;
};

/// Exact minimum-cardinality hitting set by branch and bound: greedy upper
/// bound, disjoint-set packing lower bound, branching on the open set with the
/// fewest usable candidates.
HittingSetResult minimum_hitting_set(const SetSystem& sys, const HittingSetOptions& opts = {});

/// The lexicographically least (as a sorted index sequence) hitting set with
/// exactly k candidates. Only meaningful when k is the minimum cardinality.
HittingSetResult lex_first_hitting_set(const SetSystem& sys, std::size_t k,
                                       const HittingSetOptions& opts = {});

/// Greedy maximum-coverage hitting set, lowest index on ties. nullopt when some
/// set has no allowed candidate.
std::optional<std::vector<std::uint32_t>> greedy_hitting_set(const SetSystem& sys,
                                                             const std::vector<bool>& allowed = {});

}  // namespace minexp
