#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "minexp/formula.hpp"

namespace minexp {

using Clock = std::chrono::steady_clock;

enum class SatStatus : std::uint8_t { Sat, Unsat, Unknown };

struct SatResult {
  SatStatus status = SatStatus::Unknown;
  PartialAssignment model;    // Sat: total over the solver's variables
  std::vector<Literal> core;  // Unsat: subset of the assumptions, sorted
};

struct SolverOptions {
  std::uint64_t seed = 0;
  /// Random initial phases and activity jitter drawn from `seed`.
  bool randomize = false;
  /// Solving stops with SatStatus::Unknown once this passes.
  std::optional<Clock::time_point> deadline;
};

struct SolverStats {
  std::uint64_t conflicts = 0;
  std::uint64_t decisions = 0;
  std::uint64_t propagations = 0;
  std::uint64_t restarts = 0;
};

/// CDCL solver over a fixed clause set. solve() may be called repeatedly with
/// different assumptions; learnt clauses are kept between calls.
class SatSolver {
 public:
  explicit SatSolver(const CnfFormula& f, SolverOptions opts = {});

  SatResult solve(const std::vector<Literal>& assumptions = {});

  Var num_vars() const { return num_vars_; }
  const SolverStats& stats() const { return stats_; }

 private:
  using Lit = std::uint32_t;  // 2*var + sign
  using CRef = std::uint32_t;
  static constexpr CRef kNoReason = 0xffffffffu;
  static constexpr std::int8_t kUndef = 0, kTrue = 1, kFalse = -1;

  struct ClauseData {
    std::vector<Lit> lits;
    double activity = 0;
    bool learnt = false;
    bool deleted = false;
  };
  struct Watcher {
    CRef cref;
    Lit blocker;
  };

  static Lit to_lit(Literal l) { return 2 * l.var() + (l.negative() ? 1u : 0u); }
  static Literal from_lit(Lit l) { return Literal(l >> 1, l & 1u); }
  static Var var_of(Lit l) { return l >> 1; }

  std::int8_t value(Lit l) const {
    std::int8_t v = assigns_[var_of(l)];
    return (l & 1u) ? static_cast<std::int8_t>(-v) : v;
  }
  int decision_level() const { return static_cast<int>(trail_lim_.size()); }

  void ensure_vars(Var n);
  bool add_input_clause(const Clause& c);
  void attach(CRef cr);
  void enqueue(Lit l, CRef reason);
  CRef propagate();
  void analyze(CRef conflict, std::vector<Lit>& learnt, int& backtrack_level);
  bool redundant(Lit l, std::uint32_t abstract_levels);
  std::vector<Literal> analyze_final(Lit failed);
  void backtrack(int level);
  Lit pick_branch();
  void bump_var(Var v);
  void bump_clause(ClauseData& c);
  void reduce_learnts();
  bool locked(CRef cr) const;
  SatStatus search(std::uint64_t conflict_budget, const std::vector<Lit>& assumptions,
                   std::vector<Literal>& core);
  bool out_of_time();

  // variable-order heap keyed on activity, lowest index on ties
  bool heap_before(Var a, Var b) const {
    return activity_[a] > activity_[b] || (activity_[a] == activity_[b] && a < b);
  }
  void heap_insert(Var v);
  Var heap_pop();
  void heap_up(std::size_t i);
  void heap_down(std::size_t i);

  SolverOptions opts_;
  Var num_vars_ = 0;
  bool inconsistent_ = false;

  std::vector<ClauseData> clauses_;
  std::vector<CRef> learnts_;
  std::vector<std::vector<Watcher>> watches_;

  std::vector<std::int8_t> assigns_;
  std::vector<bool> phase_;
  std::vector<int> level_;
  std::vector<CRef> reason_;
  std::vector<Lit> trail_;
  std::vector<std::size_t> trail_lim_;
  std::size_t qhead_ = 0;

  std::vector<double> activity_;
  double var_inc_ = 1.0;
  double clause_inc_ = 1.0;
  std::vector<Var> heap_;
  std::vector<int> heap_index_;  // -1 when not in heap

  std::vector<char> seen_;
  std::vector<Lit> analyze_stack_;
  std::vector<Lit> analyze_toclear_;
  double max_learnts_ = 0;

  SolverStats stats_;
};

/// One-shot convenience wrapper.
SatResult solve(const CnfFormula& f, const std::vector<Literal>& assumptions = {},
                SolverOptions opts = {});

class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Every satisfying total assignment over `vars` (which must cover every
/// variable occurring in f), in lexicographic order with the first variable
/// most significant and false < true. Throws BudgetExceeded above 24 variables.
std::vector<PartialAssignment> enumerate_models(const CnfFormula& f, std::vector<Var> vars);

/// Luby restart sequence 1,1,2,1,1,2,4,... (i is 0-based).
std::uint64_t luby(std::uint64_t i);

}  // namespace minexp
