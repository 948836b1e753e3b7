#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "minexp/explain.hpp"
#include "minexp/formula.hpp"
#include "minexp/reductions.hpp"

namespace minexp {

/// queen(x, y) for column x and row y, both in 1..n.
inline Var queen_var(std::uint32_t n, std::uint32_t x, std::uint32_t y) { return (x - 1) * n + y; }

/// n-queens clauses: a row choice per column, at most one queen per column,
/// at most one per row, and both diagonal families. Throws on n = 0.
CnfFormula gen_queens_cnf(std::uint32_t n);

/// Same clause set as domset_cnf: in(v) is variable v.
CnfFormula gen_domset_cnf(const Graph& g);

/// Connected planar graph on v vertices, deterministic per seed. Vertices are
/// distinct grid points; edges are inserted shortest first unless they cross
/// an existing edge or pass through a point, then random edges are deleted
/// (keeping the graph connected) until about `edges_per_vertex * v` remain.
Graph gen_random_planar_graph(std::uint32_t v, std::uint64_t seed, double edges_per_vertex = 2.0);

class Unsatisfiable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A satisfying total assignment over 1..num_vars found with randomized
/// phases. Throws Unsatisfiable.
PartialAssignment sample_solution(const CnfFormula& s, std::uint64_t seed);

enum class Family : std::uint8_t { Queens, Domset };
const char* to_string(Family f);

/// Moves the queen of a random column to a different random row. The result
/// is total and falsifies the queens clauses. Throws on n < 2.
PartialAssignment perturb_queens(const PartialAssignment& solution, std::uint32_t n, std::uint64_t seed);
/// Flips the in-atom of one random member of the set to false.
PartialAssignment perturb_domset(const PartialAssignment& dominating_set, std::uint64_t seed);

/// Dispatch on (family, mode): Top keeps the domset all-true literal set (the
/// queens solution is returned unchanged); Bottom perturbs.
PartialAssignment perturb(Family family, Target mode, const PartialAssignment& solution,
                          std::uint32_t size, std::uint64_t seed);

struct ExperimentConfig {
  Family family = Family::Queens;
  std::vector<std::uint32_t> sizes;
  std::size_t instances_per_size = 10;
  Target mode = Target::Bottom;
  std::uint64_t seed = 0;
  std::chrono::milliseconds timeout{300'000};
  std::string output_path;
  unsigned threads = 1;
  double edges_per_vertex = 2.0;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// JSON object with keys family, sizes, instances_per_size, mode
/// ("positive" | "negative"), seed, timeout (seconds), output_path and the
/// optional threads and edges_per_vertex. Throws ConfigError.
ExperimentConfig parse_experiment_config(const std::string& json_text);
void validate(const ExperimentConfig& cfg);

/// A generated benchmark instance.
struct BenchInstance {
  std::uint32_t size = 0;
  std::size_t id = 0;
  std::uint64_t seed = 0;
  ProblemInstance problem;
  std::optional<Graph> graph;  // domset only
};

/// Seed of instance `id` of a size: a hash of (cfg.seed, size, id).
std::uint64_t instance_seed(std::uint64_t base, std::uint32_t size, std::size_t id);

/// Builds one instance. Negative instances whose precondition fails are
/// resampled a bounded number of times. Throws Unsatisfiable when the family
/// has no solution at that size.
BenchInstance make_instance(const ExperimentConfig& cfg, std::uint32_t size, std::size_t id);

struct ExperimentRow {
  std::uint32_t size = 0;
  std::size_t instance_id = 0;
  std::uint64_t seed = 0;
  bool precondition_ok = false;
  std::optional<std::size_t> cardinality;
  std::optional<std::size_t> dm_size;
  double wall_time_ms = 0;
  std::string status;
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<ExperimentRow> rows;  // ordered by (size, instance_id)
};

/// Generates and solves every instance; a per-instance timeout is recorded
/// in the status column and the run continues. Only the explain phase is timed.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// Header, one line per row, then one `avg` line per size (means over rows
/// with status ok).
std::string to_csv(const ExperimentResult& result);

inline constexpr const char* kCsvHeader =
    "family,size,instance_id,seed,mode,precondition_ok,explanation_cardinality,dm_size,wall_time_ms,status";

}  // namespace minexp
