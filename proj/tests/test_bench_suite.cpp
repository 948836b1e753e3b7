#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numeric>
#include <random>
#include <sstream>

#include "minexp/bench.hpp"
#include "minexp/io.hpp"
#include "minexp/sat_solver.hpp"
#include "oracles.hpp"

using namespace minexp;

namespace {

std::vector<Var> iota_vars(Var n) {
  std::vector<Var> v(n);
  std::iota(v.begin(), v.end(), Var{1});
  return v;
}

bool satisfies(const CnfFormula& s, const PartialAssignment& a) {
  for (const auto& c : s.clauses)
    if (std::none_of(c.begin(), c.end(), [&](Literal l) { return a.value(l) == Truth::True; })) return false;
  return true;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::string drop_time(const std::string& row) {
  // wall_time_ms is the 9th column
  std::vector<std::string> cols;
  std::stringstream ss(row);
  for (std::string c; std::getline(ss, c, ',');) cols.push_back(c);
  if (cols.size() > 8) cols[8].clear();
  std::string out;
  for (const auto& c : cols) out += c + ",";
  return out;
}

}  // namespace

TEST_CASE("queens encoding") {
  auto one = gen_queens_cnf(1);
  CHECK(one.num_vars == 1);
  CHECK(one.clauses.size() == 1);
  CHECK_THROWS(gen_queens_cnf(0));

  CHECK(gen_queens_cnf(8).clauses.size() == 736);
  CHECK(queen_var(8, 1, 1) == 1);
  CHECK(queen_var(8, 2, 1) == 9);
  CHECK(queen_var(8, 8, 8) == 64);

  auto four = enumerate_models(gen_queens_cnf(4), iota_vars(16));
  REQUIRE(four.size() == 2);
  std::vector<std::vector<std::uint32_t>> rows;
  for (const auto& m : four) {
    std::vector<std::uint32_t> r;
    for (std::uint32_t x = 1; x <= 4; ++x)
      for (std::uint32_t y = 1; y <= 4; ++y)
        if (m.value(queen_var(4, x, y)) == Truth::True) r.push_back(y);
    rows.push_back(r);
  }
  std::sort(rows.begin(), rows.end());
  CHECK(rows[0] == std::vector<std::uint32_t>{2, 4, 1, 3});
  CHECK(rows[1] == std::vector<std::uint32_t>{3, 1, 4, 2});

  for (std::uint32_t n = 1; n <= 6; ++n) {
    auto s = gen_queens_cnf(n);
    std::size_t count = 0;
    for (SatResult r; (r = solve(s)).status == SatStatus::Sat; ++count) {
      std::vector<Literal> block;
      for (Var v = 1; v <= n * n; ++v) block.push_back(Literal(v, r.model.value(v) == Truth::True));
      s.add_clause(block);
    }
    CHECK(count == oracle::queens_count(static_cast<int>(n)));
  }
}

TEST_CASE("domset encoding") {
  Graph path(3);
  path.add_edge(1, 2);
  path.add_edge(2, 3);
  auto s = gen_domset_cnf(path);
  CHECK(s.clauses.size() == 3);
  CHECK(render_dimacs(s) == render_dimacs(domset_cnf(path)));
  std::mt19937_64 rng(3);
  for (int i = 0; i < 30; ++i) {
    auto g = gen_random_planar_graph(2 + static_cast<std::uint32_t>(rng() % 8), rng());
    auto cnf = gen_domset_cnf(g);
    const auto v = g.num_vertices();
    for (std::uint32_t mask = 0; mask < (1u << v); ++mask)
      CHECK(oracle::eval_cnf(cnf, mask) == oracle::dominates(g, mask));
  }
}

TEST_CASE("planar generator") {
  auto g1 = gen_random_planar_graph(1, 7);
  CHECK(g1.num_vertices() == 1);
  CHECK(g1.num_edges() == 0);
  auto g3 = gen_random_planar_graph(3, 7);
  CHECK(g3.num_edges() <= 3);
  CHECK(g3.connected());
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    for (std::uint32_t v : {5u, 12u, 50u}) {
      auto g = gen_random_planar_graph(v, seed);
      CHECK(g.num_vertices() == v);
      CHECK(g.connected());
      CHECK(g.num_edges() <= 3 * v - 6);
      CHECK(g.num_edges() >= v - 1);
      CHECK(g.edges() == gen_random_planar_graph(v, seed).edges());
    }
  }
  CHECK(gen_random_planar_graph(50, 1).edges() != gen_random_planar_graph(50, 2).edges());
  CHECK(gen_random_planar_graph(40, 3, 1.0).num_edges() == 40);
}

TEST_CASE("sample_solution") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto s = gen_queens_cnf(8);
    auto a = sample_solution(s, seed);
    CHECK(a.total_over(64));
    CHECK(satisfies(s, a));
    CHECK(a == sample_solution(s, seed));
  }
  CHECK(satisfies(gen_queens_cnf(1), sample_solution(gen_queens_cnf(1), 0)));
  CHECK_THROWS_AS(sample_solution(gen_queens_cnf(3), 0), Unsatisfiable);
}

TEST_CASE("perturbations") {
  CHECK_THROWS(perturb_queens(sample_solution(gen_queens_cnf(1), 0), 1, 0));
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const std::uint32_t n = 6 + static_cast<std::uint32_t>(seed % 4);
    auto s = gen_queens_cnf(n);
    auto sol = sample_solution(s, seed);
    auto p = perturb_queens(sol, n, seed);
    CHECK(p.total_over(n * n));
    CHECK_FALSE(satisfies(s, p));
    // exactly one queen moved within its column
    std::size_t diff = 0;
    for (Var v = 1; v <= n * n; ++v) diff += sol.value(v) != p.value(v);
    CHECK(diff == 2);
    ProblemInstance inst{p, s, Target::Bottom, std::nullopt};
    CHECK(check_precondition(inst));
    CHECK(perturb(Family::Queens, Target::Top, sol, n, seed) == sol);
  }
  auto ds = PartialAssignment::all_true(5);
  CHECK(perturb(Family::Domset, Target::Top, ds, 5, 1) == PartialAssignment::all_true(5));
  auto d = perturb_domset(ds, 4);
  CHECK(d.total_over(5));
  std::size_t falses = 0;
  for (Var v = 1; v <= 5; ++v) falses += d.value(v) == Truth::False;
  CHECK(falses == 1);
}

TEST_CASE("experiment config") {
  auto cfg = parse_experiment_config(
      R"({"family":"queens","sizes":[8,10],"instances_per_size":3,"mode":"negative",)"
      R"("seed":5,"timeout":2,"output_path":"out.csv"})");
  CHECK(cfg.family == Family::Queens);
  CHECK(cfg.sizes == std::vector<std::uint32_t>{8, 10});
  CHECK(cfg.instances_per_size == 3);
  CHECK(cfg.mode == Target::Bottom);
  CHECK(cfg.seed == 5);
  CHECK(cfg.timeout == std::chrono::seconds(2));
  CHECK(cfg.output_path == "out.csv");

  CHECK(parse_experiment_config(R"({"family":"domset","sizes":[4],"mode":"positive"})").mode == Target::Top);
  CHECK_THROWS_AS(parse_experiment_config(R"({"family":"queens","sizes":[]})"), ConfigError);
  CHECK_THROWS_AS(parse_experiment_config(R"({"family":"queens","sizes":[8,8]})"), ConfigError);
  CHECK_THROWS_AS(parse_experiment_config(R"({"family":"queens","sizes":[10,8]})"), ConfigError);
  CHECK_THROWS_AS(parse_experiment_config(R"({"family":"queens","sizes":[0]})"), ConfigError);
  CHECK_THROWS_AS(parse_experiment_config(R"({"family":"rooks","sizes":[4]})"), ConfigError);
  CHECK_THROWS_AS(parse_experiment_config(R"({"family":"queens","sizes":[4],"mode":"both"})"), ConfigError);
  CHECK_THROWS_AS(parse_experiment_config("{"), ConfigError);
  CHECK_THROWS_AS(parse_experiment_config("[]"), ConfigError);
}

TEST_CASE("instance seeds and determinism") {
  CHECK(instance_seed(1, 8, 0) != instance_seed(1, 8, 1));
  CHECK(instance_seed(1, 8, 0) != instance_seed(1, 10, 0));
  CHECK(instance_seed(1, 8, 0) != instance_seed(2, 8, 0));
  ExperimentConfig cfg;
  cfg.family = Family::Domset;
  cfg.sizes = {12};
  cfg.seed = 9;
  for (auto mode : {Target::Top, Target::Bottom}) {
    cfg.mode = mode;
    for (std::size_t id = 0; id < 4; ++id) {
      auto a = make_instance(cfg, 12, id), b = make_instance(cfg, 12, id);
      CHECK(a.seed == b.seed);
      CHECK(a.graph->edges() == b.graph->edges());
      CHECK(a.problem.assignment == b.problem.assignment);
      CHECK(render_dimacs(std::get<CnfFormula>(a.problem.psi)) == render_dimacs(std::get<CnfFormula>(b.problem.psi)));
    }
  }
}

TEST_CASE("queens negative experiment") {
  ExperimentConfig cfg;
  cfg.family = Family::Queens;
  cfg.sizes = {8};
  cfg.instances_per_size = 10;
  cfg.mode = Target::Bottom;
  cfg.seed = 1;
  cfg.timeout = std::chrono::seconds(60);
  auto res = run_experiment(cfg);
  REQUIRE(res.rows.size() == 10);
  for (std::size_t i = 0; i < 10; ++i) {
    const auto& r = res.rows[i];
    CHECK(r.instance_id == i);
    CHECK(r.precondition_ok);
    CHECK(r.status == "ok");
    REQUIRE(r.cardinality);
    CHECK(*r.cardinality >= 1);
    CHECK(*r.cardinality <= 2);
  }
  auto csv = lines(to_csv(res));
  REQUIRE(csv.size() == 12);
  CHECK(csv[0] == kCsvHeader);
  CHECK(csv[11].rfind("queens,8,avg,,negative,10/10,", 0) == 0);
  CHECK(csv[11].find("avg_of_10_ok") != std::string::npos);
}

TEST_CASE("domset positive experiment matches the domination number") {
  ExperimentConfig cfg;
  cfg.family = Family::Domset;
  cfg.sizes = {6, 10};
  cfg.instances_per_size = 4;
  cfg.mode = Target::Top;
  cfg.seed = 3;
  auto res = run_experiment(cfg);
  REQUIRE(res.rows.size() == 8);
  for (const auto& r : res.rows) {
    REQUIRE(r.status == "ok");
    auto inst = make_instance(cfg, r.size, r.instance_id);
    CHECK(*r.cardinality == oracle::gamma(*inst.graph));
    CHECK(*r.dm_size == 2 * *r.cardinality - 1);
  }
}

TEST_CASE("thread count does not change results") {
  ExperimentConfig cfg;
  cfg.family = Family::Domset;
  cfg.sizes = {8, 12};
  cfg.instances_per_size = 5;
  cfg.mode = Target::Bottom;
  cfg.seed = 11;
  auto one = lines(to_csv(run_experiment(cfg)));
  cfg.threads = 4;
  auto four = lines(to_csv(run_experiment(cfg)));
  REQUIRE(one.size() == four.size());
  for (std::size_t i = 0; i < one.size(); ++i) CHECK(drop_time(one[i]) == drop_time(four[i]));
}
