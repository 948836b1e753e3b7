#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numeric>
#include <random>

#include "minexp/bench.hpp"
#include "minexp/hitting_set.hpp"
#include "minexp/sat_solver.hpp"
#include "oracles.hpp"

using namespace minexp;

namespace {

Clause cl(std::initializer_list<long long> xs) {
  std::vector<Literal> v;
  for (auto x : xs) v.push_back(Literal::from_dimacs(x));
  return Clause(v);
}

bool model_ok(const CnfFormula& s, const PartialAssignment& m) {
  for (const auto& c : s.clauses) {
    bool sat = false;
    for (auto l : c) sat = sat || m.value(l) == Truth::True;
    if (!sat) return false;
  }
  return true;
}

std::vector<Literal> random_assumptions(Var vars, std::mt19937_64& rng) {
  std::vector<Literal> a;
  for (Var v = 1; v <= vars; ++v)
    if (rng() % 3 == 0) a.push_back(Literal(v, rng() & 1u));
  return a;
}

}  // namespace

TEST_CASE("solve examples") {
  auto r = solve(CnfFormula(1, {cl({1})}));
  CHECK(r.status == SatStatus::Sat);
  CHECK(r.model.value(1) == Truth::True);

  r = solve(CnfFormula(2, {cl({1, 2})}), {Literal::neg(1), Literal::neg(2)});
  CHECK(r.status == SatStatus::Unsat);
  for (auto l : r.core) CHECK((l == Literal::neg(1) || l == Literal::neg(2)));

  r = solve(CnfFormula(1, {cl({1}), cl({-1})}));
  CHECK(r.status == SatStatus::Unsat);
  CHECK(r.core.empty());

  r = solve(CnfFormula(0, {}));
  CHECK(r.status == SatStatus::Sat);

  CnfFormula empty_clause;
  empty_clause.clauses.push_back(Clause());
  CHECK(solve(empty_clause).status == SatStatus::Unsat);
}

TEST_CASE("agreement with truth tables on random CNFs") {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 500; ++i) {
    Var vars = 1 + static_cast<Var>(rng() % 10);
    auto s = oracle::random_cnf(vars, 1 + rng() % 20, 3, rng);
    auto r = solve(s);
    REQUIRE(r.status != SatStatus::Unknown);
    CHECK((r.status == SatStatus::Sat) == oracle::cnf_satisfiable(s));
    if (r.status == SatStatus::Sat) CHECK(model_ok(s, r.model));
  }
}

TEST_CASE("assumptions: models, core soundness, monotonicity") {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 400; ++i) {
    Var vars = 3 + static_cast<Var>(rng() % 8);
    auto s = oracle::random_cnf(vars, 2 + rng() % 20, 3, rng);
    auto a = random_assumptions(vars, rng);
    SatSolver solver(s);
    auto r = solver.solve(a);
    // the oracle: s plus unit clauses for the assumptions
    CnfFormula with_units = s;
    for (auto l : a) with_units.add_clause({l});
    CHECK((r.status == SatStatus::Sat) == oracle::cnf_satisfiable(with_units));
    if (r.status == SatStatus::Sat) {
      CHECK(model_ok(s, r.model));
      for (auto l : a) CHECK(r.model.value(l) == Truth::True);
      continue;
    }
    for (auto l : r.core) CHECK(std::find(a.begin(), a.end(), l) != a.end());
    CHECK(solver.solve(r.core).status == SatStatus::Unsat);
    CHECK(solve(s, r.core).status == SatStatus::Unsat);
    auto bigger = a;
    for (Var v = 1; v <= vars; ++v)
      if (std::none_of(a.begin(), a.end(), [&](Literal l) { return l.var() == v; }) && (rng() & 1u))
        bigger.push_back(Literal(v, rng() & 1u));
    CHECK(solve(s, bigger).status == SatStatus::Unsat);
  }
}

TEST_CASE("incremental use keeps answers correct") {
  std::mt19937_64 rng(4);
  auto s = oracle::random_cnf(12, 40, 3, rng);
  SatSolver solver(s);
  for (int i = 0; i < 200; ++i) {
    auto a = random_assumptions(12, rng);
    CnfFormula with_units = s;
    for (auto l : a) with_units.add_clause({l});
    CHECK((solver.solve(a).status == SatStatus::Sat) == oracle::cnf_satisfiable(with_units));
  }
}

TEST_CASE("determinism") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 50; ++i) {
    auto s = oracle::random_cnf(15, 50, 3, rng);
    auto a = random_assumptions(15, rng);
    for (bool randomize : {false, true}) {
      SolverOptions o;
      o.seed = 99;
      o.randomize = randomize;
      auto r1 = solve(s, a, o), r2 = solve(s, a, o);
      CHECK(r1.status == r2.status);
      CHECK(r1.model == r2.model);
      CHECK(r1.core == r2.core);
    }
  }
}

TEST_CASE("harder instances: queens") {
  for (std::uint32_t n : {8u, 12u, 20u}) {
    auto s = gen_queens_cnf(n);
    auto r = solve(s);
    REQUIRE(r.status == SatStatus::Sat);
    CHECK(model_ok(s, r.model));
  }
  // pigeonhole 7 into 6 is unsatisfiable
  CnfFormula php;
  auto x = [](Var p, Var h) { return (p - 1) * 6 + h; };
  for (Var p = 1; p <= 7; ++p) {
    std::vector<Literal> c;
    for (Var h = 1; h <= 6; ++h) c.push_back(Literal::pos(x(p, h)));
    php.add_clause(c);
  }
  for (Var h = 1; h <= 6; ++h)
    for (Var p = 1; p <= 7; ++p)
      for (Var q = p + 1; q <= 7; ++q) php.add_clause({Literal::neg(x(p, h)), Literal::neg(x(q, h))});
  CHECK(solve(php).status == SatStatus::Unsat);
}

TEST_CASE("deadline yields unknown") {
  CnfFormula php;
  auto x = [](Var p, Var h) { return (p - 1) * 11 + h; };
  for (Var p = 1; p <= 12; ++p) {
    std::vector<Literal> c;
    for (Var h = 1; h <= 11; ++h) c.push_back(Literal::pos(x(p, h)));
    php.add_clause(c);
  }
  for (Var h = 1; h <= 11; ++h)
    for (Var p = 1; p <= 12; ++p)
      for (Var q = p + 1; q <= 12; ++q) php.add_clause({Literal::neg(x(p, h)), Literal::neg(x(q, h))});
  SolverOptions o;
  o.deadline = Clock::now() + std::chrono::milliseconds(50);
  CHECK(solve(php, {}, o).status == SatStatus::Unknown);
}

TEST_CASE("enumerate_models") {
  CHECK(enumerate_models(CnfFormula(2, {cl({1, 2})}), {1, 2}).size() == 3);
  CHECK(enumerate_models(CnfFormula(1, {}), {1}).size() == 2);
  CHECK(enumerate_models(CnfFormula(1, {cl({1}), cl({-1})}), {1}).empty());

  auto models = enumerate_models(CnfFormula(2, {cl({1, 2})}), {1, 2});
  CHECK(models[0].literals() == std::vector<Literal>{Literal::neg(1), Literal::pos(2)});
  CHECK(models[2].literals() == std::vector<Literal>{Literal::pos(1), Literal::pos(2)});

  std::vector<Var> many(25);
  std::iota(many.begin(), many.end(), Var{1});
  CHECK_THROWS_AS(enumerate_models(CnfFormula(25, {}), many), BudgetExceeded);

  std::mt19937_64 rng(6);
  for (int i = 0; i < 100; ++i) {
    auto s = oracle::random_cnf(7, 8, 3, rng);
    CHECK(enumerate_models(s, {1, 2, 3, 4, 5, 6, 7}).size() == oracle::count_models(s));
  }
}

TEST_CASE("luby") {
  std::vector<std::uint64_t> expect{1, 1, 2, 1, 1, 2, 4, 1, 1, 2, 1, 1, 2, 4, 8};
  for (std::size_t i = 0; i < expect.size(); ++i) CHECK(luby(i) == expect[i]);
}

// --- hitting sets ------------------------------------------------------------

namespace {

std::size_t brute_min_hitting(const SetSystem& sys, std::vector<std::uint32_t>* lex_first) {
  const auto n = sys.num_candidates;
  for (std::size_t k = 0; k <= n; ++k) {
    std::vector<bool> mask(n, false);
    std::fill(mask.begin(), mask.begin() + static_cast<std::ptrdiff_t>(k), true);
    do {
      bool ok = std::all_of(sys.sets.begin(), sys.sets.end(), [&](const auto& s) {
        return std::any_of(s.begin(), s.end(), [&](std::uint32_t c) { return mask[c]; });
      });
      if (!ok) continue;
      if (lex_first) {
        lex_first->clear();
        for (std::uint32_t c = 0; c < n; ++c)
          if (mask[c]) lex_first->push_back(c);
      }
      return k;
    } while (std::prev_permutation(mask.begin(), mask.end()));
  }
  return n + 1;
}

}  // namespace

TEST_CASE("minimum and lex-first hitting sets match brute force") {
  std::mt19937_64 rng(8);
  for (int i = 0; i < 300; ++i) {
    SetSystem sys;
    const std::uint32_t n = 2 + static_cast<std::uint32_t>(rng() % 11);
    sys.num_candidates = n;
    for (std::size_t j = 1 + rng() % 12; j > 0; --j) {
      std::vector<std::uint32_t> s;
      for (std::size_t len = 1 + rng() % 4; len > 0; --len) s.push_back(static_cast<std::uint32_t>(rng() % n));
      sys.add(s);
    }
    std::vector<std::uint32_t> expect;
    auto k = brute_min_hitting(sys, &expect);
    auto r = minimum_hitting_set(sys);
    REQUIRE(r.status == SearchStatus::Optimal);
    CHECK(r.best.size() == k);
    for (const auto& s : sys.sets)
      CHECK(std::any_of(s.begin(), s.end(), [&](auto c) {
        return std::binary_search(r.best.begin(), r.best.end(), c);
      }));
    auto lex = lex_first_hitting_set(sys, k);
    REQUIRE(lex.status == SearchStatus::Optimal);
    CHECK(lex.best == expect);

    HittingSetOptions tight;
    tight.limit = k == 0 ? 0 : k - 1;
    if (k > 0) CHECK(minimum_hitting_set(sys, tight).status == SearchStatus::Infeasible);
  }
}

TEST_CASE("hitting set edge cases") {
  SetSystem none;
  auto r = minimum_hitting_set(none);
  CHECK(r.status == SearchStatus::Optimal);
  CHECK(r.best.empty());

  SetSystem sys;
  sys.add({0, 1});
  sys.add({1, 2});
  HittingSetOptions only0;
  only0.allowed = {true, false, false};
  CHECK(minimum_hitting_set(sys, only0).status == SearchStatus::Infeasible);
  CHECK(minimum_hitting_set(sys).best == std::vector<std::uint32_t>{1});
  CHECK(greedy_hitting_set(sys).value() == std::vector<std::uint32_t>{1});
}
