#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "minexp/formula.hpp"
#include "minexp/io.hpp"
#include "minexp/transforms.hpp"
#include "oracles.hpp"

using namespace minexp;

namespace {

Clause cl(std::initializer_list<long long> xs) {
  std::vector<Literal> v;
  for (auto x : xs) v.push_back(Literal::from_dimacs(x));
  return Clause(v);
}

PartialAssignment asg(std::initializer_list<long long> xs) {
  std::vector<Literal> v;
  for (auto x : xs) v.push_back(Literal::from_dimacs(x));
  return PartialAssignment::from_literals(v);
}

Formula parse(std::string_view s) { return parse_formula(s).formula; }

// Truth-table equality over vars 1..n.
bool equivalent(const Formula& a, const Formula& b, Var n) {
  for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << n); ++bits)
    if (oracle::eval_tree(a, bits) != oracle::eval_tree(b, bits)) return false;
  return true;
}

Formula random_tree(std::mt19937_64& rng, Var vars, int depth) {
  std::uniform_int_distribution<int> kind(0, depth <= 0 ? 0 : 3);
  std::uniform_int_distribution<Var> var(1, vars);
  switch (kind(rng)) {
    case 0: return Formula::atom(var(rng));
    case 1: return Formula::negation(random_tree(rng, vars, depth - 1));
    case 2: return Formula::conj(random_tree(rng, vars, depth - 1), random_tree(rng, vars, depth - 1));
    default: return Formula::disj(random_tree(rng, vars, depth - 1), random_tree(rng, vars, depth - 1));
  }
}

}  // namespace

TEST_CASE("literals") {
  auto p = Literal::from_dimacs(3);
  CHECK(p.var() == 3);
  CHECK(p.positive());
  CHECK(~~p == p);
  CHECK((~p).to_dimacs() == -3);
  CHECK(Literal::pos(2) < Literal::neg(2));
  CHECK(Literal::neg(2) < Literal::pos(3));
  CHECK_THROWS_AS(Literal::from_dimacs(0), std::invalid_argument);
}

TEST_CASE("clauses deduplicate and flag tautologies") {
  auto c = cl({2, 1, 2});
  CHECK(c.size() == 2);
  CHECK_FALSE(c.tautological());
  CHECK(cl({1, -1}).tautological());
  CHECK(cl({1, 2}).contains(Literal::pos(2)));
}

TEST_CASE("parse_dimacs") {
  SUBCASE("two clauses") {
    auto f = parse_dimacs("p cnf 2 2\n1 -2 0\n-1 2 0");
    CHECK(f.num_vars == 2);
    REQUIRE(f.clauses.size() == 2);
    CHECK(f.clauses[0] == cl({1, -2}));
    CHECK(f.clauses[1] == cl({-1, 2}));
  }
  SUBCASE("empty formula is valid") {
    auto f = parse_dimacs("p cnf 0 0");
    CHECK(f.clauses.empty());
    CHECK(cnf_valid_after(f, PartialAssignment()));
  }
  SUBCASE("tautological clause kept") {
    auto f = parse_dimacs("p cnf 1 1\n1 -1 0");
    REQUIRE(f.clauses.size() == 1);
    CHECK(f.clauses[0].tautological());
  }
  SUBCASE("comments, duplicates and clauses spanning lines") {
    auto f = parse_dimacs("c hello\np cnf 3 2\n1 1 2\n0 3 0\n");
    CHECK(f.clauses[0] == cl({1, 2}));
    CHECK(f.clauses[1] == cl({3}));
  }
  SUBCASE("errors name the line") {
    auto line_of = [](std::string_view text) {
      try {
        parse_dimacs(text);
      } catch (const ParseError& e) {
        return e.line();
      }
      return std::size_t{0};
    };
    CHECK(line_of("1 2 0\n") == 1);                   // missing header
    CHECK(line_of("p cnf x 1\n1 0\n") == 1);          // malformed header
    CHECK(line_of("p cnf 2 1\n1 3 0\n") == 2);        // literal out of range
    CHECK(line_of("p cnf 2 1\n1 2\n") == 2);          // unterminated
    CHECK(line_of("p cnf 2 2\n1 2 0\n") != 0);        // count mismatch
    CHECK(line_of("p cnf 2 1\np cnf 2 1\n1 0\n") == 2);
  }
}

TEST_CASE("render_dimacs round trip") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 50; ++i) {
    auto f = oracle::random_cnf(6, 8, 4, rng);
    auto text = render_dimacs(f, {"round trip"});
    CHECK(parse_dimacs(text) == f);
  }
  CHECK(render_dimacs(parse_dimacs("p cnf 2 1\n-2 1 0\n")) == "p cnf 2 1\n1 -2 0\n");
}

TEST_CASE("parse_formula") {
  auto a = parse_formula("p & ~q");
  CHECK(a.formula == Formula::conj(Formula::atom(1), Formula::negation(Formula::atom(2))));
  CHECK(a.names.at(1) == "p");
  CHECK(a.names.at(2) == "q");

  auto b = parse("(p | q) & r");
  CHECK(b.kind() == NodeKind::And);
  CHECK(b.left().kind() == NodeKind::Or);
  CHECK(b.right() == Formula::atom(3));

  auto c = parse("~~(p & p)");
  CHECK(c == Formula::negation(Formula::negation(Formula::conj(Formula::atom(1), Formula::atom(1)))));

  // left associativity and precedence
  CHECK(parse("p1 & p2 & p3") ==
        Formula::conj(Formula::conj(Formula::atom(1), Formula::atom(2)), Formula::atom(3)));
  CHECK(parse("p1 | p2 & p3") ==
        Formula::disj(Formula::atom(1), Formula::conj(Formula::atom(2), Formula::atom(3))));
  // named atoms live above explicit indices
  auto d = parse_formula("x | p4");
  CHECK(d.formula == Formula::disj(Formula::atom(5), Formula::atom(4)));
  CHECK(parse("true & false") == Formula::conj(Formula::verum(), Formula::falsum()));

  for (auto bad : {"(p & q", "p & ", "p q", "p & )", "~", "p $ q"}) {
    CHECK_THROWS_AS(parse(bad), ParseError);
  }
  try {
    parse("p &\n  & q");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
    CHECK(e.column() == 3);
  }
}

TEST_CASE("to_string round trip") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 100; ++i) {
    auto f = random_tree(rng, 4, 4);
    CHECK(parse(to_string(f)) == f);
  }
  NameTable names{{1, "p"}};
  CHECK(to_string(parse("p1 & ~p2"), names) == "(p & ~p2)");
}

TEST_CASE("formula_size") {
  CHECK(formula_size(parse("~~(p & p)")) == 5);
  CHECK(formula_size(parse("p")) == 1);
  CHECK(formula_size(parse("p & ~q")) == 4);
  CHECK(formula_size(Formula::verum()) == 0);
  CHECK(atom_occurrences(parse("(p & q) | p")) == 3);
  CHECK(atoms(parse("(p3 & p1) | p3")) == std::vector<Var>{1, 3});
}

TEST_CASE("parse_assignment") {
  auto a = parse_assignment("1 -2");
  CHECK(a.value(1) == Truth::True);
  CHECK(a.value(2) == Truth::False);
  CHECK(a.value(3) == Truth::Unknown);
  CHECK(parse_assignment("").count_assigned() == 0);
  CHECK_THROWS_AS(parse_assignment("3 -3"), InconsistentAssignment);
  CHECK_THROWS_AS(parse_assignment("1 0 2"), ParseError);
  CHECK_THROWS_AS(parse_assignment("1 x"), ParseError);
  CHECK(parse_assignment("c comment\n# other\n2 1\n") == asg({1, 2}));
  CHECK(render_assignment(asg({3, -1})) == "-1 3\n");
}

TEST_CASE("partial_eval") {
  SUBCASE("satisfied clause removed") {
    CnfFormula s(2, {cl({1, 2})});
    auto r = partial_eval(s, asg({1}));
    CHECK(r.simplified.clauses.empty());
    CHECK(r.removed == std::vector<std::size_t>{0});
  }
  SUBCASE("falsified clause reported") {
    CnfFormula s(1, {cl({1})});
    auto r = partial_eval(s, asg({-1}));
    CHECK(r.falsified == std::vector<std::size_t>{0});
  }
  SUBCASE("tautology and satisfied clause") {
    CnfFormula s(3, {cl({1, -1}), cl({2, 3})});
    auto r = partial_eval(s, asg({2}));
    CHECK(r.removed == std::vector<std::size_t>{0, 1});
    CHECK(r.simplified.clauses.empty());
  }
  SUBCASE("surviving clause loses falsified literals") {
    CnfFormula s(3, {cl({1, 2, 3})});
    auto r = partial_eval(s, asg({-2}));
    REQUIRE(r.simplified.clauses.size() == 1);
    CHECK(r.simplified.clauses[0] == cl({1, 3}));
    CHECK(r.kept == std::vector<std::size_t>{0});
  }
  SUBCASE("monotone under extension") {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 200; ++i) {
      auto s = oracle::random_cnf(6, 10, 3, rng);
      auto l = oracle::random_assignment(6, 0.5, rng);
      auto before = partial_eval(s, l);
      auto ext = l;
      for (Var v = 1; v <= 6; ++v)
        if (!ext.assigned(v)) ext.set(v, rng() & 1u);
      auto after = partial_eval(s, ext);
      for (auto id : before.removed)
        CHECK(std::count(after.removed.begin(), after.removed.end(), id) == 1);
      for (auto id : before.falsified)
        CHECK(std::count(after.falsified.begin(), after.falsified.end(), id) == 1);
    }
  }
}

TEST_CASE("cnf_valid_after") {
  CHECK(cnf_valid_after(CnfFormula(3, {cl({1, -1}), cl({2, 3})}), asg({2})));
  CHECK_FALSE(cnf_valid_after(CnfFormula(2, {cl({1, 2})}), PartialAssignment()));
  CHECK_FALSE(cnf_valid_after(CnfFormula(1, {cl({1})}), asg({-1})));

  // total assignments: valid after L iff L satisfies every clause
  std::mt19937_64 rng(5);
  for (int i = 0; i < 300; ++i) {
    auto s = oracle::random_cnf(6, 6, 3, rng);
    std::uint64_t bits = rng() & 63u;
    PartialAssignment l(6);
    for (Var v = 1; v <= 6; ++v) l.set(v, (bits >> (v - 1)) & 1u);
    CHECK(cnf_valid_after(s, l) == oracle::eval_cnf(s, bits));
  }
}

TEST_CASE("eval") {
  CHECK(eval(parse("p & ~q"), asg({1, -2})));
  CHECK_FALSE(eval(parse("p | q"), asg({-1, -2})));
  CHECK(eval(parse("~~(p & p)"), asg({1})));
  CHECK_THROWS_AS(eval(parse("p | q"), asg({1})), IncompleteAssignment);
}

TEST_CASE("tseitin") {
  SUBCASE("atom") {
    auto t = tseitin(Formula::atom(1));
    CHECK(t.cnf.clauses.empty());
    CHECK(t.root == Literal::pos(1));
    CHECK(t.last_aux < t.first_aux);
  }
  SUBCASE("conjunction") {
    auto t = tseitin(parse("p1 & p2"));
    CHECK(t.first_aux == 3);
    CHECK(t.last_aux == 3);
    auto s = t.cnf;
    s.add_clause({t.root});
    std::size_t models = 0;
    for (std::uint64_t b = 0; b < 8; ++b)
      if (oracle::eval_cnf(s, b)) {
        ++models;
        CHECK((b & 3u) == 3u);
      }
    CHECK(models == 1);
  }
  SUBCASE("contradiction") {
    auto t = tseitin(parse("p1 & ~p1"));
    auto s = t.cnf;
    s.add_clause({t.root});
    CHECK_FALSE(oracle::cnf_satisfiable(s));
  }
  SUBCASE("post-order numbering above original vars") {
    auto t = tseitin(parse("~p1 | (p2 & p1)"), 5);
    CHECK(t.first_aux == 6);
    CHECK(t.last_aux == 8);
    CHECK(t.root == Literal::pos(8));
  }
  SUBCASE("equisatisfiable with projected models") {
    std::mt19937_64 rng(9);
    for (int i = 0; i < 100; ++i) {
      auto f = random_tree(rng, 3, 3);
      auto t = tseitin(f, 3);
      auto s = t.cnf;
      s.add_clause({t.root});
      s.num_vars = std::max<Var>(s.num_vars, 3);
      std::set<std::uint64_t> projected;
      for (std::uint64_t b = 0; b < (std::uint64_t{1} << s.num_vars); ++b)
        if (oracle::eval_cnf(s, b)) projected.insert(b & 7u);
      std::set<std::uint64_t> direct;
      for (std::uint64_t b = 0; b < 8; ++b)
        if (oracle::eval_tree(f, b)) direct.insert(b);
      CHECK(projected == direct);
    }
  }
}

TEST_CASE("dm_render") {
  SUBCASE("positive literals only") {
    for (Var n = 1; n <= 5; ++n) {
      std::vector<Literal> chi;
      for (Var v = 1; v <= n; ++v) chi.push_back(Literal::pos(v));
      CHECK(dm_render(chi, Target::Top).size == 2 * n - 1);
    }
  }
  SUBCASE("mixed, positive mode") {
    auto e = dm_render({Literal::pos(1), Literal::neg(2)}, Target::Top);
    CHECK(e.rendered == parse("p1 & ~p2"));
    CHECK(e.size == 4);
  }
  SUBCASE("mixed, negative mode") {
    auto e = dm_render({Literal::neg(2), Literal::pos(1)}, Target::Bottom);
    CHECK(e.rendered == parse("~p1 | p2"));
    CHECK(e.size == 4);
    CHECK(e.chi == std::vector<Literal>{Literal::pos(1), Literal::neg(2)});
  }
  SUBCASE("shapes") {
    CHECK(dm_render({Literal::neg(1), Literal::neg(2), Literal::pos(3)}, Target::Top).rendered ==
          parse("p3 & ~(p1 | p2)"));
    CHECK(dm_render({Literal::pos(1), Literal::pos(2)}, Target::Bottom).rendered == parse("~(p1 & p2)"));
    CHECK(dm_render({Literal::neg(1), Literal::neg(2)}, Target::Bottom).rendered == parse("p1 | p2"));
  }
  SUBCASE("empty and inconsistent") {
    CHECK(dm_render({}, Target::Top).rendered == Formula::verum());
    CHECK(dm_render({}, Target::Bottom).size == 0);
    CHECK_THROWS_AS(dm_render({Literal::pos(1), Literal::neg(1)}, Target::Top), std::invalid_argument);
  }
  SUBCASE("size formula and semantics over 4 vars") {
    // every consistent chi over 4 vars: 3^4 sign patterns
    for (int code = 0; code < 81; ++code) {
      std::vector<Literal> chi;
      int c = code;
      for (Var v = 1; v <= 4; ++v, c /= 3)
        if (c % 3) chi.push_back(Literal(v, c % 3 == 2));
      for (auto mode : {Target::Top, Target::Bottom}) {
        auto e = dm_render(chi, mode);
        CHECK(e.size == formula_size(e.rendered));
        CHECK(e.size == dm_size(chi, mode));
        if (chi.empty()) continue;
        bool negation = std::any_of(chi.begin(), chi.end(), [&](Literal l) {
          return mode == Target::Top ? l.negative() : l.positive();
        });
        CHECK(e.size == 2 * chi.size() - 1 + (negation ? 1 : 0));
        // DM(chi) is equivalent to the conjunction; DM(~chi) to its negation
        for (std::uint64_t b = 0; b < 16; ++b) {
          bool conj = std::all_of(chi.begin(), chi.end(), [&](Literal l) { return oracle::lit_true(l, b); });
          CHECK(oracle::eval_tree(e.rendered, b) == (mode == Target::Top ? conj : !conj));
        }
      }
    }
  }
}

TEST_CASE("dualize") {
  CHECK(dualize(parse("p")) == parse("~p"));
  CHECK(dualize(parse("(p1 & p2) | p3")) == parse("(~p1 | ~p2) & ~p3"));
  std::mt19937_64 rng(13);
  for (int i = 0; i < 200; ++i) {
    auto f = random_tree(rng, 4, 4);
    auto d = dualize(f);
    CHECK(equivalent(Formula::negation(f), d, 4));
    CHECK(equivalent(dualize(d), f, 4));
  }
}

TEST_CASE("clausal_form") {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 200; ++i) {
    auto f = random_tree(rng, 4, 4);
    auto c = clausal_form(f);
    REQUIRE(c.has_value());
    for (std::uint64_t b = 0; b < 16; ++b) CHECK(oracle::eval_cnf(*c, b) == oracle::eval_tree(f, b));
  }
  auto big = parse("(p1 & p2) | (p3 & p4) | (p5 & p6) | (p7 & p8)");
  CHECK_FALSE(clausal_form(big, 8).has_value());
  CHECK(clausal_form(big, 16)->clauses.size() == 16);
}

TEST_CASE("chains") {
  CHECK(conj_chain({}) == Formula::verum());
  CHECK(disj_chain({}) == Formula::falsum());
  CHECK(conj_chain({Formula::atom(1), Formula::atom(2), Formula::atom(3)}) == parse("p1 & p2 & p3"));
}
