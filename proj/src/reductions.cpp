#include "minexp/reductions.hpp"

#include <algorithm>
#include <charconv>
#include <numeric>
#include <set>
#include <sstream>

#include "minexp/io.hpp"
#include "minexp/sat_solver.hpp"

namespace minexp {

// --- 2QBF -----------------------------------------------------------------

Qbf2Instance parse_qbf2(std::string_view text) {
  Qbf2Instance q;
  std::string matrix;
  std::size_t lineno = 0, start = 0, matrix_line = 0;
  std::set<Var> seen;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string line(text.substr(start, end - start));
    start = end + 1;
    ++lineno;
    std::istringstream ls(line);
    std::string head;
    if (!(ls >> head)) continue;
    if (matrix.empty() && head == "c") continue;
    if (matrix.empty() && (head == "e" || head == "a")) {
      auto& dst = head == "e" ? q.exist_vars : q.univ_vars;
      long long v = 0;
      bool terminated = false;
      std::string tok;
      while (ls >> tok) {
        auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (ec != std::errc() || p != tok.data() + tok.size() || v < 0)
          throw ParseError("invalid prefix variable '" + tok + "'", lineno);
        if (v == 0) {
          terminated = true;
          break;
        }
        if (!seen.insert(static_cast<Var>(v)).second)
          throw ParseError("variable " + tok + " quantified twice", lineno);
        dst.push_back(static_cast<Var>(v));
      }
      if (!terminated) throw ParseError("prefix line must end with 0", lineno);
      continue;
    }
    if (matrix.empty()) matrix_line = lineno;
    matrix += line + "\n";
  }
  if (matrix.empty()) throw ParseError("missing matrix formula", lineno);
  try {
    auto parsed = parse_formula(matrix);
    if (!parsed.names.empty())
      throw ParseError("matrix atoms must be written p<index>", matrix_line);
    q.matrix = parsed.formula;
  } catch (const ParseError& e) {
    throw ParseError(e.what(), matrix_line + e.line() - 1, e.column());
  }
  for (auto v : atoms(q.matrix))
    if (!seen.count(v))
      throw ParseError("matrix atom p" + std::to_string(v) + " is not quantified", matrix_line);
  return q;
}

std::string render_qbf2(const Qbf2Instance& q) {
  std::string out = "e";
  for (auto v : q.exist_vars) out += " " + std::to_string(v);
  out += " 0\na";
  for (auto v : q.univ_vars) out += " " + std::to_string(v);
  out += " 0\n" + to_string(q.matrix) + "\n";
  return out;
}

bool qbf2_eval(const Qbf2Instance& q) {
  const std::size_t n = q.exist_vars.size(), m = q.univ_vars.size();
  if (n + m > 20) throw BudgetExceeded("2QBF brute force limited to n + m <= 20");
  Var top = 0;
  for (auto v : q.exist_vars) top = std::max(top, v);
  for (auto v : q.univ_vars) top = std::max(top, v);
  PartialAssignment s(std::max(top, max_var(q.matrix)));
  for (std::uint64_t e = 0; e < (std::uint64_t{1} << n); ++e) {
    for (std::size_t i = 0; i < n; ++i) s.set(q.exist_vars[i], (e >> i) & 1u);
    bool all = true;
    for (std::uint64_t u = 0; u < (std::uint64_t{1} << m) && all; ++u) {
      for (std::size_t j = 0; j < m; ++j) s.set(q.univ_vars[j], (u >> j) & 1u);
      all = eval(q.matrix, s);
    }
    if (all) return true;
  }
  return false;
}

Sigma2Reduction sigma2_to_explainability(const Qbf2Instance& q) {
  const std::size_t n = q.exist_vars.size();
  Var base = static_cast<Var>(n + q.univ_vars.size());
  for (auto v : q.exist_vars) base = std::max(base, v);
  for (auto v : q.univ_vars) base = std::max(base, v);
  base = std::max(base, max_var(q.matrix));

  Sigma2Reduction r;
  std::vector<Formula> choices, both;
  for (std::size_t i = 0; i < n; ++i) {
    Var p = q.exist_vars[i];
    Var bar = base + static_cast<Var>(i) + 1;
    r.complement_vars.push_back(bar);
    choices.push_back(Formula::disj(Formula::atom(p), Formula::atom(bar)));
    both.push_back(Formula::conj(Formula::atom(p), Formula::atom(bar)));
  }
  Formula psi = q.matrix;
  if (n > 0)
    psi = Formula::conj(conj_chain(choices), Formula::disj(q.matrix, disj_chain(both)));

  Var top = base + static_cast<Var>(n);
  PartialAssignment all(top);
  for (auto v : q.exist_vars) all.set(v, true);
  for (auto v : q.univ_vars) all.set(v, true);
  for (auto v : r.complement_vars) all.set(v, true);

  r.instance = ProblemInstance{all, psi, Target::Top, std::nullopt};
  r.k = n == 0 ? 0 : 2 * n - 1;
  r.instance.bound = r.k;
  return r;
}

// --- graphs ---------------------------------------------------------------

bool Graph::add_edge(std::uint32_t u, std::uint32_t v) {
  if (u == v) throw std::invalid_argument("self-loop on vertex " + std::to_string(u));
  if (u == 0 || v == 0 || u > num_vertices() || v > num_vertices())
    throw std::invalid_argument("edge endpoint out of range");
  auto& au = adj_[u];
  auto it = std::lower_bound(au.begin(), au.end(), v);
  if (it != au.end() && *it == v) return false;
  au.insert(it, v);
  auto& av = adj_[v];
  av.insert(std::lower_bound(av.begin(), av.end(), u), u);
  return true;
}

bool Graph::remove_edge(std::uint32_t u, std::uint32_t v) {
  if (!has_edge(u, v)) return false;
  adj_[u].erase(std::lower_bound(adj_[u].begin(), adj_[u].end(), v));
  adj_[v].erase(std::lower_bound(adj_[v].begin(), adj_[v].end(), u));
  return true;
}

bool Graph::has_edge(std::uint32_t u, std::uint32_t v) const {
  if (u == 0 || u > num_vertices()) return false;
  return std::binary_search(adj_[u].begin(), adj_[u].end(), v);
}

std::vector<std::pair<std::uint32_t, std::uint32_t>> Graph::edges() const {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> out;
  for (std::uint32_t u = 1; u <= num_vertices(); ++u)
    for (auto v : adj_[u])
      if (u < v) out.emplace_back(u, v);
  return out;
}

std::size_t Graph::num_edges() const {
  std::size_t d = 0;
  for (const auto& a : adj_) d += a.size();
  return d / 2;
}

bool Graph::connected() const {
  const auto n = num_vertices();
  if (n <= 1) return true;
  std::vector<char> seen(n + 1, 0);
  std::vector<std::uint32_t> stack{1};
  seen[1] = 1;
  std::size_t reached = 1;
  while (!stack.empty()) {
    auto u = stack.back();
    stack.pop_back();
    for (auto v : adj_[u])
      if (!seen[v]) {
        seen[v] = 1;
        ++reached;
        stack.push_back(v);
      }
  }
  return reached == n;
}

Graph parse_edge_list(std::string_view text) {
  std::vector<std::pair<long long, long long>> edges;
  long long declared = 0, top = 0;
  std::size_t lineno = 0, start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::istringstream ls{std::string(text.substr(start, end - start))};
    start = end + 1;
    ++lineno;
    std::string a;
    if (!(ls >> a) || a[0] == 'c' || a[0] == '#') continue;
    if (a == "n") {
      if (!(ls >> declared) || declared < 0) throw ParseError("malformed 'n <count>' line", lineno);
      top = std::max(top, declared);
      continue;
    }
    long long u = 0, v = 0;
    std::string extra;
    std::istringstream first(a);
    if (!(first >> u) || !first.eof() || !(ls >> v) || (ls >> extra))
      throw ParseError("expected '<u> <v>'", lineno);
    if (u <= 0 || v <= 0) throw ParseError("vertex ids must be positive", lineno);
    if (u == v) throw ParseError("self-loop on vertex " + std::to_string(u), lineno);
    edges.emplace_back(u, v);
    top = std::max({top, u, v});
  }
  Graph g(static_cast<std::uint32_t>(top));
  for (auto [u, v] : edges) g.add_edge(static_cast<std::uint32_t>(u), static_cast<std::uint32_t>(v));
  return g;
}

std::string render_edge_list(const Graph& g) {
  std::string out = "n " + std::to_string(g.num_vertices()) + "\n";
  for (auto [u, v] : g.edges()) out += std::to_string(u) + " " + std::to_string(v) + "\n";
  return out;
}

bool is_dominating_set(const Graph& g, const std::vector<std::uint32_t>& set) {
  std::vector<char> dom(g.num_vertices() + 1, 0);
  for (auto v : set) {
    if (v == 0 || v > g.num_vertices()) return false;
    dom[v] = 1;
    for (auto u : g.neighbors(v)) dom[u] = 1;
  }
  for (std::uint32_t v = 1; v <= g.num_vertices(); ++v)
    if (!dom[v]) return false;
  return true;
}

std::size_t domination_number(const Graph& g) {
  const auto n = g.num_vertices();
  if (n > 24) throw BudgetExceeded("exhaustive dominating-set search limited to 24 vertices");
  if (n == 0) return 0;
  std::vector<std::uint32_t> closed(n);
  for (std::uint32_t v = 1; v <= n; ++v) {
    closed[v - 1] = 1u << (v - 1);
    for (auto u : g.neighbors(v)) closed[v - 1] |= 1u << (u - 1);
  }
  const std::uint32_t full = n == 32 ? ~0u : (1u << n) - 1;
  std::size_t best = n;
  for (std::uint32_t mask = 0; mask <= full; ++mask) {
    auto size = static_cast<std::size_t>(__builtin_popcount(mask));
    if (size >= best) continue;
    std::uint32_t dom = 0;
    for (std::uint32_t m = mask; m; m &= m - 1) dom |= closed[__builtin_ctz(m)];
    if (dom == full) best = size;
    if (mask == full) break;
  }
  return best;
}

CnfFormula domset_cnf(const Graph& g) {
  CnfFormula f;
  f.num_vars = g.num_vertices();
  for (std::uint32_t v = 1; v <= g.num_vertices(); ++v) {
    std::vector<Literal> c{Literal::pos(v)};
    for (auto u : g.neighbors(v)) c.push_back(Literal::pos(u));
    f.add_clause(std::move(c));
  }
  return f;
}

DomsetReduction domset_to_explainability(const Graph& g, std::size_t k) {
  if (g.num_vertices() == 0) throw std::invalid_argument("graph has no vertices");
  DomsetReduction r;
  r.k = k == 0 ? 0 : 2 * k - 1;
  r.instance = ProblemInstance{PartialAssignment::all_true(g.num_vertices()), domset_cnf(g),
                               Target::Top, r.k};
  return r;
}

ProblemInstance conp_gadget(const CnfFormula& psi) {
  PartialAssignment all_true = PartialAssignment::all_true(psi.num_vars);
  bool satisfied = std::all_of(psi.clauses.begin(), psi.clauses.end(), [&](const Clause& c) {
    return std::any_of(c.begin(), c.end(), [&](Literal l) { return l.positive(); });
  });
  if (satisfied)
    throw std::invalid_argument("the all-true assignment satisfies psi; the gadget needs it falsified");
  const Var q = psi.num_vars + 1;
  CnfFormula gadget = psi;
  gadget.add_clause({Literal::neg(q)});
  PartialAssignment s = all_true;
  s.set(q, false);
  return ProblemInstance{s, gadget, Target::Bottom, 1};
}

// --- verification ---------------------------------------------------------

namespace {

struct Budgeted {
  Clock::time_point until;
  ExplainOptions per_case;
  bool expired() const { return Clock::now() >= until; }
};

void tally(ReductionReport& rep, bool agree, const std::string& what) {
  ++rep.cases;
  if (agree)
    ++rep.agreements;
  else
    rep.disagreements.push_back(what);
}

void verify_sigma2(const std::vector<Qbf2Instance>& qs, const Budgeted& b, ReductionReport& rep) {
  for (const auto& q : qs) {
    if (b.expired()) {
      rep.complete = false;
      rep.skipped += qs.size() - rep.cases - rep.skipped;
      return;
    }
    if (q.exist_vars.size() + q.univ_vars.size() > 20) {
      ++rep.skipped;
      continue;
    }
    bool truth = qbf2_eval(q);
    auto red = sigma2_to_explainability(q);
    DecideResult d = decide_bounded(red.instance, red.k, b.per_case);
    if (d.status == ExplainStatus::Timeout) {
      ++rep.skipped;
      continue;
    }
    // with no existentials the all-true assignment may falsify theta; that is a "no"
    const bool yes = d.status == ExplainStatus::Ok && d.answer == Answer::Yes;
    tally(rep, truth == yes, render_qbf2(q));
  }
}

void verify_domset(const std::vector<Graph>& gs, const Budgeted& b, ReductionReport& rep) {
  for (const auto& g : gs) {
    if (b.expired()) {
      rep.complete = false;
      rep.skipped += gs.size() - rep.cases - rep.skipped;
      return;
    }
    if (g.num_vertices() == 0 || g.num_vertices() > 24) {
      ++rep.skipped;
      continue;
    }
    std::size_t gamma = domination_number(g);
    bool agree = true;
    auto base = domset_to_explainability(g, gamma);
    ExplainResult e = explain_min(base.instance, b.per_case);
    if (e.status != ExplainStatus::Ok) {
      ++rep.skipped;
      continue;
    }
    agree = e.explanation->size == 2 * gamma - 1;
    for (std::size_t k = 1; k <= g.num_vertices() && agree; ++k) {
      auto red = domset_to_explainability(g, k);
      DecideResult d = decide_bounded(red.instance, red.k, b.per_case);
      agree = d.status == ExplainStatus::Ok && (d.answer == Answer::Yes) == (gamma <= k);
    }
    tally(rep, agree, render_edge_list(g));
  }
}

void verify_conp(const std::vector<CnfFormula>& fs, const Budgeted& b, ReductionReport& rep) {
  for (const auto& f : fs) {
    if (b.expired()) {
      rep.complete = false;
      rep.skipped += fs.size() - rep.cases - rep.skipped;
      return;
    }
    if (f.num_vars > 24) {
      ++rep.skipped;
      continue;
    }
    std::vector<Var> vars(f.num_vars);
    std::iota(vars.begin(), vars.end(), Var{1});
    bool unsat = enumerate_models(f, vars).empty();
    ProblemInstance inst;
    try {
      inst = conp_gadget(f);
    } catch (const std::invalid_argument&) {
      ++rep.skipped;
      continue;
    }
    DecideResult d = decide_bounded(inst, 1, b.per_case);
    if (d.status != ExplainStatus::Ok) {
      ++rep.skipped;
      continue;
    }
    tally(rep, unsat == (d.answer == Answer::Yes), render_dimacs(f));
  }
}

}  // namespace

ReductionReport verify_reduction(const ReductionInput& input, const VerifyBudget& budget) {
  Budgeted b{Clock::now() + budget.total, ExplainOptions{}};
  b.per_case.timeout = budget.per_case;
  ReductionReport rep;
  std::visit(
      [&](const auto& items) {
        using T = std::decay_t<decltype(items)>;
        if constexpr (std::is_same_v<T, std::vector<Qbf2Instance>>) {
          rep.kind = "sigma2";
          verify_sigma2(items, b, rep);
        } else if constexpr (std::is_same_v<T, std::vector<Graph>>) {
          rep.kind = "domset";
          verify_domset(items, b, rep);
        } else {
          rep.kind = "conp";
          verify_conp(items, b, rep);
        }
      },
      input);
  return rep;
}

// --- random inputs --------------------------------------------------------

Formula random_formula(const std::vector<Var>& atom_pool, std::size_t size, std::mt19937_64& rng) {
  if (atom_pool.empty()) throw std::invalid_argument("random_formula needs at least one atom");
  std::uniform_int_distribution<std::size_t> pick_atom(0, atom_pool.size() - 1);
  if (size <= 1) return Formula::atom(atom_pool[pick_atom(rng)]);
  if (size == 2) return Formula::negation(Formula::atom(atom_pool[pick_atom(rng)]));
  std::uniform_int_distribution<int> kind(0, 2);
  int k = kind(rng);
  if (k == 0) return Formula::negation(random_formula(atom_pool, size - 1, rng));
  std::uniform_int_distribution<std::size_t> split(1, size - 2);
  std::size_t left = split(rng);
  Formula l = random_formula(atom_pool, left, rng);
  Formula r = random_formula(atom_pool, size - 1 - left, rng);
  return k == 1 ? Formula::conj(l, r) : Formula::disj(l, r);
}

Qbf2Instance random_qbf2(std::size_t n, std::size_t m, std::size_t max_size, std::mt19937_64& rng) {
  Qbf2Instance q;
  std::vector<Var> pool;
  for (std::size_t i = 1; i <= n; ++i) q.exist_vars.push_back(static_cast<Var>(i));
  for (std::size_t j = 1; j <= m; ++j) q.univ_vars.push_back(static_cast<Var>(n + j));
  pool = q.exist_vars;
  pool.insert(pool.end(), q.univ_vars.begin(), q.univ_vars.end());
  if (pool.empty()) pool.push_back(1);
  std::uniform_int_distribution<std::size_t> sz(1, std::max<std::size_t>(1, max_size));
  q.matrix = random_formula(pool, sz(rng), rng);
  if (n + m == 0) q.univ_vars.push_back(1);  // a matrix needs one atom; make it universal
  return q;
}

Graph random_graph(std::uint32_t n, double p, bool connected, std::mt19937_64& rng) {
  Graph g(n);
  std::bernoulli_distribution coin(p);
  for (std::uint32_t u = 1; u <= n; ++u)
    for (std::uint32_t v = u + 1; v <= n; ++v)
      if (coin(rng)) g.add_edge(u, v);
  if (connected && n > 1) {
    // union-find over components, then link each component to a random earlier one
    std::vector<std::uint32_t> parent(n + 1);
    std::iota(parent.begin(), parent.end(), 0u);
    auto find = [&](std::uint32_t x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    for (auto [u, v] : g.edges()) parent[find(u)] = find(v);
    for (std::uint32_t v = 2; v <= n; ++v) {
      if (find(v) == find(1)) continue;
      std::uniform_int_distribution<std::uint32_t> any(1, v - 1);
      // vertices below v already share vertex 1's component
      std::uint32_t u = any(rng);
      g.add_edge(u, v);
      parent[find(v)] = find(u);
    }
  }
  return g;
}

}  // namespace minexp
