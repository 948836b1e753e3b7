#include "minexp/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <map>
#include <mutex>
#include <random>
#include <thread>

#include <json.hpp>

#include "minexp/sat_solver.hpp"

namespace minexp {

CnfFormula gen_queens_cnf(std::uint32_t n) {
  if (n == 0) throw std::invalid_argument("queens needs n >= 1");
  CnfFormula s;
  s.num_vars = n * n;
  auto q = [n](std::uint32_t x, std::uint32_t y) { return queen_var(n, x, y); };
  for (std::uint32_t x = 1; x <= n; ++x) {
    std::vector<Literal> c;
    for (std::uint32_t y = 1; y <= n; ++y) c.push_back(Literal::pos(q(x, y)));
    s.add_clause(std::move(c));
  }
  for (std::uint32_t x = 1; x <= n; ++x)
    for (std::uint32_t y1 = 1; y1 <= n; ++y1)
      for (std::uint32_t y2 = y1 + 1; y2 <= n; ++y2)
        s.add_clause({Literal::neg(q(x, y1)), Literal::neg(q(x, y2))});
  for (std::uint32_t x1 = 1; x1 <= n; ++x1)
    for (std::uint32_t x2 = x1 + 1; x2 <= n; ++x2)
      for (std::uint32_t y = 1; y <= n; ++y)
        s.add_clause({Literal::neg(q(x1, y)), Literal::neg(q(x2, y))});
  for (int family = 0; family < 2; ++family)
    for (std::uint32_t x1 = 1; x1 <= n; ++x1)
      for (std::uint32_t x2 = x1 + 1; x2 <= n; ++x2) {
        const std::uint32_t d = x2 - x1;
        for (std::uint32_t y1 = 1; y1 <= n - d; ++y1) {
          if (family == 0)
            s.add_clause({Literal::neg(q(x1, y1)), Literal::neg(q(x2, y1 + d))});
          else
            s.add_clause({Literal::neg(q(x1, y1 + d)), Literal::neg(q(x2, y1))});
        }
      }
  return s;
}

CnfFormula gen_domset_cnf(const Graph& g) { return domset_cnf(g); }

// --- planar graphs -----------------------------------------------------------

namespace {

struct Point {
  std::int64_t x, y;
  friend bool operator==(const Point&, const Point&) = default;
};

int orient(Point a, Point b, Point c) {
  std::int64_t v = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
  return (v > 0) - (v < 0);
}

// c lies on segment ab (collinearity assumed).
bool within(Point a, Point b, Point c) {
  return std::min(a.x, b.x) <= c.x && c.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= c.y &&
         c.y <= std::max(a.y, b.y);
}

// Segments pq and rs share more than a common endpoint.
bool conflicts(Point p, Point q, Point r, Point s) {
  const bool shared = p == r || p == s || q == r || q == s;
  int o1 = orient(p, q, r), o2 = orient(p, q, s), o3 = orient(r, s, p), o4 = orient(r, s, q);
  if (shared) {
    if (o1 != 0 || o2 != 0) return false;
    // collinear with a shared endpoint: overlapping unless they point apart
    Point common = (p == r || p == s) ? p : q;
    Point a = common == p ? q : p;
    Point b = common == r ? s : r;
    return (a.x - common.x) * (b.x - common.x) + (a.y - common.y) * (b.y - common.y) > 0;
  }
  if (o1 != o2 && o3 != o4 && o1 != 0 && o2 != 0 && o3 != 0 && o4 != 0) return true;
  if (o1 == 0 && within(p, q, r)) return true;
  if (o2 == 0 && within(p, q, s)) return true;
  if (o3 == 0 && within(r, s, p)) return true;
  if (o4 == 0 && within(r, s, q)) return true;
  return false;
}

}  // namespace

Graph gen_random_planar_graph(std::uint32_t v, std::uint64_t seed, double edges_per_vertex) {
  if (v == 0) throw std::invalid_argument("planar graph needs v >= 1");
  std::mt19937_64 rng(seed);
  const auto side = static_cast<std::int64_t>(4 * std::ceil(std::sqrt(static_cast<double>(v))) + 1);
  std::uniform_int_distribution<std::int64_t> coord(0, side - 1);
  std::vector<Point> pts;
  while (pts.size() < v) {
    Point p{coord(rng), coord(rng)};
    if (std::find(pts.begin(), pts.end(), p) == pts.end()) pts.push_back(p);
  }

  struct Cand {
    std::int64_t len2;
    std::uint32_t a, b;
  };
  std::vector<Cand> cands;
  for (std::uint32_t i = 0; i < v; ++i)
    for (std::uint32_t j = i + 1; j < v; ++j) {
      std::int64_t dx = pts[i].x - pts[j].x, dy = pts[i].y - pts[j].y;
      cands.push_back({dx * dx + dy * dy, i, j});
    }
  std::sort(cands.begin(), cands.end(), [](const Cand& l, const Cand& r) {
    return std::tie(l.len2, l.a, l.b) < std::tie(r.len2, r.a, r.b);
  });

  Graph g(v);
  std::vector<std::pair<std::uint32_t, std::uint32_t>> placed;
  const std::size_t max_edges = v >= 3 ? 3 * std::size_t{v} - 6 : v - 1;
  for (const auto& c : cands) {
    if (placed.size() >= max_edges) break;
    Point p = pts[c.a], q = pts[c.b];
    bool ok = true;
    for (std::uint32_t k = 0; k < v && ok; ++k)
      if (k != c.a && k != c.b && orient(p, q, pts[k]) == 0 && within(p, q, pts[k])) ok = false;
    for (std::size_t e = 0; e < placed.size() && ok; ++e)
      if (conflicts(p, q, pts[placed[e].first], pts[placed[e].second])) ok = false;
    if (!ok) continue;
    placed.emplace_back(c.a, c.b);
    g.add_edge(c.a + 1, c.b + 1);
  }

  const auto target = std::max<std::size_t>(
      v - 1, static_cast<std::size_t>(std::llround(edges_per_vertex * static_cast<double>(v))));
  auto edges = g.edges();
  std::shuffle(edges.begin(), edges.end(), rng);
  for (auto [a, b] : edges) {
    if (g.num_edges() <= target) break;
    g.remove_edge(a, b);
    if (!g.connected()) g.add_edge(a, b);
  }
  return g;
}

// --- solutions and perturbations ----------------------------------------------

PartialAssignment sample_solution(const CnfFormula& s, std::uint64_t seed) {
  SolverOptions opts;
  opts.seed = seed;
  opts.randomize = true;
  SatSolver solver(s, opts);
  auto r = solver.solve();
  if (r.status != SatStatus::Sat) throw Unsatisfiable("formula has no solution");
  PartialAssignment out(s.num_vars);
  for (Var v = 1; v <= s.num_vars; ++v) out.set(v, r.model.value(v) == Truth::True);
  return out;
}

const char* to_string(Family f) { return f == Family::Queens ? "queens" : "domset"; }

PartialAssignment perturb_queens(const PartialAssignment& solution, std::uint32_t n, std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("queens perturbation needs n >= 2");
  std::mt19937_64 rng(seed);
  const auto x = std::uniform_int_distribution<std::uint32_t>(1, n)(rng);
  std::uint32_t row = 0;
  for (std::uint32_t y = 1; y <= n; ++y)
    if (solution.value(queen_var(n, x, y)) == Truth::True) row = y;
  if (row == 0) throw std::invalid_argument("column " + std::to_string(x) + " has no queen");
  auto other = std::uniform_int_distribution<std::uint32_t>(1, n - 1)(rng);
  if (other >= row) ++other;
  PartialAssignment out = solution;
  out.set(queen_var(n, x, row), false);
  out.set(queen_var(n, x, other), true);
  return out;
}

PartialAssignment perturb_domset(const PartialAssignment& dominating_set, std::uint64_t seed) {
  std::vector<Var> members;
  for (Var v = 1; v <= dominating_set.max_var(); ++v)
    if (dominating_set.value(v) == Truth::True) members.push_back(v);
  if (members.empty()) throw std::invalid_argument("empty dominating set");
  std::mt19937_64 rng(seed);
  auto i = std::uniform_int_distribution<std::size_t>(0, members.size() - 1)(rng);
  PartialAssignment out = dominating_set;
  out.set(members[i], false);
  return out;
}

PartialAssignment perturb(Family family, Target mode, const PartialAssignment& solution,
                          std::uint32_t size, std::uint64_t seed) {
  if (mode == Target::Top)
    return family == Family::Queens ? solution : PartialAssignment::all_true(size);
  return family == Family::Queens ? perturb_queens(solution, size, seed)
                                  : perturb_domset(solution, seed);
}

// --- configuration ---------------------------------------------------------------

void validate(const ExperimentConfig& cfg) {
  if (cfg.sizes.empty()) throw ConfigError("sizes must not be empty");
  for (std::size_t i = 0; i < cfg.sizes.size(); ++i) {
    if (cfg.sizes[i] == 0) throw ConfigError("sizes must be positive");
    if (i > 0 && cfg.sizes[i] <= cfg.sizes[i - 1]) throw ConfigError("sizes must be increasing");
  }
  if (cfg.instances_per_size == 0) throw ConfigError("instances_per_size must be >= 1");
  if (cfg.threads == 0) throw ConfigError("threads must be >= 1");
  if (!(cfg.edges_per_vertex > 0)) throw ConfigError("edges_per_vertex must be positive");
  if (cfg.timeout.count() <= 0) throw ConfigError("timeout must be positive");
}

ExperimentConfig parse_experiment_config(const std::string& json_text) {
  using nlohmann::json;
  ExperimentConfig cfg;
  try {
    json j = json::parse(json_text);
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    const auto family = j.at("family").get<std::string>();
    if (family == "queens") cfg.family = Family::Queens;
    else if (family == "domset") cfg.family = Family::Domset;
    else throw ConfigError("unknown family '" + family + "'");
    cfg.sizes = j.at("sizes").get<std::vector<std::uint32_t>>();
    cfg.instances_per_size = j.value("instances_per_size", cfg.instances_per_size);
    const auto mode = j.value("mode", std::string("negative"));
    if (mode == "positive") cfg.mode = Target::Top;
    else if (mode == "negative") cfg.mode = Target::Bottom;
    else throw ConfigError("unknown mode '" + mode + "'");
    cfg.seed = j.value("seed", cfg.seed);
    if (j.contains("timeout"))
      cfg.timeout = std::chrono::milliseconds(
          static_cast<std::int64_t>(std::llround(j.at("timeout").get<double>() * 1000.0)));
    cfg.output_path = j.value("output_path", std::string());
    cfg.threads = j.value("threads", cfg.threads);
    cfg.edges_per_vertex = j.value("edges_per_vertex", cfg.edges_per_vertex);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(e.what());
  }
  validate(cfg);
  return cfg;
}

// --- instances ---------------------------------------------------------------------

std::uint64_t instance_seed(std::uint64_t base, std::uint32_t size, std::size_t id) {
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(mix(mix(base) ^ size) ^ id);
}

BenchInstance make_instance(const ExperimentConfig& cfg, std::uint32_t size, std::size_t id) {
  constexpr int kRetries = 16;
  BenchInstance bi;
  bi.size = size;
  bi.id = id;
  bi.seed = instance_seed(cfg.seed, size, id);

  if (cfg.family == Family::Queens) {
    CnfFormula s = gen_queens_cnf(size);
    for (int attempt = 0; attempt < kRetries; ++attempt) {
      const auto seed = instance_seed(bi.seed, 0, static_cast<std::size_t>(attempt));
      auto sol = sample_solution(s, seed);
      auto l = perturb(Family::Queens, cfg.mode, sol, size, seed);
      bi.problem = ProblemInstance{std::move(l), s, cfg.mode, std::nullopt};
      if (check_precondition(bi.problem)) return bi;
    }
    throw std::runtime_error("no instance passed the precondition");
  }

  bi.graph = gen_random_planar_graph(size, bi.seed, cfg.edges_per_vertex);
  CnfFormula s = gen_domset_cnf(*bi.graph);
  if (cfg.mode == Target::Top) {
    bi.problem = ProblemInstance{PartialAssignment::all_true(size), s, Target::Top, std::nullopt};
    return bi;
  }
  ExplainOptions opts;
  opts.timeout = cfg.timeout;
  auto best = explain_min(ProblemInstance{PartialAssignment::all_true(size), s, Target::Top, std::nullopt}, opts);
  if (best.status != ExplainStatus::Ok) throw std::runtime_error("no minimum dominating set found in time");
  PartialAssignment ds(size);
  for (Var v = 1; v <= size; ++v) ds.set(v, false);
  for (auto l : best.explanation->chi) ds.set(l.var(), true);
  for (int attempt = 0; attempt < kRetries; ++attempt) {
    auto l = perturb_domset(ds, instance_seed(bi.seed, 1, static_cast<std::size_t>(attempt)));
    bi.problem = ProblemInstance{std::move(l), s, Target::Bottom, std::nullopt};
    if (check_precondition(bi.problem)) return bi;
  }
  throw std::runtime_error("no instance passed the precondition");
}

// --- runner ----------------------------------------------------------------------

namespace {

ExperimentRow run_one(const ExperimentConfig& cfg, std::uint32_t size, std::size_t id) {
  ExperimentRow row;
  row.size = size;
  row.instance_id = id;
  row.seed = instance_seed(cfg.seed, size, id);
  BenchInstance bi;
  try {
    bi = make_instance(cfg, size, id);
  } catch (const Unsatisfiable&) {
    row.status = "no_solution";
    return row;
  } catch (const std::exception&) {
    row.status = "generation_failed";
    return row;
  }
  row.precondition_ok = check_precondition(bi.problem);
  if (!row.precondition_ok) {
    row.status = "precondition_failed";
    return row;
  }
  ExplainOptions opts;
  opts.timeout = cfg.timeout;
  const auto start = Clock::now();
  auto res = explain_min(bi.problem, opts);
  row.wall_time_ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
  row.status = to_string(res.status);
  if (res.explanation) {
    row.cardinality = res.explanation->chi.size();
    row.dm_size = res.explanation->size;
  }
  return row;
}

std::string fmt(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  validate(cfg);
  std::vector<std::pair<std::uint32_t, std::size_t>> jobs;
  for (auto size : cfg.sizes)
    for (std::size_t id = 0; id < cfg.instances_per_size; ++id) jobs.emplace_back(size, id);

  ExperimentResult out;
  out.config = cfg;
  out.rows.resize(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < jobs.size();)
      out.rows[i] = run_one(cfg, jobs[i].first, jobs[i].second);
  };
  const unsigned n = std::min<std::size_t>(cfg.threads, jobs.size());
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return out;
}

std::string to_csv(const ExperimentResult& result) {
  const auto& cfg = result.config;
  const std::string family = to_string(cfg.family);
  const std::string mode = cfg.mode == Target::Top ? "positive" : "negative";
  std::string out = std::string(kCsvHeader) + "\n";
  auto opt = [](const std::optional<std::size_t>& v) { return v ? std::to_string(*v) : std::string(); };
  for (const auto& r : result.rows)
    out += family + "," + std::to_string(r.size) + "," + std::to_string(r.instance_id) + "," +
           std::to_string(r.seed) + "," + mode + "," + (r.precondition_ok ? "true" : "false") + "," +
           opt(r.cardinality) + "," + opt(r.dm_size) + "," + fmt(r.wall_time_ms, 3) + "," + r.status + "\n";

  std::map<std::uint32_t, std::vector<const ExperimentRow*>> by_size;
  for (const auto& r : result.rows) by_size[r.size].push_back(&r);
  for (const auto& [size, rows] : by_size) {
    std::size_t ok = 0, pre = 0;
    double card = 0, dm = 0, ms = 0;
    for (const auto* r : rows) {
      pre += r->precondition_ok;
      if (r->status != "ok") continue;
      ++ok;
      card += static_cast<double>(*r->cardinality);
      dm += static_cast<double>(*r->dm_size);
      ms += r->wall_time_ms;
    }
    auto mean = [ok](double v, int d) { return ok ? fmt(v / static_cast<double>(ok), d) : std::string(); };
    out += family + "," + std::to_string(size) + ",avg,," + mode + "," + std::to_string(pre) + "/" +
           std::to_string(rows.size()) + "," + mean(card, 2) + "," + mean(dm, 2) + "," + mean(ms, 3) +
           ",avg_of_" + std::to_string(ok) + "_ok\n";
  }
  return out;
}

}  // namespace minexp
