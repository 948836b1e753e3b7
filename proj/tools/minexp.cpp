// minexp: minimum explanations for propositional truth values.

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "minexp/bench.hpp"
#include "minexp/explain.hpp"
#include "minexp/io.hpp"
#include "minexp/reductions.hpp"

namespace {

using namespace minexp;

enum Exit : int { kOk = 0, kNo = 1, kUsage = 2, kTimeout = 3 };

// A failure that already knows its exit code.
struct Failure {
  int code;
  std::string message;
};

struct Common {
  std::uint64_t seed = 0;
  double timeout_s = 300;
  std::string format = "auto";
};

struct InstanceArgs {
  std::string formula_path;
  std::string assignment_path;
  std::string target = "top";
};

struct Loaded {
  ProblemInstance inst;
  NameTable names;
};

std::string load(const std::string& path) {
  try {
    return read_file(path);
  } catch (const std::exception& e) {
    throw Failure{kUsage, std::string("error: ") + e.what()};
  }
}

template <class F>
auto parse_or_fail(const std::string& path, F&& f) {
  try {
    return f(load(path));
  } catch (const ParseError& e) {
    throw Failure{kUsage, "error: " + path + ": " + e.what()};
  } catch (const InconsistentAssignment& e) {
    throw Failure{kUsage, "error: " + path + ": " + e.what()};
  } catch (const std::invalid_argument& e) {
    throw Failure{kUsage, "error: " + path + ": " + e.what()};
  }
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

Loaded load_instance(const InstanceArgs& a, const Common& c) {
  Loaded out;
  std::string fmt = c.format;
  if (fmt == "auto") fmt = ends_with(a.formula_path, ".cnf") || ends_with(a.formula_path, ".dimacs") ? "dimacs" : "formula";
  if (fmt == "dimacs") {
    out.inst.psi = parse_or_fail(a.formula_path, [](const std::string& t) { return parse_dimacs(t); });
  } else {
    auto pf = parse_or_fail(a.formula_path, [](const std::string& t) { return parse_formula(t); });
    out.inst.psi = pf.formula;
    out.names = pf.names;
  }
  out.inst.assignment =
      parse_or_fail(a.assignment_path, [](const std::string& t) { return parse_assignment(t); });
  out.inst.target = a.target == "top" ? Target::Top : Target::Bottom;
  return out;
}

ExplainOptions explain_options(const Common& c) {
  ExplainOptions o;
  o.timeout = std::chrono::milliseconds(static_cast<std::int64_t>(c.timeout_s * 1000.0));
  return o;
}

void print_explanation(const Explanation& e, const NameTable& names) {
  std::cout << "chi:";
  for (auto l : e.chi) std::cout << ' ' << l.to_dimacs();
  std::cout << "\nformula: " << to_string(e.rendered, names) << "\ncardinality=" << e.chi.size()
            << "; size=" << e.size << "\n";
}

int precondition_error() {
  std::cerr << "error: precondition fails\n";
  return kNo;
}

int run_check(const InstanceArgs& a, const Common& c) {
  auto l = load_instance(a, c);
  if (!check_precondition(l.inst)) return precondition_error();
  std::cout << "precondition holds\n";
  return kOk;
}

int run_decide(const InstanceArgs& a, const Common& c, std::size_t k) {
  auto l = load_instance(a, c);
  auto r = decide_bounded(l.inst, k, explain_options(c));
  if (r.status == ExplainStatus::PreconditionFailed) return precondition_error();
  if (r.status == ExplainStatus::Timeout) {
    std::cout << "timeout\n";
    return kTimeout;
  }
  if (r.answer == Answer::No) {
    std::cout << "no\n";
    return kNo;
  }
  std::cout << "yes\n";
  print_explanation(*r.witness, l.names);
  return kOk;
}

int run_explain(const InstanceArgs& a, const Common& c, std::optional<std::size_t> k) {
  if (k) return run_decide(a, c, *k);
  auto l = load_instance(a, c);
  auto r = explain_min(l.inst, explain_options(c));
  if (r.status == ExplainStatus::PreconditionFailed) return precondition_error();
  if (r.status == ExplainStatus::Timeout) {
    if (r.explanation) print_explanation(*r.explanation, l.names);
    std::cout << "timeout; lower_bound=" << r.lower_bound << "\n";
    return kTimeout;
  }
  print_explanation(*r.explanation, l.names);
  return kOk;
}

void emit_instance(const CnfFormula& s, const ProblemInstance& inst, std::size_t bound,
                   const std::string& prefix) {
  std::vector<std::string> comments = {"target " + std::string(to_string(inst.target)),
                                       "bound " + std::to_string(bound)};
  std::string assignment = render_assignment(inst.assignment);
  std::string line = assignment.substr(0, assignment.size() - 1);
  comments.push_back("assignment " + line);
  std::string dimacs = render_dimacs(s, comments);
  if (prefix.empty()) {
    std::cout << dimacs;
    return;
  }
  std::ofstream(prefix + ".cnf") << dimacs;
  std::ofstream(prefix + ".assign") << assignment;
  std::cout << "wrote " << prefix << ".cnf and " << prefix << ".assign\n";
}

int run_reduce(const std::string& kind, const std::string& input, std::optional<std::size_t> k,
               const std::string& prefix) {
  if (kind == "sigma2") {
    auto q = parse_or_fail(input, [](const std::string& t) { return parse_qbf2(t); });
    auto red = sigma2_to_explainability(q);
    auto cnf = clausal_form(std::get<Formula>(red.instance.psi));
    if (!cnf) throw Failure{kUsage, "error: matrix too large for clausal form"};
    cnf->num_vars = std::max(cnf->num_vars, red.instance.assignment.max_var());
    emit_instance(*cnf, red.instance, red.k, prefix);
    return kOk;
  }
  if (kind == "domset") {
    if (!k) throw Failure{kUsage, "error: reduce domset needs --k"};
    auto g = parse_or_fail(input, [](const std::string& t) { return parse_edge_list(t); });
    if (g.num_vertices() == 0) throw Failure{kUsage, "error: " + input + ": empty graph"};
    auto red = domset_to_explainability(g, *k);
    emit_instance(std::get<CnfFormula>(red.instance.psi), red.instance, red.k, prefix);
    return kOk;
  }
  auto s = parse_or_fail(input, [](const std::string& t) { return parse_dimacs(t); });
  ProblemInstance inst;
  try {
    inst = conp_gadget(s);
  } catch (const std::invalid_argument& e) {
    throw Failure{kNo, std::string("error: ") + e.what()};
  }
  emit_instance(std::get<CnfFormula>(inst.psi), inst, 1, prefix);
  return kOk;
}

int run_gen(const std::string& kind, const std::string& arg, const Common& c) {
  if (kind == "queens") {
    std::uint32_t n = 0;
    try {
      n = static_cast<std::uint32_t>(std::stoul(arg));
    } catch (const std::exception&) {
      throw Failure{kUsage, "error: queens size must be a positive integer"};
    }
    if (n == 0) throw Failure{kUsage, "error: queens size must be a positive integer"};
    std::cout << render_dimacs(gen_queens_cnf(n), {"queens n=" + arg + "; queen(x,y) = (x-1)*n + y"});
    return kOk;
  }
  if (kind == "planar") {
    std::uint32_t v = 0;
    try {
      v = static_cast<std::uint32_t>(std::stoul(arg));
    } catch (const std::exception&) {
      throw Failure{kUsage, "error: vertex count must be a positive integer"};
    }
    if (v == 0) throw Failure{kUsage, "error: vertex count must be a positive integer"};
    std::cout << render_edge_list(gen_random_planar_graph(v, c.seed));
    return kOk;
  }
  auto g = parse_or_fail(arg, [](const std::string& t) { return parse_edge_list(t); });
  if (g.num_vertices() == 0) throw Failure{kUsage, "error: " + arg + ": empty graph"};
  std::cout << render_dimacs(gen_domset_cnf(g), {"dominating set; in(v) = v"});
  return kOk;
}

int run_bench(const std::string& path, std::optional<unsigned> threads, std::optional<std::uint64_t> seed) {
  ExperimentConfig cfg;
  try {
    cfg = parse_experiment_config(load(path));
    if (threads) cfg.threads = *threads;
    if (seed) cfg.seed = *seed;
    validate(cfg);
  } catch (const ConfigError& e) {
    throw Failure{kUsage, "error: " + path + ": " + e.what()};
  }
  auto csv = to_csv(run_experiment(cfg));
  if (cfg.output_path.empty()) {
    std::cout << csv;
  } else {
    std::ofstream out(cfg.output_path);
    if (!out) throw Failure{kUsage, "error: cannot write '" + cfg.output_path + "'"};
    out << csv;
    std::cout << "wrote " << cfg.output_path << "\n";
  }
  return kOk;
}

void add_instance_flags(CLI::App* cmd, InstanceArgs& a) {
  cmd->add_option("-f,--formula", a.formula_path, "formula file (DIMACS or formula text)")->required();
  cmd->add_option("-a,--assignment", a.assignment_path, "literal set as signed integers")->required();
  cmd->add_option("-b,--target", a.target, "truth value to explain")
      ->check(CLI::IsMember({"top", "bot"}));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Minimum-size explanations of propositional truth values"};
  app.require_subcommand(1);
  app.fallthrough();
  Common common;
  bool seed_given = false;
  app.add_option("--seed", common.seed, "random seed")->each([&](const std::string&) { seed_given = true; });
  app.add_option("--timeout", common.timeout_s, "wall-clock budget in seconds")->check(CLI::PositiveNumber);
  app.add_option("--format", common.format, "formula file format")
      ->check(CLI::IsMember({"auto", "dimacs", "formula"}));

  InstanceArgs check_args, explain_args, decide_args;
  std::optional<std::size_t> explain_k;
  std::size_t decide_k = 0;
  auto* check = app.add_subcommand("check", "test the precondition");
  add_instance_flags(check, check_args);
  auto* explain = app.add_subcommand("explain", "minimum explanation (or bounded decision with --k)");
  add_instance_flags(explain, explain_args);
  explain->add_option("--k", explain_k, "size bound");
  auto* decide = app.add_subcommand("decide", "is there an explanation of size <= k");
  add_instance_flags(decide, decide_args);
  decide->add_option("--k", decide_k, "size bound")->required();

  std::string reduce_kind, reduce_input, reduce_prefix;
  std::optional<std::size_t> reduce_k;
  auto* reduce = app.add_subcommand("reduce", "build an explainability instance from another problem");
  reduce->add_option("kind", reduce_kind)->required()->check(CLI::IsMember({"sigma2", "domset", "conp"}));
  reduce->add_option("input", reduce_input, "2QBF, edge list or DIMACS file")->required();
  reduce->add_option("--k", reduce_k, "dominating set size (domset)");
  reduce->add_option("-o,--output", reduce_prefix, "write <prefix>.cnf and <prefix>.assign");

  std::string gen_kind, gen_arg;
  auto* gen = app.add_subcommand("gen", "generate benchmark inputs");
  gen->add_option("kind", gen_kind)->required()->check(CLI::IsMember({"queens", "domset", "planar"}));
  gen->add_option("arg", gen_arg, "queens: n; domset: edge-list file; planar: vertex count")->required();

  std::string bench_config;
  std::optional<unsigned> bench_threads;
  auto* bench = app.add_subcommand("bench", "run an experiment grid and write CSV");
  bench->add_option("--config", bench_config, "JSON experiment config")->required();
  bench->add_option("--threads", bench_threads, "worker threads")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*check) return run_check(check_args, common);
    if (*explain) return run_explain(explain_args, common, explain_k);
    if (*decide) return run_decide(decide_args, common, decide_k);
    if (*reduce) return run_reduce(reduce_kind, reduce_input, reduce_k, reduce_prefix);
    if (*gen) return run_gen(gen_kind, gen_arg, common);
    if (*bench)
      return run_bench(bench_config, bench_threads, seed_given ? std::optional(common.seed) : std::nullopt);
  } catch (const Failure& f) {
    std::cerr << f.message << "\n";
    return f.code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
