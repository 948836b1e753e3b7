#include "minexp/sat_solver.hpp"

#include <algorithm>
#include <random>
#include <set>

namespace minexp {

std::uint64_t luby(std::uint64_t i) {
  // find the finite subsequence containing i, then its size and position
  std::uint64_t size = 1, seq = 0;
  while (size < i + 1) {
    ++seq;
    size = 2 * size + 1;
  }
  while (size - 1 != i) {
    size = (size - 1) >> 1;
    --seq;
    i = i % size;
  }
  return std::uint64_t{1} << seq;
}

SatSolver::SatSolver(const CnfFormula& f, SolverOptions opts) : opts_(opts) {
  ensure_vars(f.num_vars);
  for (const auto& c : f.clauses) {
    if (!add_input_clause(c)) {
      inconsistent_ = true;
      break;
    }
  }
  max_learnts_ = std::max(1000.0, static_cast<double>(f.clauses.size()) / 3.0);

  if (opts_.randomize) {
    std::mt19937_64 rng(opts_.seed);
    std::uniform_real_distribution<double> jitter(0.0, 1e-5);
    for (Var v = 1; v <= num_vars_; ++v) {
      phase_[v] = (rng() & 1u) != 0;
      activity_[v] = jitter(rng);
    }
    heap_.clear();
    std::fill(heap_index_.begin(), heap_index_.end(), -1);
    for (Var v = 1; v <= num_vars_; ++v) heap_insert(v);
  }
}

void SatSolver::ensure_vars(Var n) {
  if (n <= num_vars_ && !assigns_.empty()) return;
  Var old = assigns_.empty() ? 0 : num_vars_;
  num_vars_ = std::max(num_vars_, n);
  std::size_t sz = num_vars_ + 1;
  assigns_.resize(sz, kUndef);
  phase_.resize(sz, false);
  level_.resize(sz, 0);
  reason_.resize(sz, kNoReason);
  activity_.resize(sz, 0.0);
  heap_index_.resize(sz, -1);
  seen_.resize(sz, 0);
  watches_.resize(2 * sz);
  for (Var v = old + 1; v <= num_vars_; ++v) heap_insert(v);
}

bool SatSolver::add_input_clause(const Clause& c) {
  if (c.tautological()) return true;
  std::vector<Lit> lits;
  for (auto l : c) {
    Lit x = to_lit(l);
    std::int8_t val = value(x);
    if (val == kTrue) return true;  // already satisfied at level 0
    if (val == kFalse) continue;
    lits.push_back(x);
  }
  if (lits.empty()) return false;
  if (lits.size() == 1) {
    enqueue(lits[0], kNoReason);
    return propagate() == kNoReason;
  }
  clauses_.push_back({std::move(lits), 0.0, false, false});
  attach(static_cast<CRef>(clauses_.size() - 1));
  return true;
}

void SatSolver::attach(CRef cr) {
  const auto& lits = clauses_[cr].lits;
  watches_[lits[0] ^ 1u].push_back({cr, lits[1]});
  watches_[lits[1] ^ 1u].push_back({cr, lits[0]});
}

void SatSolver::enqueue(Lit l, CRef reason) {
  Var v = var_of(l);
  assigns_[v] = (l & 1u) ? kFalse : kTrue;
  level_[v] = decision_level();
  reason_[v] = reason;
  trail_.push_back(l);
}

SatSolver::CRef SatSolver::propagate() {
  CRef conflict = kNoReason;
  while (qhead_ < trail_.size()) {
    Lit p = trail_[qhead_++];  // p became true; visit clauses watching ~p
    auto& ws = watches_[p];
    ++stats_.propagations;
    Lit false_lit = p ^ 1u;
    std::size_t i = 0, j = 0;
    while (i < ws.size()) {
      Watcher w = ws[i];
      if (value(w.blocker) == kTrue) {
        ws[j++] = ws[i++];
        continue;
      }
      auto& c = clauses_[w.cref].lits;
      if (c[0] == false_lit) std::swap(c[0], c[1]);
      ++i;
      Lit first = c[0];
      if (first != w.blocker && value(first) == kTrue) {
        ws[j++] = {w.cref, first};
        continue;
      }
      bool moved = false;
      for (std::size_t k = 2; k < c.size(); ++k) {
        if (value(c[k]) != kFalse) {
          std::swap(c[1], c[k]);
          watches_[c[1] ^ 1u].push_back({w.cref, first});
          moved = true;
          break;
        }
      }
      if (moved) continue;
      ws[j++] = {w.cref, first};
      if (value(first) == kFalse) {
        conflict = w.cref;
        qhead_ = trail_.size();
        while (i < ws.size()) ws[j++] = ws[i++];
      } else {
        enqueue(first, w.cref);
      }
    }
    ws.resize(j);
  }
  return conflict;
}

void SatSolver::bump_var(Var v) {
  if ((activity_[v] += var_inc_) > 1e100) {
    for (auto& a : activity_) a *= 1e-100;
    var_inc_ *= 1e-100;
  }
  if (heap_index_[v] >= 0) heap_up(static_cast<std::size_t>(heap_index_[v]));
}

void SatSolver::bump_clause(ClauseData& c) {
  if ((c.activity += clause_inc_) > 1e20) {
    for (CRef cr : learnts_) clauses_[cr].activity *= 1e-20;
    clause_inc_ *= 1e-20;
  }
}

void SatSolver::analyze(CRef conflict, std::vector<Lit>& learnt, int& backtrack_level) {
  learnt.clear();
  learnt.push_back(0);  // placeholder for the asserting literal
  int path = 0;
  Lit p = 0;
  bool have_p = false;
  std::size_t index = trail_.size();

  do {
    auto& c = clauses_[conflict];
    if (c.learnt) bump_clause(c);
    for (std::size_t k = have_p ? 1 : 0; k < c.lits.size(); ++k) {
      Lit q = c.lits[k];
      Var v = var_of(q);
      if (!seen_[v] && level_[v] > 0) {
        seen_[v] = 1;
        bump_var(v);
        if (level_[v] >= decision_level())
          ++path;
        else
          learnt.push_back(q);
      }
    }
    while (!seen_[var_of(trail_[--index])]) {
    }
    p = trail_[index];
    have_p = true;
    conflict = reason_[var_of(p)];
    seen_[var_of(p)] = 0;
    --path;
  } while (path > 0);
  learnt[0] = p ^ 1u;

  // local + recursive minimisation
  analyze_toclear_.assign(learnt.begin(), learnt.end());
  std::uint32_t abstract_levels = 0;
  for (std::size_t k = 1; k < learnt.size(); ++k)
    abstract_levels |= 1u << (level_[var_of(learnt[k])] & 31);
  std::size_t j = 1;
  for (std::size_t k = 1; k < learnt.size(); ++k)
    if (reason_[var_of(learnt[k])] == kNoReason || !redundant(learnt[k], abstract_levels))
      learnt[j++] = learnt[k];
  learnt.resize(j);

  if (learnt.size() == 1) {
    backtrack_level = 0;
  } else {
    std::size_t max_i = 1;
    for (std::size_t k = 2; k < learnt.size(); ++k)
      if (level_[var_of(learnt[k])] > level_[var_of(learnt[max_i])]) max_i = k;
    std::swap(learnt[1], learnt[max_i]);
    backtrack_level = level_[var_of(learnt[1])];
  }
  for (Lit l : analyze_toclear_) seen_[var_of(l)] = 0;
}

bool SatSolver::redundant(Lit l, std::uint32_t abstract_levels) {
  analyze_stack_.clear();
  analyze_stack_.push_back(l);
  std::size_t top = analyze_toclear_.size();
  while (!analyze_stack_.empty()) {
    Lit q = analyze_stack_.back();
    analyze_stack_.pop_back();
    const auto& c = clauses_[reason_[var_of(q)]].lits;
    for (std::size_t k = 0; k < c.size(); ++k) {
      Lit r = c[k];
      Var v = var_of(r);
      if (v == var_of(q) || seen_[v] || level_[v] == 0) continue;
      if (reason_[v] != kNoReason && ((1u << (level_[v] & 31)) & abstract_levels)) {
        seen_[v] = 1;
        analyze_stack_.push_back(r);
        analyze_toclear_.push_back(r);
      } else {
        for (std::size_t m = top; m < analyze_toclear_.size(); ++m)
          seen_[var_of(analyze_toclear_[m])] = 0;
        analyze_toclear_.resize(top);
        return false;
      }
    }
  }
  return true;
}

std::vector<Literal> SatSolver::analyze_final(Lit failed) {
  // `failed` is an assumption found false; collect the assumptions implying ~failed
  std::set<Literal> core{from_lit(failed)};
  if (decision_level() == 0) return {core.begin(), core.end()};
  seen_[var_of(failed)] = 1;
  for (std::size_t i = trail_.size(); i-- > trail_lim_[0];) {
    Var x = var_of(trail_[i]);
    if (!seen_[x]) continue;
    if (reason_[x] == kNoReason) {
      core.insert(from_lit(trail_[i]));
    } else {
      for (Lit q : clauses_[reason_[x]].lits)
        if (level_[var_of(q)] > 0) seen_[var_of(q)] = 1;
    }
    seen_[x] = 0;
  }
  seen_[var_of(failed)] = 0;
  return {core.begin(), core.end()};
}

void SatSolver::backtrack(int level) {
  if (decision_level() <= level) return;
  for (std::size_t i = trail_.size(); i-- > trail_lim_[static_cast<std::size_t>(level)];) {
    Var v = var_of(trail_[i]);
    assigns_[v] = kUndef;
    reason_[v] = kNoReason;
    phase_[v] = (trail_[i] & 1u) == 0;
    if (heap_index_[v] < 0) heap_insert(v);
  }
  trail_.resize(trail_lim_[static_cast<std::size_t>(level)]);
  trail_lim_.resize(static_cast<std::size_t>(level));
  qhead_ = trail_.size();
}

SatSolver::Lit SatSolver::pick_branch() {
  while (!heap_.empty()) {
    Var v = heap_pop();
    if (assigns_[v] == kUndef) return 2 * v + (phase_[v] ? 0u : 1u);
  }
  return 0;
}

bool SatSolver::locked(CRef cr) const {
  const auto& c = clauses_[cr].lits;
  Var v = var_of(c[0]);
  return reason_[v] == cr && value(c[0]) == kTrue;
}

void SatSolver::reduce_learnts() {
  std::vector<CRef> sorted = learnts_;
  std::stable_sort(sorted.begin(), sorted.end(), [&](CRef a, CRef b) {
    const auto& ca = clauses_[a];
    const auto& cb = clauses_[b];
    if ((ca.lits.size() > 2) != (cb.lits.size() > 2)) return ca.lits.size() > 2;
    return ca.activity < cb.activity;
  });
  std::size_t half = sorted.size() / 2;
  std::vector<char> drop(clauses_.size(), 0);
  for (std::size_t i = 0; i < half; ++i) {
    CRef cr = sorted[i];
    if (clauses_[cr].lits.size() > 2 && !locked(cr)) drop[cr] = 1;
  }
  for (auto& ws : watches_)
    ws.erase(std::remove_if(ws.begin(), ws.end(), [&](const Watcher& w) { return drop[w.cref]; }),
             ws.end());
  std::vector<CRef> kept;
  for (CRef cr : learnts_) {
    if (drop[cr]) {
      clauses_[cr].deleted = true;
      clauses_[cr].lits.clear();
      clauses_[cr].lits.shrink_to_fit();
    } else {
      kept.push_back(cr);
    }
  }
  learnts_ = std::move(kept);
}

bool SatSolver::out_of_time() { return opts_.deadline && Clock::now() >= *opts_.deadline; }

SatStatus SatSolver::search(std::uint64_t conflict_budget, const std::vector<Lit>& assumptions,
                            std::vector<Literal>& core) {
  std::uint64_t conflicts_here = 0;
  std::vector<Lit> learnt;
  for (;;) {
    CRef conflict = propagate();
    if (conflict != kNoReason) {
      ++stats_.conflicts;
      ++conflicts_here;
      if (decision_level() == 0) {
        inconsistent_ = true;
        return SatStatus::Unsat;
      }
      int bt = 0;
      analyze(conflict, learnt, bt);
      backtrack(bt);
      if (learnt.size() == 1) {
        enqueue(learnt[0], kNoReason);
      } else {
        clauses_.push_back({learnt, 0.0, true, false});
        CRef cr = static_cast<CRef>(clauses_.size() - 1);
        learnts_.push_back(cr);
        attach(cr);
        bump_clause(clauses_[cr]);
        enqueue(learnt[0], cr);
      }
      var_inc_ /= 0.95;
      clause_inc_ /= 0.999;
      if ((stats_.conflicts & 255u) == 0 && out_of_time()) return SatStatus::Unknown;
      continue;
    }

    if (conflicts_here >= conflict_budget) {
      backtrack(0);
      return SatStatus::Unknown;
    }
    if (static_cast<double>(learnts_.size()) - static_cast<double>(trail_.size()) >= max_learnts_) {
      reduce_learnts();
      max_learnts_ *= 1.1;
    }

    Lit next = 0;
    bool decided = false;
    while (static_cast<std::size_t>(decision_level()) < assumptions.size()) {
      Lit a = assumptions[static_cast<std::size_t>(decision_level())];
      if (value(a) == kTrue) {
        trail_lim_.push_back(trail_.size());  // dummy level keeps indices aligned
      } else if (value(a) == kFalse) {
        core = analyze_final(a);
        return SatStatus::Unsat;
      } else {
        next = a;
        decided = true;
        break;
      }
    }
    if (!decided) {
      ++stats_.decisions;
      if ((stats_.decisions & 1023u) == 0 && out_of_time()) return SatStatus::Unknown;
      next = pick_branch();
      if (next == 0) return SatStatus::Sat;
    }
    trail_lim_.push_back(trail_.size());
    enqueue(next, kNoReason);
  }
}

SatResult SatSolver::solve(const std::vector<Literal>& assumptions) {
  SatResult res;
  if (inconsistent_) {
    res.status = SatStatus::Unsat;
    return res;
  }
  Var need = 0;
  for (auto l : assumptions) need = std::max(need, l.var());
  ensure_vars(need);

  std::vector<Lit> assume;
  assume.reserve(assumptions.size());
  for (auto l : assumptions) assume.push_back(to_lit(l));

  SatStatus st = SatStatus::Unknown;
  for (std::uint64_t r = 0; st == SatStatus::Unknown; ++r) {
    if (out_of_time()) break;
    st = search(64 * luby(r), assume, res.core);
    if (st == SatStatus::Unknown) ++stats_.restarts;
  }
  res.status = st;
  if (st == SatStatus::Sat) {
    res.model = PartialAssignment(num_vars_);
    for (Var v = 1; v <= num_vars_; ++v) res.model.set(v, assigns_[v] == kTrue);
  }
  if (st == SatStatus::Unsat && inconsistent_) res.core.clear();
  backtrack(0);
  return res;
}

void SatSolver::heap_insert(Var v) {
  heap_index_[v] = static_cast<int>(heap_.size());
  heap_.push_back(v);
  heap_up(heap_.size() - 1);
}

Var SatSolver::heap_pop() {
  Var top = heap_.front();
  heap_index_[top] = -1;
  Var last = heap_.back();
  heap_.pop_back();
  if (!heap_.empty()) {
    heap_[0] = last;
    heap_index_[last] = 0;
    heap_down(0);
  }
  return top;
}

void SatSolver::heap_up(std::size_t i) {
  Var v = heap_[i];
  while (i > 0) {
    std::size_t parent = (i - 1) / 2;
    if (!heap_before(v, heap_[parent])) break;
    heap_[i] = heap_[parent];
    heap_index_[heap_[i]] = static_cast<int>(i);
    i = parent;
  }
  heap_[i] = v;
  heap_index_[v] = static_cast<int>(i);
}

void SatSolver::heap_down(std::size_t i) {
  Var v = heap_[i];
  for (;;) {
    std::size_t child = 2 * i + 1;
    if (child >= heap_.size()) break;
    if (child + 1 < heap_.size() && heap_before(heap_[child + 1], heap_[child])) ++child;
    if (!heap_before(heap_[child], v)) break;
    heap_[i] = heap_[child];
    heap_index_[heap_[i]] = static_cast<int>(i);
    i = child;
  }
  heap_[i] = v;
  heap_index_[v] = static_cast<int>(i);
}

SatResult solve(const CnfFormula& f, const std::vector<Literal>& assumptions, SolverOptions opts) {
  SatSolver s(f, opts);
  return s.solve(assumptions);
}

std::vector<PartialAssignment> enumerate_models(const CnfFormula& f, std::vector<Var> vars) {
  std::sort(vars.begin(), vars.end());
  vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
  if (vars.size() > 24)
    throw BudgetExceeded("model enumeration limited to 24 variables, got " +
                         std::to_string(vars.size()));
  for (const auto& c : f.clauses)
    for (auto l : c)
      if (!std::binary_search(vars.begin(), vars.end(), l.var()))
        throw std::invalid_argument("variable " + std::to_string(l.var()) +
                                    " occurs in the formula but is not enumerated");

  // clause masks over bit positions; bit (n-1-i) holds vars[i] so that counting
  // upwards is lexicographic with the first variable most significant
  const std::size_t n = vars.size();
  auto bit_of = [&](Var v) {
    auto i = static_cast<std::size_t>(std::lower_bound(vars.begin(), vars.end(), v) - vars.begin());
    return std::uint32_t{1} << (n - 1 - i);
  };
  struct Masks {
    std::uint32_t pos = 0, neg = 0;
  };
  std::vector<Masks> clauses;
  for (const auto& c : f.clauses) {
    if (c.tautological()) continue;
    Masks m;
    for (auto l : c) (l.positive() ? m.pos : m.neg) |= bit_of(l.var());
    clauses.push_back(m);
  }

  Var top = vars.empty() ? 0 : vars.back();
  std::vector<PartialAssignment> out;
  const std::uint64_t limit = std::uint64_t{1} << n;
  for (std::uint64_t bits = 0; bits < limit; ++bits) {
    auto b = static_cast<std::uint32_t>(bits);
    bool ok = std::all_of(clauses.begin(), clauses.end(),
                          [&](const Masks& m) { return (b & m.pos) || (~b & m.neg); });
    if (!ok) continue;
    PartialAssignment a(top);
    for (std::size_t i = 0; i < n; ++i) a.set(vars[i], (b >> (n - 1 - i)) & 1u);
    out.push_back(std::move(a));
  }
  return out;
}

}  // namespace minexp
