#include "minexp/hitting_set.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace minexp {

void SetSystem::add(std::vector<std::uint32_t> set) {
  std::sort(set.begin(), set.end());
  set.erase(std::unique(set.begin(), set.end()), set.end());
  for (auto c : set) num_candidates = std::max(num_candidates, c + 1);
  sets.push_back(std::move(set));
}

namespace {

struct Reduced {
  std::uint32_t n = 0;
  std::vector<std::vector<std::uint32_t>> sets;
  std::vector<std::vector<std::uint32_t>> occurs;  // candidate -> set ids
  bool infeasible = false;
};

// Restrict to allowed candidates, drop duplicate and superset sets.
Reduced reduce(const SetSystem& sys, const std::vector<bool>& allowed) {
  Reduced r;
  r.n = sys.num_candidates;
  std::vector<std::vector<std::uint32_t>> sets;
  for (const auto& s : sys.sets) {
    std::vector<std::uint32_t> t;
    for (auto c : s)
      if (allowed.empty() || (c < allowed.size() && allowed[c])) t.push_back(c);
    if (t.empty()) {
      r.infeasible = true;
      return r;
    }
    sets.push_back(std::move(t));
  }
  std::sort(sets.begin(), sets.end(), [](const auto& a, const auto& b) {
    return a.size() != b.size() ? a.size() < b.size() : a < b;
  });
  sets.erase(std::unique(sets.begin(), sets.end()), sets.end());
  for (const auto& s : sets) {
    bool dominated = std::any_of(r.sets.begin(), r.sets.end(), [&](const auto& kept) {
      return std::includes(s.begin(), s.end(), kept.begin(), kept.end());
    });
    if (!dominated) r.sets.push_back(s);
  }
  r.occurs.assign(r.n, {});
  for (std::uint32_t i = 0; i < r.sets.size(); ++i)
    for (auto c : r.sets[i]) r.occurs[c].push_back(i);
  return r;
}

class Search {
 public:
  Search(const Reduced& r, std::optional<Clock::time_point> deadline)
      : r_(r), deadline_(deadline), hits_(r.sets.size(), 0), excluded_(r.n, 0), mark_(r.n, 0) {}

  bool timed_out() const { return timed_out_; }
  std::uint64_t nodes() const { return nodes_; }

  void choose(std::uint32_t c) {
    chosen_.push_back(c);
    for (auto s : r_.occurs[c]) ++hits_[s];
  }
  void unchoose() {
    auto c = chosen_.back();
    chosen_.pop_back();
    for (auto s : r_.occurs[c]) --hits_[s];
  }

  bool tick() {
    if ((++nodes_ & 1023u) == 0 && deadline_ && Clock::now() >= *deadline_) timed_out_ = true;
    return !timed_out_;
  }

  // Greedy packing of pairwise-disjoint open sets; candidates usable when
  // not excluded and, if `above` is set, greater than it.
  std::size_t packing_bound(std::optional<std::uint32_t> above) {
    std::vector<std::pair<std::size_t, std::uint32_t>> open;
    for (std::uint32_t i = 0; i < r_.sets.size(); ++i)
      if (!hits_[i]) open.push_back({usable_count(i, above), i});
    std::sort(open.begin(), open.end());
    ++epoch_;
    std::size_t bound = 0;
    for (auto [cnt, i] : open) {
      if (cnt == 0) return std::numeric_limits<std::size_t>::max() / 2;
      bool disjoint = true;
      for (auto c : r_.sets[i])
        if (usable(c, above) && mark_[c] == epoch_) {
          disjoint = false;
          break;
        }
      if (!disjoint) continue;
      ++bound;
      for (auto c : r_.sets[i])
        if (usable(c, above)) mark_[c] = epoch_;
    }
    return bound;
  }

  bool usable(std::uint32_t c, std::optional<std::uint32_t> above) const {
    return !excluded_[c] && (!above || c > *above);
  }
  std::size_t usable_count(std::uint32_t set, std::optional<std::uint32_t> above) const {
    std::size_t n = 0;
    for (auto c : r_.sets[set]) n += usable(c, above);
    return n;
  }
  std::size_t gain(std::uint32_t c) const {
    std::size_t g = 0;
    for (auto s : r_.occurs[c]) g += hits_[s] == 0;
    return g;
  }

  // --- minimum cardinality ---
  void minimize(std::size_t& best_size, std::vector<std::uint32_t>& best) {
    if (!tick()) return;
    if (chosen_.size() >= best_size) return;
    std::optional<std::uint32_t> pick;
    std::size_t fewest = std::numeric_limits<std::size_t>::max();
    for (std::uint32_t i = 0; i < r_.sets.size(); ++i) {
      if (hits_[i]) continue;
      std::size_t cnt = usable_count(i, std::nullopt);
      if (cnt < fewest) {
        fewest = cnt;
        pick = i;
      }
    }
    if (!pick) {
      best_size = chosen_.size();
      best = chosen_;
      return;
    }
    if (fewest == 0) return;
    if (chosen_.size() + packing_bound(std::nullopt) >= best_size) return;

    std::vector<std::uint32_t> order;
    for (auto c : r_.sets[*pick])
      if (!excluded_[c]) order.push_back(c);
    std::stable_sort(order.begin(), order.end(),
                     [&](auto a, auto b) { return gain(a) > gain(b); });
    std::vector<std::uint32_t> newly_excluded;
    for (auto c : order) {
      choose(c);
      minimize(best_size, best);
      unchoose();
      if (timed_out_) break;
      excluded_[c] = 1;
      newly_excluded.push_back(c);
    }
    for (auto c : newly_excluded) excluded_[c] = 0;
  }

  // --- lexicographically first of size k ---
  bool lex_first(std::size_t k, std::optional<std::uint32_t> last, const std::vector<bool>& allowed) {
    if (!tick()) return false;
    bool all_hit = true;
    std::uint32_t hi = r_.n;  // next pick must be < hi
    for (std::uint32_t i = 0; i < r_.sets.size(); ++i) {
      if (hits_[i]) continue;
      all_hit = false;
      const auto& s = r_.sets[i];
      auto it = last ? std::upper_bound(s.begin(), s.end(), *last) : s.begin();
      if (it == s.end()) return false;
      hi = std::min(hi, s.back() + 1);
    }
    if (all_hit) return true;
    std::size_t remaining = k - chosen_.size();
    if (remaining == 0) return false;
    if (packing_bound(last) > remaining) return false;
    std::uint32_t from = last ? *last + 1 : 0;
    for (std::uint32_t c = from; c < hi; ++c) {
      if ((!allowed.empty() && !allowed[c]) || gain(c) == 0) continue;
      choose(c);
      if (lex_first(k, c, allowed)) return true;
      unchoose();
      if (timed_out_) return false;
    }
    return false;
  }

  const std::vector<std::uint32_t>& chosen() const { return chosen_; }

 private:
  const Reduced& r_;
  std::optional<Clock::time_point> deadline_;
  std::vector<std::uint32_t> hits_;
  std::vector<char> excluded_;
  std::vector<std::uint64_t> mark_;
  std::uint64_t epoch_ = 0;
  std::vector<std::uint32_t> chosen_;
  std::uint64_t nodes_ = 0;
  bool timed_out_ = false;
};

}  // namespace

std::optional<std::vector<std::uint32_t>> greedy_hitting_set(const SetSystem& sys,
                                                             const std::vector<bool>& allowed) {
  Reduced r = reduce(sys, allowed);
  if (r.infeasible) return std::nullopt;
  std::vector<char> hit(r.sets.size(), 0);
  std::size_t open = r.sets.size();
  std::vector<std::uint32_t> out;
  while (open > 0) {
    std::uint32_t best_c = 0;
    std::size_t best_gain = 0;
    for (std::uint32_t c = 0; c < r.n; ++c) {
      std::size_t g = 0;
      for (auto s : r.occurs[c]) g += !hit[s];
      if (g > best_gain) {
        best_gain = g;
        best_c = c;
      }
    }
    out.push_back(best_c);
    for (auto s : r.occurs[best_c])
      if (!hit[s]) {
        hit[s] = 1;
        --open;
      }
  }
  std::sort(out.begin(), out.end());
  return out;
}

HittingSetResult minimum_hitting_set(const SetSystem& sys, const HittingSetOptions& opts) {
  HittingSetResult res;
  Reduced r = reduce(sys, opts.allowed);
  if (r.infeasible) return res;

  Search search(r, opts.deadline);
  res.lower_bound = search.packing_bound(std::nullopt);
  if (res.lower_bound > opts.limit) return res;

  std::size_t best_size = opts.limit == std::numeric_limits<std::size_t>::max() ? opts.limit
                                                                               : opts.limit + 1;
  std::vector<std::uint32_t> best;
  if (auto g = greedy_hitting_set(sys, opts.allowed); g && g->size() < best_size) {
    best = *g;
    best_size = g->size();
  }
  search.minimize(best_size, best);
  res.nodes = search.nodes();
  std::sort(best.begin(), best.end());
  bool found = best_size <= opts.limit && best.size() == best_size;
  if (search.timed_out()) {
    res.status = SearchStatus::Timeout;
    if (found) res.best = best;
    return res;
  }
  if (!found) return res;
  res.status = SearchStatus::Optimal;
  res.best = std::move(best);
  res.lower_bound = res.best.size();
  return res;
}

HittingSetResult lex_first_hitting_set(const SetSystem& sys, std::size_t k,
                                       const HittingSetOptions& opts) {
  HittingSetResult res;
  Reduced r = reduce(sys, opts.allowed);
  if (r.infeasible) return res;
  Search search(r, opts.deadline);
  bool ok = search.lex_first(k, std::nullopt, opts.allowed);
  res.nodes = search.nodes();
  if (search.timed_out()) {
    res.status = SearchStatus::Timeout;
    return res;
  }
  if (!ok) return res;
  res.status = SearchStatus::Optimal;
  res.best = search.chosen();
  res.lower_bound = res.best.size();
  return res;
}

}  // namespace minexp
