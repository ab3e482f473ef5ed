#pragma once

// Exact minimum-cost hitting sets. Small instances only (the fence synthesis
// loop generates families of a few dozen sets over a universe of at most a
// few hundred constraints), so a branch-and-bound search that enumerates
// every cost-optimal solution is both simple and fast enough.

#include <algorithm>
#include <limits>
#include <set>
#include <stdexcept>
#include <vector>

namespace sisdmc {

// All hitting sets T of `family` (T intersects every member) minimizing the
// summed element cost. Costs must be strictly positive, which makes every
// cost-optimal hitting set inclusion-minimal. hits({}) = { {} }.
//
// Enumeration is the classic branching on the first unhit set: for elements
// e1..ek of that set, branch j takes ej and bans e1..e(j-1) from the subtree,
// so every hitting set is visited at most once. Branches whose cost plus a
// disjoint-sets lower bound exceed the best known cost are pruned (ties kept,
// since all optima are wanted).
template <class T, class CostFn>
std::set<std::set<T>> hits(const std::vector<std::set<T>>& family, CostFn cost) {
  for (const auto& s : family)
    if (s.empty()) throw std::invalid_argument("hits: family contains an empty set");

  std::vector<std::vector<T>> sets;
  sets.reserve(family.size());
  for (const auto& s : family) sets.emplace_back(s.begin(), s.end());

  long best = std::numeric_limits<long>::max();
  std::set<std::set<T>> sols;
  std::vector<T> chosen;
  std::set<T> banned;

  auto is_hit = [&](const std::vector<T>& s) {
    for (const T& e : s)
      if (std::binary_search(chosen.begin(), chosen.end(), e)) return true;
    return false;
  };

  // Cheapest still-allowed element of each unhit set, summed over a greedily
  // chosen pairwise-disjoint subfamily: a valid lower bound on the cost still
  // to pay. Returns max() when some unhit set is entirely banned.
  auto lower_bound = [&]() -> long {
    long lb = 0;
    std::set<T> touched;
    for (const auto& s : sets) {
      if (is_hit(s)) continue;
      long cheapest = std::numeric_limits<long>::max();
      bool disjoint = true;
      for (const T& e : s) {
        if (touched.count(e)) disjoint = false;
        if (!banned.count(e)) cheapest = std::min(cheapest, (long)cost(e));
      }
      if (cheapest == std::numeric_limits<long>::max()) return cheapest;  // dead branch
      if (!disjoint) continue;
      lb += cheapest;
      touched.insert(s.begin(), s.end());
    }
    return lb;
  };

  long cur_cost = 0;
  auto dfs = [&](auto&& self) -> void {
    long lb = lower_bound();
    if (lb == std::numeric_limits<long>::max() || cur_cost + lb > best) return;
    const std::vector<T>* open = nullptr;
    for (const auto& s : sets)
      if (!is_hit(s)) {
        open = &s;
        break;
      }
    if (!open) {
      if (cur_cost < best) {
        best = cur_cost;
        sols.clear();
      }
      if (cur_cost == best) sols.insert(std::set<T>(chosen.begin(), chosen.end()));
      return;
    }
    std::vector<T> newly_banned;
    for (const T& e : *open) {
      if (banned.count(e)) continue;
      chosen.insert(std::upper_bound(chosen.begin(), chosen.end(), e), e);
      cur_cost += cost(e);
      self(self);
      cur_cost -= cost(e);
      chosen.erase(std::find(chosen.begin(), chosen.end(), e));
      banned.insert(e);
      newly_banned.push_back(e);
    }
    for (const T& e : newly_banned) banned.erase(e);
  };
  dfs(dfs);
  return sols;
}

}  // namespace sisdmc
