#include "sisdmc/reachability.hpp"

#include <algorithm>
#include <chrono>
#include <unordered_set>

namespace sisdmc {

const char* to_string(ReachVerdict v) {
  switch (v) {
    case ReachVerdict::Unreachable: return "unreachable";
    case ReachVerdict::Reachable: return "reachable";
    case ReachVerdict::BudgetExceeded: return "budget-exceeded";
  }
  return "?";
}

namespace {

// The search owns one flat arena of discovered configurations (stride Words
// each) and dedupes through an index set hashing into the arena. Appending a
// candidate at the tail and popping it again on a duplicate keeps the hot
// path allocation-free.
struct Arena {
  std::vector<Word> words;
  int stride;

  const Word* at(uint32_t i) const { return words.data() + (size_t)i * stride; }
  uint32_t size() const { return (uint32_t)(words.size() / stride); }
};

struct ArenaHash {
  const Arena* a;
  size_t operator()(uint32_t i) const {
    const Word* p = a->at(i);
    uint64_t h = 1469598103934665603ull;  // FNV-1a over the raw slots
    for (int k = 0; k < a->stride; ++k) {
      h ^= (uint16_t)p[k];
      h *= 1099511628211ull;
    }
    return (size_t)h;
  }
};

struct ArenaEq {
  const Arena* a;
  bool operator()(uint32_t x, uint32_t y) const {
    return std::equal(a->at(x), a->at(x) + a->stride, a->at(y));
  }
};

struct Search {
  const Machine& m;
  uint64_t cap;
  Arena arena;
  std::vector<int32_t> parent;     // -1 for initial configurations
  std::vector<Transition> via;
  std::unordered_set<uint32_t, ArenaHash, ArenaEq> seen;
  uint64_t transitions = 0;

  Search(const Machine& m_, uint64_t cap_)
      : m(m_), cap(cap_), arena{{}, m_.stride()},
        seen(64, ArenaHash{&arena}, ArenaEq{&arena}) {}

  // Returns the index if the configuration at the arena tail is new,
  // nullopt if it duplicates an existing state (tail is popped).
  std::optional<uint32_t> commit_tail() {
    uint32_t idx = arena.size() - 1;
    auto [it, fresh] = seen.insert(idx);
    if (!fresh) {
      arena.words.resize(arena.words.size() - arena.stride);
      return std::nullopt;
    }
    return idx;
  }

  WitnessRun reconstruct(uint32_t idx) const {
    std::vector<uint32_t> chain{idx};
    while (parent[chain.back()] >= 0) chain.push_back((uint32_t)parent[chain.back()]);
    std::reverse(chain.begin(), chain.end());
    WitnessRun run;
    run.initial.assign(arena.at(chain[0]), arena.at(chain[0]) + arena.stride);
    for (size_t i = 1; i < chain.size(); ++i)
      run.steps.emplace_back(via[chain[i]],
                             Config(arena.at(chain[i]), arena.at(chain[i]) + arena.stride));
    return run;
  }
};

}  // namespace

ReachResult reachable(const Machine& m, const SafetyProperty& bad, uint64_t max_states) {
  auto t0 = std::chrono::steady_clock::now();
  CompiledProperty prop(bad, m);
  Search s(m, max_states);

  auto finish = [&](ReachVerdict v, std::optional<WitnessRun> w) {
    ReachResult r;
    r.verdict = v;
    r.witness = std::move(w);
    r.stats.states = s.arena.size();
    r.stats.transitions = s.transitions;
    r.stats.wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return r;
  };

  for (const Config& c : m.initial_configurations()) {
    s.arena.words.insert(s.arena.words.end(), c.begin(), c.end());
    auto idx = s.commit_tail();
    if (!idx) continue;
    s.parent.push_back(-1);
    s.via.push_back({});
    if (prop.eval(c)) return finish(ReachVerdict::Reachable, s.reconstruct(*idx));
    if (s.arena.size() > max_states) return finish(ReachVerdict::BudgetExceeded, std::nullopt);
  }

  std::vector<Transition> ts;
  for (uint32_t head = 0; head < s.arena.size(); ++head) {
    ts.clear();
    // arena data may move while successors are appended; take a stable copy.
    Config cur(s.arena.at(head), s.arena.at(head) + s.arena.stride);
    m.enabled_transitions(cur, ts);
    for (Transition t : ts) {
      ++s.transitions;
      size_t tail = s.arena.words.size();
      s.arena.words.resize(tail + s.arena.stride);
      m.apply_into(cur, t, std::span<Word>(s.arena.words.data() + tail, s.arena.stride));
      auto idx = s.commit_tail();
      if (!idx) continue;
      s.parent.push_back((int32_t)head);
      s.via.push_back(t);
      if (prop.eval(std::span<const Word>(s.arena.at(*idx), s.arena.stride)))
        return finish(ReachVerdict::Reachable, s.reconstruct(*idx));
      if (s.arena.size() > max_states)
        return finish(ReachVerdict::BudgetExceeded, std::nullopt);
    }
  }
  return finish(ReachVerdict::Unreachable, std::nullopt);
}

bool for_each_reachable(const Machine& m, uint64_t max_states,
                        const std::function<void(std::span<const Word>)>& visit) {
  Search s(m, max_states);
  for (const Config& c : m.initial_configurations()) {
    s.arena.words.insert(s.arena.words.end(), c.begin(), c.end());
    if (s.commit_tail() && s.arena.size() > max_states) return false;
  }
  std::vector<Transition> ts;
  for (uint32_t head = 0; head < s.arena.size(); ++head) {
    ts.clear();
    Config cur(s.arena.at(head), s.arena.at(head) + s.arena.stride);
    visit(cur);
    m.enabled_transitions(cur, ts);
    for (Transition t : ts) {
      size_t tail = s.arena.words.size();
      s.arena.words.resize(tail + s.arena.stride);
      m.apply_into(cur, t, std::span<Word>(s.arena.words.data() + tail, s.arena.stride));
      if (s.commit_tail() && s.arena.size() > max_states) return false;
    }
  }
  return true;
}

std::optional<std::string> verify_witness(const Machine& m, const SafetyProperty& bad,
                                          const WitnessRun& run) {
  auto inits = m.initial_configurations();
  if (std::find(inits.begin(), inits.end(), run.initial) == inits.end())
    return "witness does not start in an initial configuration";
  const Config* cur = &run.initial;
  for (size_t i = 0; i < run.steps.size(); ++i) {
    const auto& [t, after] = run.steps[i];
    if (!m.is_enabled(*cur, t))
      return "step " + std::to_string(i) + " (" + m.format(t) + ") is not enabled";
    Config next = m.apply_transition(*cur, t);
    if (next != after)
      return "step " + std::to_string(i) + " (" + m.format(t) +
             ") does not produce the recorded configuration";
    cur = &after;
  }
  if (!eval_property(bad, m, *cur)) return "final configuration does not satisfy the property";
  return std::nullopt;
}

}  // namespace sisdmc
