// Command-line front end.
//
//   sisdmc check   PROG PROP  [--model sisd|si|sc] [--max-states N]
//                             [--json] [--verify-witness]
//   sisdmc fencins PROG PROP  [--fences full|ll,ss,full|all] [--costs ...]
//                             [--max-states N] [--json]
//   sisdmc litmus  DIR        [--jobs N] [--max-states N] [--json]
//
// Exit codes: check    0 property holds, 1 violated, 2 error or budget
//             fencins  0 success, 3 uncorrectable, 2 error or budget
//             litmus   0 all pass, 1 mismatch, 2 error

#include <atomic>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "sisdmc/fencins.hpp"
#include "sisdmc/lang.hpp"
#include "sisdmc/property.hpp"
#include "sisdmc/reachability.hpp"
#include "sisdmc/semantics.hpp"
#include "sisdmc/trace.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace sisdmc;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Re-throws parse errors with the offending file and position prepended.
template <class F>
auto in_file(const std::string& path, F&& f) {
  try {
    return f();
  } catch (const ParseError& e) {
    throw std::runtime_error(path + ":" + std::to_string(e.line) + ":" +
                             std::to_string(e.col) + ": " + e.what());
  }
}

Program load_program(const std::string& path) {
  return in_file(path, [&] { return parse_program(read_file(path)); });
}

SafetyProperty load_property(const std::string& path, const Program& p) {
  return in_file(path, [&] {
    SafetyProperty sp = parse_property(read_file(path));
    validate_property(sp, p);
    return sp;
  });
}

MemModel parse_model(const std::string& s) {
  auto m = mem_model_from_string(s);
  if (!m) throw std::runtime_error("unknown memory model '" + s + "' (sisd, si, sc)");
  return *m;
}

// "full", "ll,ss,full", "all", or any comma list of fence kind names.
FenceMenu parse_menu(const std::string& s) {
  if (s == "all") return FenceMenu::all();
  FenceMenu menu{false, false, false, false};
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    auto kind = fence_kind_from_string(tok);
    if (!kind) throw std::runtime_error("unknown fence kind '" + tok + "' in --fences");
    switch (*kind) {
      case FenceKind::Fence: menu.fence = true; break;
      case FenceKind::SSFence: menu.ssfence = true; break;
      case FenceKind::LLFence: menu.llfence = true; break;
      case FenceKind::SyncWr: menu.syncwr = true; break;
    }
  }
  return menu;
}

// "overview", "experiments", or "kind=cost,..." overriding the defaults.
CostModel parse_costs(const std::string& s) {
  if (s == "overview") return CostModel::overview();
  if (s == "experiments") return CostModel::experiments();
  CostModel cm;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    auto eq = tok.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("expected kind=cost in --costs, got '" + tok + "'");
    auto kind = fence_kind_from_string(tok.substr(0, eq));
    if (!kind)
      throw std::runtime_error("unknown fence kind '" + tok.substr(0, eq) + "' in --costs");
    int cost = 0;
    try {
      size_t used = 0;
      cost = std::stoi(tok.substr(eq + 1), &used);
      if (used != tok.size() - eq - 1) throw std::invalid_argument("");
    } catch (const std::exception&) {
      throw std::runtime_error("bad cost '" + tok.substr(eq + 1) + "' in --costs");
    }
    switch (*kind) {
      case FenceKind::Fence: cm.fence = cost; break;
      case FenceKind::SSFence: cm.ssfence = cost; break;
      case FenceKind::LLFence: cm.llfence = cost; break;
      case FenceKind::SyncWr: cm.syncwr = cost; break;
    }
  }
  return cm;
}

ordered_json stats_json(const ReachStats& st) {
  return {{"states", st.states}, {"transitions", st.transitions}, {"wall_ms", st.wall_ms}};
}

// ---------------------------------------------------------------------------
// check

int run_check(const std::string& prog_file, const std::string& prop_file, MemModel model,
              uint64_t max_states, bool json, bool verify) {
  Program p = load_program(prog_file);
  SafetyProperty sp = load_property(prop_file, p);
  Machine m(p, model);
  ReachResult r = reachable(m, sp, max_states);

  if (r.witness && verify) {
    if (auto err = verify_witness(m, sp, *r.witness)) {
      std::cerr << "internal error: witness failed replay: " << *err << "\n";
      return 2;
    }
  }

  if (json) {
    ordered_json out;
    out["verdict"] = to_string(r.verdict);
    if (r.witness) {
      ordered_json rj = ordered_json::parse(run_to_json(m, *r.witness));
      out["initial"] = std::move(rj["initial"]);
      out["witness"] = std::move(rj["steps"]);
      if (verify) out["witness_verified"] = true;
    }
    out["stats"] = stats_json(r.stats);
    std::cout << out.dump(2) << "\n";
  } else {
    switch (r.verdict) {
      case ReachVerdict::Unreachable:
        std::cout << "property holds: no bad configuration is reachable\n";
        break;
      case ReachVerdict::Reachable:
        std::cout << "property violated under " << to_string(model) << "; witness run ("
                  << r.witness->steps.size() << " steps):\n"
                  << format_run(m, *r.witness, true);
        if (verify) std::cout << "witness replays correctly\n";
        break;
      case ReachVerdict::BudgetExceeded:
        std::cout << "undecided: state budget of " << max_states << " exhausted\n";
        break;
    }
    std::cout << "states: " << r.stats.states << "  transitions: " << r.stats.transitions
              << "  wall: " << r.stats.wall_ms << " ms\n";
  }

  switch (r.verdict) {
    case ReachVerdict::Unreachable: return 0;
    case ReachVerdict::Reachable: return 1;
    default: return 2;
  }
}

// ---------------------------------------------------------------------------
// fencins

int run_fencins(const std::string& prog_file, const std::string& prop_file,
                const FenceMenu& menu, const CostModel& costs, uint64_t max_states,
                bool json) {
  Program p = load_program(prog_file);
  SafetyProperty sp = load_property(prop_file, p);
  FencinsResult r = fencins(p, sp, menu, costs, max_states);

  if (json) {
    ordered_json out;
    out["verdict"] = to_string(r.status);
    if (r.status == FencinsStatus::Optimal) {
      ordered_json sets = ordered_json::array();
      for (const auto& f : r.optimal) {
        ordered_json one = ordered_json::array();
        for (const auto& c : f)
          one.push_back(ordered_json{{"label", c.label}, {"kind", to_string(c.kind)}});
        sets.push_back(std::move(one));
      }
      out["optimal_sets"] = std::move(sets);
      out["cost"] = r.cost;
    }
    out["stats"] = {{"iterations", r.stats.iterations},
                    {"constraint_sets", r.stats.constraint_sets},
                    {"states", r.stats.states},
                    {"wall_ms", r.stats.wall_ms}};
    std::cout << out.dump(2) << "\n";
  } else {
    switch (r.status) {
      case FencinsStatus::Optimal: {
        if (r.optimal.size() == 1 && r.optimal.begin()->empty()) {
          std::cout << "program already satisfies the property; no fences needed\n";
        } else {
          std::cout << r.optimal.size() << " optimal fence set"
                    << (r.optimal.size() == 1 ? "" : "s") << ", cost " << r.cost
                    << (r.optimal.size() == 1 ? "" : " each") << ":\n";
          for (const auto& f : r.optimal) std::cout << "  " << to_string(f) << "\n";
          std::cout << "\nfenced program (first set):\n"
                    << pretty_print(insert_fences(
                           p, std::vector<FenceConstraint>(r.optimal.begin()->begin(),
                                                           r.optimal.begin()->end())));
        }
        break;
      }
      case FencinsStatus::Uncorrectable:
        std::cout << "uncorrectable: a witness contains no access reordering, so the "
                     "violation persists under sequential consistency and no fence "
                     "placement can remove it\n";
        break;
      case FencinsStatus::BudgetExceeded:
        std::cout << "undecided: state budget of " << max_states
                  << " exhausted during a reachability query\n";
        break;
    }
    std::cout << "iterations: " << r.stats.iterations
              << "  constraint sets: " << r.stats.constraint_sets
              << "  states: " << r.stats.states << "  wall: " << r.stats.wall_ms << " ms\n";
  }

  switch (r.status) {
    case FencinsStatus::Optimal: return 0;
    case FencinsStatus::Uncorrectable: return 3;
    default: return 2;
  }
}

// ---------------------------------------------------------------------------
// litmus

struct LitmusCheck {
  std::string name;
  MemModel model;
  bool expect_sat;
  // filled in by the worker:
  ReachVerdict verdict = ReachVerdict::BudgetExceeded;
  ReachStats stats;
  std::string error;  // nonempty = the check itself failed
};

// A litmus file declares its expected verdicts in a header comment:
//   # expect: sisd=sat sc=unsat
std::vector<std::pair<MemModel, bool>> parse_expectations(const std::string& text,
                                                          const std::string& path) {
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    auto pos = line.find("# expect:");
    if (pos == std::string::npos) continue;
    std::istringstream fields(line.substr(pos + 9));
    std::vector<std::pair<MemModel, bool>> out;
    std::string tok;
    while (fields >> tok) {
      auto eq = tok.find('=');
      if (eq == std::string::npos)
        throw std::runtime_error(path + ": malformed expectation '" + tok + "'");
      auto model = mem_model_from_string(tok.substr(0, eq));
      std::string v = tok.substr(eq + 1);
      if (!model || (v != "sat" && v != "unsat"))
        throw std::runtime_error(path + ": malformed expectation '" + tok + "'");
      out.emplace_back(*model, v == "sat");
    }
    if (out.empty()) throw std::runtime_error(path + ": empty expectation header");
    return out;
  }
  return {};
}

int run_litmus(const std::string& dir, int jobs, uint64_t max_states, bool json) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".sisd")
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());

  struct Case {
    std::string name;
    Program prog;
    SafetyProperty prop;
  };
  std::vector<Case> cases;
  std::vector<LitmusCheck> checks;
  for (const auto& f : files) {
    std::string text = read_file(f.string());
    auto expects = parse_expectations(text, f.string());
    if (expects.empty()) {
      std::cerr << "warning: " << f.string() << " has no '# expect:' header, skipped\n";
      continue;
    }
    fs::path prop_path = f;
    prop_path.replace_extension(".prop");
    if (!fs::exists(prop_path))
      throw std::runtime_error(f.string() + ": missing property file " + prop_path.string());
    Case c;
    c.name = f.stem().string();
    c.prog = in_file(f.string(), [&] { return parse_program(text); });
    c.prop = load_property(prop_path.string(), c.prog);
    size_t idx = cases.size();
    cases.push_back(std::move(c));
    for (auto [model, sat] : expects)
      checks.push_back({cases[idx].name, model, sat, ReachVerdict::BudgetExceeded, {}, ""});
  }

  if (checks.empty()) {
    std::cerr << "warning: no litmus tests found in " << dir << "\n";
    if (json) std::cout << ordered_json{{"verdict", "pass"}, {"tests", ordered_json::array()}}.dump(2) << "\n";
    else std::cout << "0 tests, 0 failures\n";
    return 0;
  }

  auto case_of = [&](const std::string& name) -> const Case& {
    for (const auto& c : cases)
      if (c.name == name) return c;
    throw std::logic_error("unknown case " + name);
  };

  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t i = next.fetch_add(1); i < checks.size(); i = next.fetch_add(1)) {
      LitmusCheck& chk = checks[i];
      try {
        const Case& c = case_of(chk.name);
        ReachResult r = reachable(c.prog, c.prop, chk.model, max_states);
        chk.verdict = r.verdict;
        chk.stats = r.stats;
      } catch (const std::exception& e) {
        chk.error = e.what();
      }
    }
  };
  jobs = std::max(1, std::min<int>(jobs, (int)checks.size()));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  int failures = 0;
  bool errors = false;
  ordered_json rows = ordered_json::array();
  std::ostringstream table;
  table << std::left << std::setw(12) << "test" << std::setw(6) << "model" << std::setw(8)
        << "expect" << std::setw(8) << "actual" << "result\n";
  for (const auto& chk : checks) {
    std::string expect = chk.expect_sat ? "sat" : "unsat";
    std::string actual, result;
    if (!chk.error.empty()) {
      actual = "error";
      result = "ERROR";
      errors = true;
    } else if (chk.verdict == ReachVerdict::BudgetExceeded) {
      actual = "budget";
      result = "ERROR";
      errors = true;
    } else {
      actual = chk.verdict == ReachVerdict::Reachable ? "sat" : "unsat";
      result = actual == expect ? "PASS" : "FAIL";
      if (result == "FAIL") ++failures;
    }
    table << std::left << std::setw(12) << chk.name << std::setw(6) << to_string(chk.model)
          << std::setw(8) << expect << std::setw(8) << actual << result << "\n";
    rows.push_back(ordered_json{{"name", chk.name},
                                {"model", to_string(chk.model)},
                                {"expect", expect},
                                {"actual", actual},
                                {"ok", result == "PASS"}});
    if (!chk.error.empty()) std::cerr << "error: " << chk.name << ": " << chk.error << "\n";
  }

  if (json) {
    ordered_json out;
    out["verdict"] = errors ? "error" : (failures ? "fail" : "pass");
    out["tests"] = std::move(rows);
    std::cout << out.dump(2) << "\n";
  } else {
    std::cout << table.str() << checks.size() << " checks, " << failures << " failure"
              << (failures == 1 ? "" : "s") << "\n";
  }
  return errors ? 2 : (failures ? 1 : 0);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"model checker and optimal fence synthesizer for programs under "
               "self-invalidation/self-downgrade cache coherence"};
  app.require_subcommand(1);

  std::string prog_file, prop_file, dir;
  std::string model_s = "sisd", fences_s = "full", costs_s = "overview";
  uint64_t max_states = kDefaultMaxStates;
  bool json = false, verify = false;
  int jobs = 1;

  CLI::App* check = app.add_subcommand("check", "decide whether a bad configuration is reachable");
  check->add_option("program", prog_file, "program file")->required();
  check->add_option("property", prop_file, "safety property file")->required();
  check->add_option("--model", model_s, "memory model: sisd, si, sc")
      ->default_str("sisd");
  check->add_option("--max-states", max_states, "state budget for the search");
  check->add_flag("--json", json, "machine-readable output");
  check->add_flag("--verify-witness", verify, "replay the witness through the semantics");

  CLI::App* fenc = app.add_subcommand("fencins", "synthesize all cost-optimal fence sets");
  fenc->add_option("program", prog_file, "program file")->required();
  fenc->add_option("property", prop_file, "safety property file")->required();
  fenc->add_option("--fences", fences_s,
                   "fence kinds the synthesizer may insert: full | ll,ss,full | all")
      ->default_str("full");
  fenc->add_option("--costs", costs_s, "cost model: overview | experiments | kind=cost,...")
      ->default_str("overview");
  fenc->add_option("--max-states", max_states, "state budget per reachability query");
  fenc->add_flag("--json", json, "machine-readable output");

  CLI::App* litmus = app.add_subcommand("litmus", "run a directory of litmus tests");
  litmus->add_option("dir", dir, "directory of .sisd programs with .prop siblings")
      ->required()
      ->check(CLI::ExistingDirectory);
  litmus->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
  litmus->add_option("--max-states", max_states, "state budget per check");
  litmus->add_flag("--json", json, "machine-readable output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*check) return run_check(prog_file, prop_file, parse_model(model_s), max_states, json, verify);
    if (*fenc)
      return run_fencins(prog_file, prop_file, parse_menu(fences_s), parse_costs(costs_s),
                         max_states, json);
    if (*litmus) return run_litmus(dir, jobs, max_states, json);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
