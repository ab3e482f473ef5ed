#pragma once

// Presentation helpers for witness runs: the compact textual form used by
// the CLI and the JSON serialization.

#include <string>

#include "sisdmc/reachability.hpp"

namespace sisdmc {

// One folded transition per line. Folding shorthand:
//   - a fetch immediately consumed by the same process's next instruction on
//     the same variable collapses into that instruction, marked "L4*";
//   - a wrllc immediately followed by the matching evict prints "evict*(p,x)".
// With with_configs, each line also shows the configuration reached.
std::string format_run(const Machine& m, const WitnessRun& run, bool with_configs = false);

// JSON text (2-space indent). Schema:
//   config: {"llc":{var:val,...},
//            "procs":[{"pid","pc","regs":{...},"l1":{var:{"status","value"}}}]}
//   run:    {"initial":<config>, "steps":[{"t":"L4"|"fetch(P1,z)","c":<config>}...]}
std::string config_to_json(const Machine& m, std::span<const Word> c, int indent = 2);
std::string run_to_json(const Machine& m, const WitnessRun& run, int indent = 2);

}  // namespace sisdmc
