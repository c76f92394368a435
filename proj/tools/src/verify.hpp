#pragma once

#include "commands.hpp"
#include "output.hpp"

namespace ellspec {

// Runs the self-verification suite (quadrature oracles, closed-form
// reference values, solver cross-checks, nodal-count cross-validation),
// printing one PASS/FAIL line per check to stdout.  Fills `table` (check,
// status, detail) for optional file output and returns the number of failed
// checks.  Randomized draws come from cfg.seed, so reruns are byte-identical.
int run_verify_checks(const RunConfig& cfg, OutputTable* table);

}  // namespace ellspec
