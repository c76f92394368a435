#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "esp/biaxial_fd.hpp"

namespace ellspec {

// Fully resolved invocation: every field that influences the output is in
// here, so equal RunConfigs produce byte-identical output files.
struct RunConfig {
  std::string command;

  bool has_axes = false;
  double axes[3] = {1.0, 1.0, 1.0};

  bool has_perturb = false;
  double perturb[4] = {0.0, 0.0, 0.0, 0.0};  // alpha, beta, gamma, eps

  std::vector<double> eps_list;  // empty -> per-command default

  int grid = 0;       // FD mesh size / nodal raster rows; 0 -> default
  int lmax = 0;       // spectral truncation / level cap; 0 -> default
  int mmax = 5;       // azimuthal range for the biaxial sweep
  int jobs = 1;       // worker threads (order-deterministic assembly)
  std::uint64_t seed = 12345;  // randomized verification draws

  std::string format = "csv";  // csv | json
  std::string out;             // output path; "" -> "<command>.<format>",
                               // "-" -> stdout
  esp::PoleBc pole_bc = esp::PoleBc::AUTO;
};

// Runs cfg.command and writes its table (plus the timing sidecar when the
// destination is a real file).  Returns the process exit code: 0 on
// success, 3 when `verify` found failing checks.  Invalid configurations
// throw esp::domain_error (exit 1) and numerical breakdowns throw
// esp::numerical_error (exit 2); the CLI entry point maps them.
int run_command(const RunConfig& cfg);

}  // namespace ellspec
