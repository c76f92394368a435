// ellspec: eigenvalues of near-sphere ellipsoids from the command line.
//
// Exit codes: 0 success, 1 usage error, 2 numerical failure, 3 verification
// failure.  Identical invocations (including --seed) produce byte-identical
// output files; wall-clock time lives in the `<out>.meta.json` sidecar only.

#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "commands.hpp"
#include "esp/errors.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Laplace-Beltrami spectra of near-sphere ellipsoids"};
  app.require_subcommand(1);

  ellspec::RunConfig cfg;
  std::vector<double> axes, perturb, eps;
  std::string pole_bc = "auto";

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--axes", axes, "semi-axes a,b,c")
        ->delimiter(',')
        ->expected(3);
    sub->add_option("--perturb", perturb,
                    "perturbation direction and size alpha,beta,gamma,eps")
        ->delimiter(',')
        ->expected(4);
    sub->add_option("--eps", eps, "perturbation sizes (comma separated)")
        ->delimiter(',');
    sub->add_option("--grid", cfg.grid, "mesh size (FD grid / nodal raster rows)");
    sub->add_option("--lmax", cfg.lmax, "spectral truncation degree / level cap");
    sub->add_option("--mmax", cfg.mmax, "largest azimuthal order (sweep-biaxial)");
    sub->add_option("--jobs", cfg.jobs, "worker threads (output-invariant)");
    sub->add_option("--format", cfg.format, "output format: csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--out", cfg.out, "output path; '-' writes to stdout");
    sub->add_option("--seed", cfg.seed, "seed for randomized verification draws");
    sub->add_option("--pole-bc", pole_bc, "pole treatment: neumann or auto")
        ->check(CLI::IsMember({"neumann", "auto"}));
  };

  add_common(app.add_subcommand(
      "table1", "biaxial slope study: closed-form vs finite differences"));
  add_common(app.add_subcommand(
      "table2", "triaxial level-1/2 clusters: Galerkin slopes vs closed form"));
  add_common(app.add_subcommand(
      "sweep-biaxial", "eigenvalue branches of (1,1,b) over a log b grid"));
  add_common(app.add_subcommand(
      "nodal", "nodal-domain counts of first-order eigenfunctions"));
  add_common(app.add_subcommand("verify", "run the self-verification suite"));
  add_common(app.add_subcommand(
      "spectrum", "lowest eigenvalues of one ellipsoid (Galerkin)"));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);  // prints help or the parse diagnostic
    return code == 0 ? 0 : 1;
  }

  cfg.command = app.get_subcommands().front()->get_name();
  if (!axes.empty()) {
    cfg.has_axes = true;
    for (int i = 0; i < 3; ++i) cfg.axes[i] = axes[static_cast<size_t>(i)];
  }
  if (!perturb.empty()) {
    cfg.has_perturb = true;
    for (int i = 0; i < 4; ++i) cfg.perturb[i] = perturb[static_cast<size_t>(i)];
  }
  cfg.eps_list = eps;
  cfg.pole_bc = pole_bc == "neumann" ? esp::PoleBc::NEUMANN : esp::PoleBc::AUTO;
  if (cfg.jobs < 1) {
    std::fprintf(stderr, "ellspec: --jobs must be at least 1\n");
    return 1;
  }

  try {
    return ellspec::run_command(cfg);
  } catch (const esp::domain_error& e) {
    std::fprintf(stderr, "ellspec: invalid request: %s\n", e.what());
    return 1;
  } catch (const esp::numerical_error& e) {
    std::fprintf(stderr, "ellspec: numerical failure: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "ellspec: error: %s\n", e.what());
    return 2;
  }
}
