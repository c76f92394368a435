#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "esp/errors.hpp"
#include "esp/galerkin.hpp"
#include "esp/geometry.hpp"
#include "esp/nodal.hpp"
#include "esp/perturbation.hpp"
#include "output.hpp"
#include "verify.hpp"

namespace ellspec {
namespace {

std::string fmt_int(long long v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%lld", v);
  return buf;
}

std::string fmt_uint(unsigned long long v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%llu", v);
  return buf;
}

std::string join17(const std::vector<double>& v) {
  std::string s;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) s += ",";
    s += fmt17(v[i]);
  }
  return s;
}

const char* pole_bc_name(esp::PoleBc bc) {
  return bc == esp::PoleBc::NEUMANN ? "neumann" : "auto";
}

// Runs body(0..n-1) on `jobs` workers.  Each task writes only into its own
// preassigned slot, so results are identical for every jobs value; the
// first exception (if any) is rethrown on the calling thread.
void parallel_for(int n, int jobs, const std::function<void(int)>& body) {
  jobs = std::max(1, std::min(jobs, n));
  if (jobs <= 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(jobs));
  for (int w = 0; w < jobs; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const int i = next.fetch_add(1);
        if (i >= n) break;
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

void echo_common(OutputTable& t, const RunConfig& cfg) {
  t.meta.emplace_back("jobs", fmt_int(cfg.jobs));
  t.meta.emplace_back("seed", fmt_uint(cfg.seed));
  t.meta.emplace_back("format", cfg.format);
}

// ---------------------------------------------------------------------------
// table1: biaxial slopes (alpha, beta, gamma) = (0, 0, 1), axes (1, 1, 1+eps).
// Rows follow the fixed (m, l) list, each expanded over the eps list, and
// compare the finite-difference eigenvalue slope against the closed-form
// first-order correction.
// ---------------------------------------------------------------------------
OutputTable cmd_table1(const RunConfig& cfg) {
  std::vector<double> eps = cfg.eps_list;
  if (eps.empty()) eps = {0.1, 0.05};
  for (double e : eps) {
    if (e == 0.0)
      throw esp::domain_error("table1: eps = 0 leaves the slope undefined");
  }
  const int N = cfg.grid > 0 ? cfg.grid : 400;

  struct RowSpec {
    int m, l;
  };
  static const RowSpec kRows[] = {{0, 1}, {0, 2}, {0, 3}, {1, 1}, {1, 2},
                                  {1, 3}, {2, 2}, {2, 3}, {3, 3}};
  const int nr = static_cast<int>(sizeof kRows / sizeof kRows[0]);
  const int ne = static_cast<int>(eps.size());

  std::vector<double> numeric(static_cast<size_t>(nr) * ne, 0.0);
  parallel_for(nr * ne, cfg.jobs, [&](int idx) {
    const RowSpec rs = kRows[idx / ne];
    const double e = eps[idx % ne];
    const auto spec = esp::EllipsoidSpec::from_perturbation(0.0, 0.0, 1.0, e);
    // Index of the level-l eigenvalue inside the order-m branch: the branch
    // holds levels l = m, m+1, ... (for m = 0 that list starts with the
    // constant mode at l = 0), so level l sits at position l - m.
    const int k = rs.l - rs.m + 1;
    const auto res = esp::solve_biaxial_fd(spec, rs.m, N, k, cfg.pole_bc);
    numeric[idx] = res.values.back();
  });

  OutputTable t;
  t.command = "table1";
  t.meta.emplace_back("perturbation", "alpha=0 beta=0 gamma=1 (axes 1,1,1+eps)");
  t.meta.emplace_back("eps", join17(eps));
  t.meta.emplace_back("grid", fmt_int(N));
  t.meta.emplace_back("pole_bc", pole_bc_name(cfg.pole_bc));
  echo_common(t, cfg);
  t.meta.emplace_back("slope_definition", "(lambda_numeric - l(l+1)) / eps");
  t.meta.emplace_back("rel_err_definition",
                      "100 * |slope - lambda1| / |lambda1|");
  t.columns = {"m",   "lambda0",        "lambda1", "eps",
               "lambda_numeric", "slope",   "rel_err_percent"};
  for (int r = 0; r < nr; ++r) {
    const int m = kRows[r].m, l = kRows[r].l;
    const double lambda0 = static_cast<double>(l) * (l + 1);
    const double lambda1 = esp::biaxial_lambda1(l, m, 0.0, 1.0);
    for (int e = 0; e < ne; ++e) {
      const double num = numeric[static_cast<size_t>(r) * ne + e];
      const double slope = (num - lambda0) / eps[e];
      const double err = 100.0 * std::fabs(slope - lambda1) / std::fabs(lambda1);
      t.rows.push_back({fmt_int(m), fmt17(lambda0), fmt17(lambda1),
                        fmt17(eps[e]), fmt17(num), fmt17(slope), fmt17(err)});
    }
  }
  return t;
}

// ---------------------------------------------------------------------------
// table2: Galerkin eigenvalues of the level-1 and level-2 clusters for the
// triaxial direction (0, 1, -1) at three halving eps values, with per-rank
// slopes, Richardson extrapolation and the closed-form corrections.
// ---------------------------------------------------------------------------
OutputTable cmd_table2(const RunConfig& cfg) {
  double al = 0.0, be = 1.0, ga = -1.0;
  if (cfg.has_perturb) {
    al = cfg.perturb[0];
    be = cfg.perturb[1];
    ga = cfg.perturb[2];
  }
  std::vector<double> eps = cfg.eps_list;
  if (eps.empty()) eps = {0.2, 0.1, 0.05};
  if (eps.size() != 3 || eps[0] <= 0.0)
    throw esp::domain_error(
        "table2: needs exactly three positive eps values e, e/2, e/4");
  for (int i = 0; i + 1 < 3; ++i) {
    if (std::fabs(eps[i + 1] - 0.5 * eps[i]) > 1e-12 * eps[i])
      throw esp::domain_error(
          "table2: eps values must halve (e, e/2, e/4) for the Richardson "
          "column");
  }
  const int l_max = cfg.lmax > 0 ? cfg.lmax : 12;
  if (l_max < 4)
    throw esp::domain_error(
        "table2: lmax must be >= 4 so level 2 keeps a truncation guard band");

  OutputTable t;
  t.command = "table2";
  t.meta.emplace_back("direction", "alpha=" + fmt17(al) + " beta=" + fmt17(be) +
                                       " gamma=" + fmt17(ga));
  t.meta.emplace_back(
      "direction_note",
      "corrections are axis-permutation covariant: (0,1,-1) and the "
      "relabeled (1,-1,0) describe the same ellipsoid family");
  t.meta.emplace_back("eps", join17(eps));
  t.meta.emplace_back("lmax", fmt_int(l_max));
  echo_common(t, cfg);
  t.meta.emplace_back(
      "cluster_window",
      "numeric eigenvalues join level l inside the open window (l^2, (l+1)^2); "
      "a count other than 2l+1 aborts with the colliding levels named");
  t.meta.emplace_back("richardson", "(8*S(e/4) - 6*S(e/2) + S(e)) / 3");
  t.columns = {"l",           "rank",       "lambda0",     "lambda1_closed",
               "lambda_eps1", "slope_eps1", "lambda_eps2", "slope_eps2",
               "lambda_eps3", "slope_eps3", "slope_richardson"};

  for (int l = 1; l <= 2; ++l) {
    const auto table = esp::slope_extraction(al, be, ga, eps, l, l_max, cfg.jobs);
    const auto rich = esp::richardson3(table);
    const auto closed = esp::perturbed_spectrum(l, al, be, ga);
    const double lambda0 = static_cast<double>(l) * (l + 1);
    for (int rank = 0; rank < 2 * l + 1; ++rank) {
      t.rows.push_back({fmt_int(l), fmt_int(rank), fmt17(lambda0),
                        fmt17(closed[static_cast<size_t>(rank)].lambda1),
                        fmt17(table.lambda_numeric[0][static_cast<size_t>(rank)]),
                        fmt17(table.slope[0][static_cast<size_t>(rank)]),
                        fmt17(table.lambda_numeric[1][static_cast<size_t>(rank)]),
                        fmt17(table.slope[1][static_cast<size_t>(rank)]),
                        fmt17(table.lambda_numeric[2][static_cast<size_t>(rank)]),
                        fmt17(table.slope[2][static_cast<size_t>(rank)]),
                        fmt17(rich[static_cast<size_t>(rank)])});
    }
  }
  return t;
}

// ---------------------------------------------------------------------------
// sweep-biaxial: eigenvalue branches of (1, 1, b) over a logarithmic b grid
// from 0.1 to ~464, plus b = 500, for azimuthal orders 1..mmax.  Crossings
// between branches of different order are reported in the trailer.
// ---------------------------------------------------------------------------
OutputTable cmd_sweep_biaxial(const RunConfig& cfg) {
  if (cfg.mmax < 1 || cfg.mmax > 8)
    throw esp::domain_error("sweep-biaxial: mmax must be in 1..8");
  const int N = cfg.grid > 0 ? cfg.grid : 400;
  const int nvals = 10;

  std::vector<double> bs;
  for (int k = -12; k <= 32; ++k) bs.push_back(std::pow(10.0, k / 12.0));
  bs.push_back(500.0);
  const int ns = static_cast<int>(bs.size());
  const int nm = cfg.mmax;

  std::vector<std::vector<double>> vals(static_cast<size_t>(ns) * nm);
  parallel_for(ns * nm, cfg.jobs, [&](int idx) {
    const int s = idx / nm;
    const int m = idx % nm + 1;
    const auto spec = esp::EllipsoidSpec::from_axes(1.0, 1.0, bs[static_cast<size_t>(s)]);
    vals[static_cast<size_t>(idx)] =
        esp::solve_biaxial_fd(spec, m, N, nvals, cfg.pole_bc).values;
  });

  OutputTable t;
  t.command = "sweep-biaxial";
  t.meta.emplace_back("axes_family", "(1, 1, b)");
  t.meta.emplace_back("b_samples", fmt_int(ns));
  t.meta.emplace_back("b_range", fmt17(bs.front()) + ".." + fmt17(bs[static_cast<size_t>(ns) - 2]) +
                                     " log-spaced, plus " + fmt17(bs.back()));
  t.meta.emplace_back("m_range", "1.." + fmt_int(nm));
  t.meta.emplace_back("values_per_branch", fmt_int(nvals));
  t.meta.emplace_back("grid", fmt_int(N));
  t.meta.emplace_back("pole_bc", pole_bc_name(cfg.pole_bc));
  echo_common(t, cfg);
  t.columns = {"b", "m", "index", "lambda"};
  for (int s = 0; s < ns; ++s)
    for (int mi = 0; mi < nm; ++mi)
      for (int j = 0; j < nvals; ++j)
        t.rows.push_back({fmt17(bs[static_cast<size_t>(s)]), fmt_int(mi + 1), fmt_int(j),
                          fmt17(vals[static_cast<size_t>(s) * nm + mi][static_cast<size_t>(j)])});

  // Branches of equal m never cross (they are the ordered spectrum of one
  // operator); report order swaps between branches of different m.
  const int nc = nm * nvals;
  auto curve = [&](int s, int c) {
    return vals[static_cast<size_t>(s) * nm + c / nvals][static_cast<size_t>(c % nvals)];
  };
  int crossings = 0;
  for (int s = 0; s + 1 < ns; ++s) {
    for (int c1 = 0; c1 < nc; ++c1) {
      for (int c2 = c1 + 1; c2 < nc; ++c2) {
        if (c1 / nvals == c2 / nvals) continue;
        const double d0 = curve(s, c1) - curve(s, c2);
        const double d1 = curve(s + 1, c1) - curve(s + 1, c2);
        if (d0 != 0.0 && d1 != 0.0 && (d0 < 0.0) != (d1 < 0.0)) {
          ++crossings;
          t.trailer.push_back(
              "crossing: (m=" + fmt_int(c1 / nvals + 1) + ",index=" +
              fmt_int(c1 % nvals) + ") x (m=" + fmt_int(c2 / nvals + 1) +
              ",index=" + fmt_int(c2 % nvals) + ") between b=" +
              fmt17(bs[static_cast<size_t>(s)]) + " and b=" + fmt17(bs[static_cast<size_t>(s) + 1]));
        }
      }
    }
  }
  t.meta.emplace_back("crossings", fmt_int(crossings));
  return t;
}

// ---------------------------------------------------------------------------
// nodal: nodal-domain counts of the first-order eigenfunctions per level,
// against the conjectured count sequences.
// ---------------------------------------------------------------------------
OutputTable cmd_nodal(const RunConfig& cfg) {
  esp::EllipsoidSpec spec = esp::EllipsoidSpec::from_axes(1.0, 2.0, 3.0);
  if (cfg.has_perturb)
    spec = esp::EllipsoidSpec::from_perturbation(cfg.perturb[0], cfg.perturb[1],
                                                 cfg.perturb[2], cfg.perturb[3]);
  else if (cfg.has_axes)
    spec = esp::EllipsoidSpec::from_axes(cfg.axes[0], cfg.axes[1], cfg.axes[2]);

  const int levels = cfg.lmax > 0 ? cfg.lmax : 4;
  if (levels < 1 || levels > 7)
    throw esp::domain_error("nodal: level range is 1..7");
  const int n_phi = cfg.grid > 0 ? cfg.grid : 801;
  if (n_phi < 33)
    throw esp::domain_error("nodal: raster needs at least 33 rows");
  const int n_theta = 2 * (n_phi - 1);

  std::vector<esp::ConjectureReport> reports(static_cast<size_t>(levels));
  parallel_for(levels, cfg.jobs, [&](int i) {
    reports[static_cast<size_t>(i)] = esp::check_conjecture(spec, i + 1, n_phi, n_theta);
  });

  const char* shape_name = "triaxial";
  if (reports[0].shape == esp::ShapeCase::OBLATE) shape_name = "oblate";
  if (reports[0].shape == esp::ShapeCase::PROLATE) shape_name = "prolate";

  OutputTable t;
  t.command = "nodal";
  t.meta.emplace_back("axes", fmt17(spec.a) + "," + fmt17(spec.b) + "," + fmt17(spec.c));
  t.meta.emplace_back("case", shape_name);
  t.meta.emplace_back("levels", fmt_int(levels));
  t.meta.emplace_back("raster", fmt_int(n_phi) + "x" + fmt_int(n_theta));
  echo_common(t, cfg);
  t.meta.emplace_back("counting",
                      "count column: analytic curve-arrangement count for l <= 5, "
                      "raster flood fill above (cross-checked and resolution-flagged)");

  bool all_match = true;
  t.columns = {"case", "l", "rank", "lambda1", "count", "conjectured", "match"};
  for (const auto& rep : reports) {
    for (const auto& row : rep.rows) {
      const int count = row.exact_count >= 0 ? row.exact_count : row.grid_count;
      t.rows.push_back({shape_name, fmt_int(rep.l), fmt_int(row.rank),
                        fmt17(row.lambda1), fmt_int(count),
                        fmt_int(row.conjectured), row.match ? "true" : "false"});
      if (!row.match) all_match = false;
      if (row.grid_suspect)
        t.trailer.push_back("resolution-suspect: l=" + fmt_int(rep.l) +
                            " rank=" + fmt_int(row.rank) +
                            " (raster and doubled raster disagree; analytic "
                            "count is authoritative when present)");
    }
  }
  t.meta.emplace_back("all_match", all_match ? "true" : "false");
  return t;
}

// ---------------------------------------------------------------------------
// spectrum: lowest Galerkin eigenvalues for one ellipsoid.
// ---------------------------------------------------------------------------
OutputTable cmd_spectrum(const RunConfig& cfg) {
  if (!cfg.has_axes && !cfg.has_perturb)
    throw esp::domain_error("spectrum: needs --axes or --perturb");
  const esp::EllipsoidSpec spec =
      cfg.has_perturb
          ? esp::EllipsoidSpec::from_perturbation(cfg.perturb[0], cfg.perturb[1],
                                                  cfg.perturb[2], cfg.perturb[3])
          : esp::EllipsoidSpec::from_axes(cfg.axes[0], cfg.axes[1], cfg.axes[2]);
  const int l_max = cfg.lmax > 0 ? cfg.lmax : 8;
  const int k = (l_max + 1) * (l_max + 1) / 2;
  const auto sp = esp::solve_triaxial(spec, l_max, k, cfg.jobs);

  OutputTable t;
  t.command = "spectrum";
  t.meta.emplace_back("axes", fmt17(spec.a) + "," + fmt17(spec.b) + "," + fmt17(spec.c));
  t.meta.emplace_back("lmax", fmt_int(l_max));
  t.meta.emplace_back("k", fmt_int(k));
  echo_common(t, cfg);
  t.meta.emplace_back("residual_bound", fmt17(sp.residual_bound));
  t.columns = {"index", "lambda"};
  for (size_t i = 0; i < sp.values.size(); ++i)
    t.rows.push_back({fmt_int(static_cast<long long>(i)), fmt17(sp.values[i])});
  return t;
}

}  // namespace

int run_command(const RunConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  OutputTable table;
  int exit_code = 0;
  bool want_file = true;

  if (cfg.command == "table1") {
    table = cmd_table1(cfg);
  } else if (cfg.command == "table2") {
    table = cmd_table2(cfg);
  } else if (cfg.command == "sweep-biaxial") {
    table = cmd_sweep_biaxial(cfg);
  } else if (cfg.command == "nodal") {
    table = cmd_nodal(cfg);
  } else if (cfg.command == "spectrum") {
    table = cmd_spectrum(cfg);
  } else if (cfg.command == "verify") {
    const int failures = run_verify_checks(cfg, &table);
    exit_code = failures > 0 ? 3 : 0;
    // The check stream is the primary product; a table is written only on
    // explicit request.
    want_file = !cfg.out.empty();
  } else {
    throw esp::domain_error("unknown command: " + cfg.command);
  }

  if (want_file) {
    const std::string path =
        cfg.out.empty() ? cfg.command + "." + cfg.format : cfg.out;
    write_file(path, cfg.format == "json" ? to_json(table) : to_csv(table));
    const double wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
            .count();
    write_sidecar(path, cfg.command, wall_ms);
    if (path != "-")
      std::fprintf(stderr, "ellspec %s: wrote %s (%zu rows)\n",
                   cfg.command.c_str(), path.c_str(), table.rows.size());
  }
  return exit_code;
}

}  // namespace ellspec
