#include "esp/galerkin.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <thread>

#include "esp/errors.hpp"
#include "esp/special_fn.hpp"

namespace esp {

GalerkinBasis galerkin_basis(int l_max) {
  if (l_max < 0) throw domain_error("galerkin_basis: l_max must be >= 0");
  GalerkinBasis basis;
  basis.l_max = l_max;
  basis.modes.reserve(static_cast<size_t>(l_max + 1) * (l_max + 1));
  for (int l = 0; l <= l_max; ++l) {
    for (int m = 0; m <= l; ++m) {
      basis.modes.push_back(ModeIndex{l, m, Family::COS});
    }
    for (int m = 1; m <= l; ++m) {
      basis.modes.push_back(ModeIndex{l, m, Family::SIN});
    }
  }
  return basis;
}

GalerkinMatrices assemble_galerkin(const EllipsoidSpec& spec, int l_max,
                                   int jobs) {
  if (jobs < 1) throw domain_error("assemble_galerkin: jobs must be >= 1");
  GalerkinMatrices out;
  out.basis = galerkin_basis(l_max);
  const int nb = static_cast<int>(out.basis.modes.size());

  const int nt = 2 * (l_max + 4);
  const int nq = 4 * (l_max + 4);
  out.n_t_nodes = nt;
  out.n_theta_nodes = nq;
  QuadratureRule rule = gauss_legendre(nt);
  const double wq = 2.0 * M_PI / nq;

  const double a2 = spec.a * spec.a, b2 = spec.b * spec.b,
               c2 = spec.c * spec.c;

  // Quadrature-point weight fields.  With t = cos(phi) the area element is
  // sqrt(D) dphi dtheta = sqrt(Dt) dt dtheta, Dt = g11*g22s - g12s^2, where
  // g22s = g22/sin^2(phi) and g12s = g12/sin(phi) stay finite at the poles.
  const size_t npts = static_cast<size_t>(nt) * nq;
  std::vector<double> w_mass(npts), w_pp(npts), w_pt(npts), w_tt(npts);
  std::vector<double> sin_phi(nt);
  for (int s = 0; s < nt; ++s) {
    const double t = rule.nodes[s];
    const double s2 = 1.0 - t * t;
    sin_phi[s] = std::sqrt(s2);
    for (int q = 0; q < nq; ++q) {
      const double th = 2.0 * M_PI * q / nq;
      const double st = std::sin(th), ct = std::cos(th);
      const double g11 = t * t * (a2 * ct * ct + b2 * st * st) + c2 * s2;
      const double g22s = a2 * st * st + b2 * ct * ct;
      const double g12s = (b2 - a2) * t * st * ct;
      const double dt_det = g11 * g22s - g12s * g12s;
      if (!(dt_det > 0.0)) {
        throw numerical_error("assemble_galerkin: metric determinant not "
                              "positive at a quadrature node");
      }
      const double sq = std::sqrt(dt_det);
      const double w2 = rule.weights[s] * wq;
      const size_t idx = static_cast<size_t>(s) * nq + q;
      w_mass[idx] = sq * w2;
      w_pp[idx] = g22s / sq * w2;
      w_pt[idx] = g12s / (sin_phi[s] * sq) * w2;
      w_tt[idx] = g11 / (s2 * sq) * w2;
    }
  }

  // Basis tables over all quadrature points: value, d/dphi, d/dtheta.
  std::vector<std::vector<double>> U(nb), Up(nb), Ut(nb);
  for (int i = 0; i < nb; ++i) {
    const ModeIndex mode = out.basis.modes[i];
    std::vector<double> pval(nt), pder(nt);
    for (int s = 0; s < nt; ++s) {
      LegendreDerivs ld =
          legendre_p_derivs(LegendreMode{mode.l, mode.m}, rule.nodes[s]);
      pval[s] = ld.value;
      pder[s] = -sin_phi[s] * ld.d1;  // d/dphi of P(cos phi)
    }
    std::vector<double> ang(nq), dang(nq);
    for (int q = 0; q < nq; ++q) {
      const double th = 2.0 * M_PI * q / nq;
      if (mode.family == Family::COS) {
        ang[q] = std::cos(mode.m * th);
        dang[q] = -mode.m * std::sin(mode.m * th);
      } else {
        ang[q] = std::sin(mode.m * th);
        dang[q] = mode.m * std::cos(mode.m * th);
      }
    }
    U[i].resize(npts);
    Up[i].resize(npts);
    Ut[i].resize(npts);
    for (int s = 0; s < nt; ++s) {
      for (int q = 0; q < nq; ++q) {
        const size_t idx = static_cast<size_t>(s) * nq + q;
        U[i][idx] = pval[s] * ang[q];
        Up[i][idx] = pder[s] * ang[q];
        Ut[i][idx] = pval[s] * dang[q];
      }
    }
  }

  out.K = Matrix(nb);
  out.M = Matrix(nb);

  // Upper triangle, mirrored afterwards: symmetric by construction.  Row
  // blocks go to worker threads; each entry is a serial fixed-order sum,
  // so the result does not depend on the number of jobs.
  auto fill_rows = [&](int row_begin, int row_end) {
    for (int i = row_begin; i < row_end; ++i) {
      for (int j = i; j < nb; ++j) {
        const double* ui = U[i].data();
        const double* uj = U[j].data();
        const double* upi = Up[i].data();
        const double* upj = Up[j].data();
        const double* uti = Ut[i].data();
        const double* utj = Ut[j].data();
        double km = 0.0, mm = 0.0;
        for (size_t idx = 0; idx < npts; ++idx) {
          km += w_pp[idx] * upi[idx] * upj[idx] -
                w_pt[idx] * (upi[idx] * utj[idx] + uti[idx] * upj[idx]) +
                w_tt[idx] * uti[idx] * utj[idx];
          mm += w_mass[idx] * ui[idx] * uj[idx];
        }
        out.K(i, j) = km;
        out.M(i, j) = mm;
      }
    }
  };

  const int workers = std::min(jobs, nb);
  if (workers <= 1) {
    fill_rows(0, nb);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
      // interleaved row ranges would balance better, but contiguous blocks
      // keep the memory walk predictable; rows shrink towards the end, so
      // hand earlier (longer) rows to lower worker ids in round robin
      pool.emplace_back([&, w]() {
        for (int i = w; i < nb; i += workers) fill_rows(i, i + 1);
      });
    }
    for (std::thread& th : pool) th.join();
  }

  for (int i = 0; i < nb; ++i) {
    for (int j = i + 1; j < nb; ++j) {
      out.K(j, i) = out.K(i, j);
      out.M(j, i) = out.M(i, j);
    }
  }
  return out;
}

TriaxialSpectrum solve_triaxial(const EllipsoidSpec& spec, int l_max, int k,
                                int jobs) {
  const int nb = (l_max + 1) * (l_max + 1);
  if (k < 1 || 2 * k > nb) {
    throw domain_error(
        "solve_triaxial: need 1 <= k <= (l_max+1)^2 / 2; raise l_max to "
        "resolve more of the spectrum");
  }
  GalerkinMatrices gm = assemble_galerkin(spec, l_max, jobs);
  EigenPairs ep = eig_generalized(gm.K, gm.M, k);
  TriaxialSpectrum spectrum;
  spectrum.values = std::move(ep.values);
  spectrum.l_max = l_max;
  spectrum.residual_bound = ep.residual_bound;
  return spectrum;
}

SlopeTable slope_extraction(double alpha, double beta, double gamma,
                            const std::vector<double>& eps_list, int l,
                            int l_max, int jobs) {
  if (l < 1) throw domain_error("slope_extraction: need l >= 1");
  if (l_max < l + 2) {
    throw domain_error("slope_extraction: need l_max >= l + 2");
  }
  const double lambda0 = static_cast<double>(l) * (l + 1);
  const double lo = static_cast<double>(l) * l;            // midpoint to l-1
  const double hi = static_cast<double>(l + 1) * (l + 1);  // midpoint to l+1
  const int nb = (l_max + 1) * (l_max + 1);
  const int k = std::min(nb / 2, (l + 2) * (l + 2));

  SlopeTable table;
  table.l = l;
  table.eps = eps_list;
  for (double eps : eps_list) {
    EllipsoidSpec spec = EllipsoidSpec::from_perturbation(alpha, beta, gamma,
                                                          eps);
    TriaxialSpectrum spectrum = solve_triaxial(spec, l_max, k, jobs);
    std::vector<double> cluster;
    for (double v : spectrum.values) {
      if (v > lo && v < hi) cluster.push_back(v);
    }
    if (static_cast<int>(cluster.size()) != 2 * l + 1) {
      throw numerical_error(
          "slope_extraction: level " + std::to_string(l) + " window (" +
          std::to_string(lo) + ", " + std::to_string(hi) + ") holds " +
          std::to_string(cluster.size()) + " eigenvalues, expected " +
          std::to_string(2 * l + 1) + "; levels " + std::to_string(l - 1) +
          "/" + std::to_string(l + 1) +
          " overlap at this eps (reduce eps or revisit the window)");
    }
    std::vector<double> slopes(cluster.size());
    for (size_t i = 0; i < cluster.size(); ++i) {
      slopes[i] = (cluster[i] - lambda0) / eps;
    }
    table.lambda_numeric.push_back(std::move(cluster));
    table.slope.push_back(std::move(slopes));
  }
  return table;
}

std::vector<double> richardson3(const SlopeTable& table) {
  if (table.eps.size() != 3) {
    throw domain_error("richardson3: need slopes at exactly three eps values");
  }
  if (!(std::abs(table.eps[0] - 2.0 * table.eps[1]) < 1e-12 &&
        std::abs(table.eps[1] - 2.0 * table.eps[2]) < 1e-12)) {
    throw domain_error("richardson3: eps values must halve, e.g. 0.1/0.05/0.025");
  }
  const std::vector<double>& s0 = table.slope[0];
  const std::vector<double>& s1 = table.slope[1];
  const std::vector<double>& s2 = table.slope[2];
  std::vector<double> rich(s0.size());
  for (size_t i = 0; i < s0.size(); ++i) {
    rich[i] = (8.0 * s2[i] - 6.0 * s1[i] + s0[i]) / 3.0;
  }
  return rich;
}

}  // namespace esp
