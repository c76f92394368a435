#include "verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "esp/biaxial_fd.hpp"
#include "esp/eigensolve.hpp"
#include "esp/errors.hpp"
#include "esp/galerkin.hpp"
#include "esp/geometry.hpp"
#include "esp/nodal.hpp"
#include "esp/perturbation.hpp"
#include "esp/special_fn.hpp"

namespace ellspec {
namespace {

constexpr double kPi = 3.14159265358979323846;

// Portable uniform draw in [0, 1): the raw generator stream is specified
// bit-for-bit by the standard, in contrast to std::uniform_real_distribution
// whose mapping is implementation-defined.
double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double uniform_in(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform01(rng);
}

std::string num(double v) { return fmt17(v); }

// Second-order jet of the unit-norm sphere-harmonic basis function
// (l, m, family) at chart point (phi, theta).
esp::FunctionJet2 mode_jet(const esp::ModeIndex& mode, double phi,
                           double theta) {
  const double t = std::cos(phi);
  const double sp = std::sin(phi);
  const auto d = esp::legendre_p_derivs({mode.l, mode.m}, t);
  const double mm = static_cast<double>(mode.m);
  double ang, dang;
  if (mode.family == esp::Family::COS) {
    ang = std::cos(mm * theta);
    dang = -mm * std::sin(mm * theta);
  } else {
    ang = std::sin(mm * theta);
    dang = mm * std::cos(mm * theta);
  }
  esp::FunctionJet2 j;
  j.u = d.value * ang;
  j.u_phi = -sp * d.d1 * ang;
  j.u_phiphi = (-t * d.d1 + sp * sp * d.d2) * ang;
  j.u_theta = d.value * dang;
  j.u_phitheta = -sp * d.d1 * dang;
  j.u_thetatheta = -mm * mm * d.value * ang;
  return j;
}

// <v_i, A1 v_j> over the sphere by Gauss-Legendre x trapezoid quadrature.
// The integrand is a trigonometric polynomial in theta and (after the parity
// cancellations of the basis) a polynomial in t = cos(phi), so the rule
// below is exact up to roundoff.
double entry_quadrature(const esp::ModeIndex& vi, const esp::ModeIndex& vj,
                        double al, double be, double ga) {
  const int l = std::max(vi.l, vj.l);
  const auto rule = esp::gauss_legendre(2 * l + 12);
  const int n_theta = 4 * l + 16;
  const double w_theta = 2.0 * kPi / n_theta;
  double sum = 0.0;
  for (size_t q = 0; q < rule.nodes.size(); ++q) {
    const double phi = std::acos(rule.nodes[q]);
    double row = 0.0;
    for (int s = 0; s < n_theta; ++s) {
      const double theta = w_theta * s;
      const auto jet_j = mode_jet(vj, phi, theta);
      const double a1v = esp::a1_apply(al, be, ga, jet_j, phi, theta);
      row += mode_jet(vi, phi, theta).u * a1v;
    }
    sum += rule.weights[q] * w_theta * row;
  }
  return sum;
}

bool multiset_close(std::vector<double> a, std::vector<double> b, double tol) {
  if (a.size() != b.size()) return false;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  for (size_t i = 0; i < a.size(); ++i)
    if (std::fabs(a[i] - b[i]) > tol) return false;
  return true;
}

bool multiset_equal_int(std::vector<int> a, std::vector<int> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  return a == b;
}

struct Verifier {
  const RunConfig& cfg;
  OutputTable* table;
  std::mt19937_64 rng;
  int failures = 0;
  int total = 0;

  Verifier(const RunConfig& c, OutputTable* t) : cfg(c), table(t), rng(c.seed) {}

  void run(const char* name, const std::function<bool(std::string&)>& body) {
    ++total;
    std::string detail;
    bool pass = false;
    try {
      pass = body(detail);
    } catch (const std::exception& e) {
      pass = false;
      detail = std::string("exception: ") + e.what();
    }
    if (!pass) ++failures;
    if (pass)
      std::printf("PASS %s\n", name);
    else
      std::printf("FAIL %s: %s\n", name, detail.c_str());
    std::fflush(stdout);
    if (table)
      table->rows.push_back({name, pass ? "pass" : "fail", detail});
  }
};

// Worst absolute mismatch helper: grows `worst` and annotates `detail`.
void track(double err, double& worst, const std::string& what,
           std::string& where) {
  if (err > worst) {
    worst = err;
    where = what;
  }
}

}  // namespace

int run_verify_checks(const RunConfig& cfg, OutputTable* table) {
  if (table) {
    table->command = "verify";
    table->meta.emplace_back("seed", std::to_string(cfg.seed));
    table->meta.emplace_back("jobs", std::to_string(cfg.jobs));
    table->columns = {"check", "status", "detail"};
  }
  Verifier v(cfg, table);
  const int jobs = cfg.jobs;

  // ---------------------------------------------------------------- special
  v.run("legendre-polynomial-values", [&](std::string& d) {
    // Q_l^m(t) = (1-t^2)^{m/2} d^{m+l}/dt^{m+l} (1-t^2)^l evaluated by hand
    // for small degrees.
    double worst = 0.0;
    std::string where;
    track(std::fabs(esp::legendre_q({1, 0}, 0.37) - (-2.0 * 0.37)), worst,
          "(1;0)", where);
    track(std::fabs(esp::legendre_q({2, 0}, 0.3) - (12.0 * 0.09 - 4.0)), worst,
          "(2;0)", where);
    const double t = 0.4;
    track(std::fabs(esp::legendre_q({3, 1}, t) -
                    std::sqrt(1 - t * t) * (72.0 - 360.0 * t * t)) /
              40.0,
          worst, "(3;1)", where);
    track(std::fabs(esp::legendre_q({2, 2}, -0.2) - 24.0 * (1 - 0.04)), worst,
          "(2;2)", where);
    d = "worst " + num(worst) + " at " + where;
    return worst < 1e-11;
  });

  v.run("legendre-pole-convention", [&](std::string& d) {
    // No Condon-Shortley phase and no Rodrigues prefactor: the unit-norm
    // (1,0) function is negative at the north pole.
    const double v10 = esp::legendre_p_normalized({1, 0}, 1.0);
    const double want = -std::sqrt(3.0 / (4.0 * kPi));
    const double v00 = esp::legendre_p_normalized({0, 0}, 0.3);
    const double e1 = std::fabs(v10 - want);
    const double e2 = std::fabs(v00 - 1.0 / std::sqrt(4.0 * kPi));
    d = "(1;0) at pole " + num(v10) + " want " + num(want);
    return e1 < 1e-13 && e2 < 1e-13;
  });

  v.run("legendre-normalization", [&](std::string& d) {
    double worst = 0.0;
    std::string where;
    for (int l = 0; l <= 8; ++l) {
      const auto rule = esp::gauss_legendre(l + 2);
      for (int m = 0; m <= l; ++m) {
        double integral = 0.0;
        for (size_t q = 0; q < rule.nodes.size(); ++q) {
          const double p = esp::legendre_p_normalized({l, m}, rule.nodes[q]);
          integral += rule.weights[q] * p * p;
        }
        const double cm = (m == 0) ? 2.0 * kPi : kPi;
        track(std::fabs(cm * integral - 1.0), worst,
              "(" + std::to_string(l) + ";" + std::to_string(m) + ")", where);
      }
    }
    d = "worst |norm-1| " + num(worst) + " at " + where;
    return worst < 1e-11;
  });

  v.run("legendre-orthogonality", [&](std::string& d) {
    double worst = 0.0;
    std::string where;
    for (int m = 0; m <= 6; ++m) {
      for (int l = m; l <= 7; ++l) {
        for (int lp = l + 1; lp <= 8; ++lp) {
          const auto rule = esp::gauss_legendre(l + lp);
          double integral = 0.0;
          for (size_t q = 0; q < rule.nodes.size(); ++q)
            integral += rule.weights[q] *
                        esp::legendre_p_normalized({l, m}, rule.nodes[q]) *
                        esp::legendre_p_normalized({lp, m}, rule.nodes[q]);
          const double cm = (m == 0) ? 2.0 * kPi : kPi;
          track(std::fabs(cm * integral), worst,
                "(" + std::to_string(l) + "|" + std::to_string(lp) + ";" +
                    std::to_string(m) + ")",
                where);
        }
      }
    }
    d = "worst overlap " + num(worst) + " at " + where;
    return worst < 1e-11;
  });

  v.run("legendre-derivative-ode", [&](std::string& d) {
    // (1-t^2) y'' - 2t y' + (l(l+1) - m^2/(1-t^2)) y = 0.
    double worst = 0.0;
    for (int draw = 0; draw < 8; ++draw) {
      const int l = 1 + static_cast<int>(uniform01(v.rng) * 10.0);
      const int m = static_cast<int>(uniform01(v.rng) * (l + 1));
      const double t = uniform_in(v.rng, -0.95, 0.95);
      const auto dv = esp::legendre_p_derivs({l, m}, t);
      const double res =
          (1 - t * t) * dv.d2 - 2 * t * dv.d1 +
          (l * (l + 1.0) - m * m / (1 - t * t)) * dv.value;
      const double scale =
          std::fabs(l * (l + 1.0) * dv.value) + std::fabs(dv.d1) + 1.0;
      worst = std::max(worst, std::fabs(res) / scale);
    }
    d = "worst relative ODE residual " + num(worst);
    return worst < 1e-8;
  });

  v.run("legendre-ratio-lemma", [&](std::string& d) {
    // Closed-form moment ratio against direct quadrature for every order up
    // to degree 12.
    double worst = 0.0;
    std::string where;
    for (int l = 1; l <= 12; ++l) {
      const auto rule = esp::gauss_legendre(l + 3);
      for (int m = 0; m <= l; ++m) {
        double numq = 0.0, den = 0.0;
        for (size_t q = 0; q < rule.nodes.size(); ++q) {
          const double t = rule.nodes[q];
          const double p = esp::legendre_p_normalized({l, m}, t);
          numq += rule.weights[q] * t * t * p * p;
          den += rule.weights[q] * p * p;
        }
        track(std::fabs(esp::legendre_ratio({l, m}) - numq / den), worst,
              "(" + std::to_string(l) + ";" + std::to_string(m) + ")", where);
      }
    }
    d = "worst deviation " + num(worst) + " at " + where;
    return worst < 1e-10;
  });

  v.run("gauss-legendre-exactness", [&](std::string& d) {
    const auto rule = esp::gauss_legendre(12);
    double worst = 0.0;
    double wsum = 0.0;
    for (double w : rule.weights) wsum += w;
    worst = std::fabs(wsum - 2.0);
    for (int k = 1; k <= 23; ++k) {
      double s = 0.0;
      for (size_t q = 0; q < rule.nodes.size(); ++q)
        s += rule.weights[q] * std::pow(rule.nodes[q], k);
      const double exact = (k % 2 == 0) ? 2.0 / (k + 1.0) : 0.0;
      worst = std::max(worst, std::fabs(s - exact));
    }
    bool ordered = true;
    const auto big = esp::gauss_legendre(64);
    for (size_t q = 0; q + 1 < big.nodes.size(); ++q)
      ordered = ordered && big.nodes[q] < big.nodes[q + 1];
    d = "worst moment error " + num(worst);
    return worst < 1e-13 && ordered;
  });

  v.run("bessel-series-identity", [&](std::string& d) {
    // J_0(x)^2 + 2 sum_k J_k(x)^2 = 1 for every x.
    double worst = 0.0;
    for (double x : {1.7, 9.3}) {
      double s = esp::bessel_j(0, x) * esp::bessel_j(0, x);
      for (int k = 1; k <= 45; ++k) {
        const double jk = esp::bessel_j(k, x);
        s += 2.0 * jk * jk;
      }
      worst = std::max(worst, std::fabs(s - 1.0));
    }
    d = "worst |sum-1| " + num(worst);
    return worst < 1e-11;
  });

  v.run("bessel-root-values", [&](std::string& d) {
    double worst = 0.0;
    track(std::fabs(esp::bessel_root(0, 1, esp::BesselRootKind::J) -
                    2.404825557695773),
          worst, "", d);
    track(std::fabs(esp::bessel_root(1, 1, esp::BesselRootKind::J) -
                    3.831705970207512),
          worst, "", d);
    track(std::fabs(esp::bessel_root(1, 1, esp::BesselRootKind::JPrime) -
                    1.841183781340659),
          worst, "", d);
    track(std::fabs(esp::bessel_j(0, esp::bessel_root(0, 3, esp::BesselRootKind::J))),
          worst, "", d);
    d = "worst deviation " + num(worst);
    return worst < 1e-10;
  });

  // --------------------------------------------------------------- geometry
  v.run("metric-embedding-oracle", [&](std::string& d) {
    // First fundamental form against dot products of the analytic chart
    // derivatives r_phi, r_theta.
    double worst = 0.0;
    for (int draw = 0; draw < 6; ++draw) {
      const double a = uniform_in(v.rng, 0.5, 2.0);
      const double b = uniform_in(v.rng, 0.5, 2.0);
      const double c = uniform_in(v.rng, 0.5, 2.0);
      const double phi = uniform_in(v.rng, 0.2, kPi - 0.2);
      const double th = uniform_in(v.rng, 0.0, 2.0 * kPi);
      const auto g =
          esp::metric_triaxial(esp::EllipsoidSpec::from_axes(a, b, c), phi, th);
      const double rphi[3] = {a * std::cos(phi) * std::cos(th),
                              b * std::cos(phi) * std::sin(th),
                              -c * std::sin(phi)};
      const double rth[3] = {-a * std::sin(phi) * std::sin(th),
                             b * std::sin(phi) * std::cos(th), 0.0};
      const double g11 = rphi[0] * rphi[0] + rphi[1] * rphi[1] + rphi[2] * rphi[2];
      const double g12 = rphi[0] * rth[0] + rphi[1] * rth[1];
      const double g22 = rth[0] * rth[0] + rth[1] * rth[1];
      const double scale = std::max(1.0, g11 + g22);
      worst = std::max(worst, std::fabs(g.g11 - g11) / scale);
      worst = std::max(worst, std::fabs(g.g12 - g12) / scale);
      worst = std::max(worst, std::fabs(g.g22 - g22) / scale);
    }
    d = "worst relative deviation " + num(worst);
    return worst < 1e-12;
  });

  v.run("metric-sphere-limit", [&](std::string& d) {
    const auto op = esp::laplace_coeffs(esp::EllipsoidSpec::from_axes(1, 1, 1),
                                        0.7, 1.1);
    const double sp = std::sin(0.7);
    double worst = std::fabs(op.A - 1.0);
    worst = std::max(worst, std::fabs(op.B));
    worst = std::max(worst, std::fabs(op.C - 1.0 / (sp * sp)));
    worst = std::max(worst, std::fabs(op.E - std::cos(0.7) / sp));
    worst = std::max(worst, std::fabs(op.F));
    d = "worst coefficient deviation " + num(worst);
    return worst < 1e-12;
  });

  v.run("laplace-sphere-eigenfunction", [&](std::string& d) {
    // On the unit sphere the operator must return -l(l+1) u for every
    // sphere-harmonic basis function, including the cross-derivative paths.
    const auto sphere = esp::EllipsoidSpec::from_axes(1, 1, 1);
    double worst = 0.0;
    const esp::ModeIndex modes[] = {{2, 1, esp::Family::COS},
                                    {3, 2, esp::Family::SIN},
                                    {5, 0, esp::Family::COS},
                                    {6, 5, esp::Family::SIN}};
    for (const auto& mode : modes) {
      for (int draw = 0; draw < 4; ++draw) {
        const double phi = uniform_in(v.rng, 0.25, kPi - 0.25);
        const double th = uniform_in(v.rng, 0.0, 2.0 * kPi);
        const auto jet = mode_jet(mode, phi, th);
        const double got = esp::apply(esp::laplace_coeffs(sphere, phi, th), jet);
        const double ll1 = mode.l * (mode.l + 1.0);
        worst = std::max(worst,
                         std::fabs(got + ll1 * jet.u) / (ll1 * (std::fabs(jet.u) + 1.0)));
      }
    }
    d = "worst relative deviation " + num(worst);
    return worst < 1e-8;
  });

  v.run("a1-sphere-scaling", [&](std::string& d) {
    // Equal coefficients only rescale the sphere: A_1(s,s,s) = -2 s Laplace.
    const auto sphere = esp::EllipsoidSpec::from_axes(1, 1, 1);
    const double s = 0.37;
    double worst = 0.0;
    for (int draw = 0; draw < 6; ++draw) {
      const double phi = uniform_in(v.rng, 0.25, kPi - 0.25);
      const double th = uniform_in(v.rng, 0.0, 2.0 * kPi);
      const auto jet = mode_jet({4, 2, esp::Family::COS}, phi, th);
      const double lap = esp::apply(esp::laplace_coeffs(sphere, phi, th), jet);
      const double a1 = esp::a1_apply(s, s, s, jet, phi, th);
      worst = std::max(worst, std::fabs(a1 + 2.0 * s * lap) /
                                  (std::fabs(lap) + 1.0));
    }
    d = "worst relative deviation " + num(worst);
    return worst < 1e-10;
  });

  v.run("a1-eps-derivative-oracle", [&](std::string& d) {
    // A_1 u must match the eps-derivative of Laplace(spec(eps)) u, computed
    // by Richardson-extrapolated central differences.
    double worst = 0.0;
    for (int draw = 0; draw < 5; ++draw) {
      const double al = uniform_in(v.rng, -1.0, 1.0);
      const double be = uniform_in(v.rng, -1.0, 1.0);
      const double ga = uniform_in(v.rng, -1.0, 1.0);
      const double phi = uniform_in(v.rng, 0.3, kPi - 0.3);
      const double th = uniform_in(v.rng, 0.0, 2.0 * kPi);
      const auto jet = mode_jet({3, 2, esp::Family::COS}, phi, th);
      auto dop = [&](double eps) {
        const auto spec = esp::EllipsoidSpec::from_perturbation(al, be, ga, eps);
        return esp::apply(esp::laplace_coeffs(spec, phi, th), jet);
      };
      auto central = [&](double eps) {
        return (dop(eps) - dop(-eps)) / (2.0 * eps);
      };
      const double eps = 1e-3;
      const double rich = (4.0 * central(eps / 2) - central(eps)) / 3.0;
      const double a1 = esp::a1_apply(al, be, ga, jet, phi, th);
      worst = std::max(worst, std::fabs(a1 - rich) / (1.0 + std::fabs(rich)));
    }
    d = "worst relative deviation " + num(worst);
    return worst < 1e-7;
  });

  // ------------------------------------------------------------ eigensolvers
  v.run("eig-tridiagonal-known", [&](std::string& d) {
    esp::SymTridiagonal t3{{2, 2, 2}, {-1, -1}};
    const auto e3 = esp::eig_tridiagonal(t3);
    double worst = std::fabs(e3.values[0] - (2.0 - std::sqrt(2.0)));
    worst = std::max(worst, std::fabs(e3.values[1] - 2.0));
    worst = std::max(worst, std::fabs(e3.values[2] - (2.0 + std::sqrt(2.0))));
    // Dirichlet-Laplacian chain of length 8: lambda_k = 2 - 2 cos(k pi / 9).
    esp::SymTridiagonal chain{std::vector<double>(8, 2.0),
                              std::vector<double>(7, -1.0)};
    const auto ec = esp::eig_tridiagonal(chain);
    for (int k = 1; k <= 8; ++k)
      worst = std::max(worst, std::fabs(ec.values[static_cast<size_t>(k) - 1] -
                                        (2.0 - 2.0 * std::cos(k * kPi / 9.0))));
    d = "worst eigenvalue deviation " + num(worst);
    return worst < 1e-13;
  });

  v.run("eig-tridiagonal-residual", [&](std::string& d) {
    const int n = 60;
    esp::SymTridiagonal t;
    t.diag.resize(n);
    t.offdiag.resize(n - 1);
    for (int i = 0; i < n; ++i) t.diag[static_cast<size_t>(i)] = uniform_in(v.rng, -1, 1);
    for (int i = 0; i + 1 < n; ++i)
      t.offdiag[static_cast<size_t>(i)] = uniform_in(v.rng, -1, 1);
    const auto e = esp::eig_tridiagonal(t);
    bool sorted = std::is_sorted(e.values.begin(), e.values.end());
    double ortho = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        double dot = 0.0;
        for (int r = 0; r < n; ++r)
          dot += e.vectors[static_cast<size_t>(i)][static_cast<size_t>(r)] *
                 e.vectors[static_cast<size_t>(j)][static_cast<size_t>(r)];
        ortho = std::max(ortho, std::fabs(dot - (i == j ? 1.0 : 0.0)));
      }
    d = "residual bound " + num(e.residual_bound) + "; orthogonality " +
        num(ortho);
    return sorted && e.residual_bound < 1e-11 && ortho < 1e-11;
  });

  v.run("eig-jacobi-residual", [&](std::string& d) {
    const int n = 30;
    esp::Matrix a(n);
    double trace = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        const double x = uniform_in(v.rng, -1, 1);
        a(i, j) = x;
        a(j, i) = x;
      }
    for (int i = 0; i < n; ++i) trace += a(i, i);
    const auto e = esp::eig_dense_symmetric(a);
    double vsum = 0.0;
    for (double lam : e.values) vsum += lam;
    d = "residual bound " + num(e.residual_bound) + "; trace deviation " +
        num(std::fabs(vsum - trace));
    return e.residual_bound < 1e-11 * n &&
           std::fabs(vsum - trace) < 1e-10 * n &&
           std::is_sorted(e.values.begin(), e.values.end());
  });

  v.run("eig-generalized-residual", [&](std::string& d) {
    const int n = 25;
    esp::Matrix a(n), m(n);
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        const double x = uniform_in(v.rng, -1, 1);
        a(i, j) = x;
        a(j, i) = x;
        const double y = 0.3 * uniform_in(v.rng, -1, 1) / n;
        m(i, j) = y + (i == j ? 1.0 : 0.0);
        m(j, i) = m(i, j);
      }
    const auto e = esp::eig_generalized(a, m, 10);
    // M-orthonormality of the returned vectors.
    double ortho = 0.0;
    for (size_t p = 0; p < e.vectors.size(); ++p)
      for (size_t q = p; q < e.vectors.size(); ++q) {
        double dot = 0.0;
        for (int i = 0; i < n; ++i) {
          double mi = 0.0;
          for (int j = 0; j < n; ++j) mi += m(i, j) * e.vectors[q][static_cast<size_t>(j)];
          dot += e.vectors[p][static_cast<size_t>(i)] * mi;
        }
        ortho = std::max(ortho, std::fabs(dot - (p == q ? 1.0 : 0.0)));
      }
    // An indefinite mass matrix must be rejected.
    bool rejected = false;
    try {
      esp::Matrix bad(2);
      bad(0, 0) = 1.0;
      bad(1, 1) = -1.0;
      esp::Matrix id(2);
      id(0, 0) = id(1, 1) = 1.0;
      (void)esp::eig_generalized(id, bad, 1);
    } catch (const esp::numerical_error&) {
      rejected = true;
    }
    d = "residual bound " + num(e.residual_bound) + "; M-orthogonality " +
        num(ortho) + "; indefinite mass rejected " + (rejected ? "yes" : "no");
    return e.residual_bound < 1e-10 * n && ortho < 1e-10 && rejected;
  });

  // ------------------------------------------------------------ perturbation
  v.run("closed-form-rational-corrections", [&](std::string& d) {
    // The nine biaxial slopes for (pair, distinguished) = (0, 1) are exact
    // rationals.
    struct Ref {
      int m, l;
      double value;
    };
    const Ref refs[] = {{0, 1, -12.0 / 5},  {0, 2, -44.0 / 7},
                        {0, 3, -184.0 / 15}, {1, 1, -4.0 / 5},
                        {1, 2, -36.0 / 7},  {1, 3, -56.0 / 5},
                        {2, 2, -12.0 / 7},  {2, 3, -8.0},
                        {3, 3, -8.0 / 3}};
    double worst = 0.0;
    for (const auto& r : refs)
      worst = std::max(worst,
                       std::fabs(esp::biaxial_lambda1(r.l, r.m, 0.0, 1.0) - r.value));
    d = "worst deviation " + num(worst);
    return worst < 1e-12;
  });

  v.run("level12-triaxial-corrections", [&](std::string& d) {
    const auto s1 = esp::perturbed_spectrum(1, 0.0, 1.0, -1.0);
    const auto s2 = esp::perturbed_spectrum(2, 0.0, 1.0, -1.0);
    const double r3 = 16.0 * std::sqrt(3.0) / 7.0;
    const double ref1[] = {-8.0 / 5, 0.0, 8.0 / 5};
    const double ref2[] = {-r3, -24.0 / 7, 0.0, 24.0 / 7, r3};
    double worst = 0.0;
    for (int i = 0; i < 3; ++i)
      worst = std::max(worst, std::fabs(s1[static_cast<size_t>(i)].lambda1 - ref1[i]));
    for (int i = 0; i < 5; ++i)
      worst = std::max(worst, std::fabs(s2[static_cast<size_t>(i)].lambda1 - ref2[i]));
    d = "worst deviation " + num(worst);
    return worst < 1e-12;
  });

  v.run("level3-surd-corrections", [&](std::string& d) {
    // Closed-form block eigenvalues for degree 3 at arbitrary coefficients:
    //   cos/even: -(104a+104b+152c)/15 +- (32/15) sqrt(4a^2+4b^2-7ab-ac-bc+c^2)
    // and cyclic relabelings for the other blocks; sin/even is -8(a+b+c).
    double worst = 0.0;
    for (int draw = 0; draw < 4; ++draw) {
      double al = 0.0, be = 1.0, ga = -1.0;
      if (draw > 0) {
        al = uniform_in(v.rng, -1, 1);
        be = uniform_in(v.rng, -1, 1);
        ga = uniform_in(v.rng, -1, 1);
      }
      auto two = [](double base, double disc) {
        return std::vector<double>{base - disc, base + disc};
      };
      auto surd = [](double x, double y, double z) {
        return (32.0 / 15.0) *
               std::sqrt(4 * x * x + 4 * y * y - 7 * x * y - x * z - y * z +
                         z * z);
      };
      const auto blocks = esp::assemble_blocks(3, al, be, ga);
      for (const auto& blk : blocks) {
        std::vector<double> want;
        switch (blk.kind) {
          case esp::BlockKind::COS_EVEN:
            want = two(-(104 * al + 104 * be + 152 * ga) / 15.0, surd(al, be, ga));
            break;
          case esp::BlockKind::COS_ODD:
            want = two(-(104 * ga + 104 * be + 152 * al) / 15.0, surd(ga, be, al));
            break;
          case esp::BlockKind::SIN_EVEN:
            want = {-8.0 * (al + be + ga)};
            break;
          case esp::BlockKind::SIN_ODD:
            want = two(-(104 * ga + 104 * al + 152 * be) / 15.0, surd(ga, al, be));
            break;
        }
        auto got = esp::eig_tridiagonal_values(blk.matrix);
        std::sort(got.begin(), got.end());
        std::sort(want.begin(), want.end());
        if (got.size() != want.size()) {
          d = "block size mismatch";
          return false;
        }
        for (size_t i = 0; i < got.size(); ++i)
          worst = std::max(worst, std::fabs(got[i] - want[i]));
      }
    }
    d = "worst deviation " + num(worst);
    return worst < 1e-10;
  });

  v.run("entry-quadrature-oracle", [&](std::string& d) {
    // Every tridiagonal block entry equals -<v_i, A_1 v_j> computed by exact
    // quadrature, for ten random coefficient draws and all degrees <= 6.
    double worst = 0.0;
    std::string where;
    for (int draw = 0; draw < 10; ++draw) {
      const double al = uniform_in(v.rng, -1, 1);
      const double be = uniform_in(v.rng, -1, 1);
      const double ga = uniform_in(v.rng, -1, 1);
      for (int l = 0; l <= 6; ++l) {
        for (const auto& blk : esp::assemble_blocks(l, al, be, ga)) {
          const int n = static_cast<int>(blk.modes.size());
          for (int i = 0; i < n; ++i) {
            const double q =
                entry_quadrature(blk.modes[static_cast<size_t>(i)],
                                 blk.modes[static_cast<size_t>(i)], al, be, ga);
            track(std::fabs(-q - blk.matrix.diag[static_cast<size_t>(i)]), worst,
                  "diag l=" + std::to_string(l), where);
            if (i + 1 < n) {
              const double qo = entry_quadrature(
                  blk.modes[static_cast<size_t>(i)],
                  blk.modes[static_cast<size_t>(i) + 1], al, be, ga);
              track(std::fabs(-qo - blk.matrix.offdiag[static_cast<size_t>(i)]),
                    worst, "offdiag l=" + std::to_string(l), where);
            }
          }
        }
      }
    }
    // Decoupling: pairs that land in different blocks integrate to zero.
    const double z1 = entry_quadrature({4, 2, esp::Family::COS},
                                       {4, 2, esp::Family::SIN}, 0.4, -0.8, 0.3);
    const double z2 = entry_quadrature({4, 1, esp::Family::COS},
                                       {4, 2, esp::Family::COS}, 0.4, -0.8, 0.3);
    worst = std::max(worst, std::fabs(z1));
    worst = std::max(worst, std::fabs(z2));
    d = "worst entry deviation " + num(worst) +
        (where.empty() ? "" : " at " + where);
    return worst < 1e-8;
  });

  v.run("biaxial-block-consistency", [&](std::string& d) {
    // With two equal coefficients the triaxial blocks must reproduce the
    // closed-form biaxial slopes (both equatorial and polar orientations).
    double worst = 0.0;
    for (int draw = 0; draw < 3; ++draw) {
      const double p = uniform_in(v.rng, -1, 1);
      const double q = uniform_in(v.rng, -1, 1);
      for (int l = 1; l <= 4; ++l) {
        std::vector<double> want;
        for (int m = 0; m <= l; ++m) {
          want.push_back(esp::biaxial_lambda1(l, m, p, q));
          if (m >= 1) want.push_back(want.back());
        }
        for (const auto orientation : {0, 1}) {
          const auto sp = orientation == 0
                              ? esp::perturbed_spectrum(l, p, p, q)   // polar
                              : esp::perturbed_spectrum(l, p, q, p);  // y axis
          std::vector<double> got;
          for (const auto& pe : sp) got.push_back(pe.lambda1);
          std::vector<double> w = want;
          std::sort(w.begin(), w.end());
          std::sort(got.begin(), got.end());
          for (size_t i = 0; i < w.size(); ++i)
            worst = std::max(worst, std::fabs(w[i] - got[i]));
        }
      }
    }
    d = "worst multiset deviation " + num(worst);
    return worst < 1e-11;
  });

  v.run("multiplicity-biaxial", [&](std::string& d) {
    // Exactly l double eigenvalues plus one simple one per level.
    const double p = uniform_in(v.rng, -1, 1);
    double q = uniform_in(v.rng, -1, 1);
    if (std::fabs(q - p) < 0.1) q = p + 0.5;
    for (int l = 1; l <= 6; ++l) {
      const auto rep = esp::multiplicity_report(l, p, p, q);
      int doubles = 0, simples = 0;
      for (const auto& c : rep.clusters) {
        if (c.count == 2) ++doubles;
        if (c.count == 1) ++simples;
      }
      if (doubles != l || simples != 1 ||
          static_cast<int>(rep.clusters.size()) != l + 1) {
        d = "level " + std::to_string(l) + ": " + std::to_string(doubles) +
            " doubles and " + std::to_string(simples) + " simples";
        return false;
      }
    }
    d = "levels 1..6: l doubles + 1 simple";
    return true;
  });

  v.run("multiplicity-triaxial", [&](std::string& d) {
    // Pairwise-distinct coefficients split every level completely.
    double al = uniform_in(v.rng, -1, 1);
    double be = uniform_in(v.rng, -1, 1);
    double ga = uniform_in(v.rng, -1, 1);
    if (std::fabs(be - al) < 0.1) be += 0.35;
    if (std::fabs(ga - al) < 0.1 || std::fabs(ga - be) < 0.1) ga += 0.7;
    for (int l = 1; l <= 5; ++l) {
      const auto rep = esp::multiplicity_report(l, al, be, ga);
      if (static_cast<int>(rep.clusters.size()) != 2 * l + 1) {
        d = "level " + std::to_string(l) + ": " +
            std::to_string(rep.clusters.size()) + " clusters";
        return false;
      }
      for (const auto& c : rep.clusters)
        if (c.count != 1) {
          d = "level " + std::to_string(l) + " has a repeated slope";
          return false;
        }
    }
    d = "levels 1..5 fully split into 2l+1 simple slopes";
    return true;
  });

  // --------------------------------------------------------------------- FD
  v.run("fd-sphere-spectrum", [&](std::string& d) {
    const auto sphere = esp::EllipsoidSpec::from_axes(1, 1, 1);
    double worst = 0.0;
    for (const auto bc : {esp::PoleBc::NEUMANN, esp::PoleBc::AUTO}) {
      const auto res = esp::solve_biaxial_fd(sphere, 0, 400, 4, bc);
      const double want[] = {0.0, 2.0, 6.0, 12.0};
      for (int i = 0; i < 4; ++i)
        worst = std::max(worst, std::fabs(res.values[static_cast<size_t>(i)] - want[i]) /
                                    (want[i] + 1.0));
    }
    d = "worst relative deviation " + num(worst);
    return worst < 2e-3;
  });

  // Shared by the two reference checks below.
  struct Table1Row {
    int m, l;
    double ref_eps1, ref_eps2;  // published 5-digit values at eps 0.1, 0.05
  };
  static const Table1Row kTable1[] = {
      {0, 1, 1.7772, 1.8844},  {0, 2, 5.4079, 5.6950},  {0, 3, 10.8463, 11.4052},
      {1, 1, 1.9250, 1.9612},  {1, 2, 5.5227, 5.7521},  {1, 3, 10.9509, 11.4573},
      {2, 2, 5.8404, 5.9173},  {2, 3, 11.2595, 11.6152}, {3, 3, 11.7527, 11.8716}};
  std::vector<std::vector<double>> table1_numeric(9, std::vector<double>(2));

  v.run("fd-reference-digits", [&](std::string& d) {
    // N = 400 reproduces all published biaxial eigenvalues to the 4 printed
    // significant digits.
    const double eps[2] = {0.1, 0.05};
    double worst_excess = -1e300;
    std::string where;
    for (int r = 0; r < 9; ++r) {
      const auto& row = kTable1[r];
      const int k = row.l - row.m + 1;
      for (int e = 0; e < 2; ++e) {
        const auto spec = esp::EllipsoidSpec::from_perturbation(0, 0, 1, eps[e]);
        const double got =
            esp::solve_biaxial_fd(spec, row.m, 400, k, esp::PoleBc::AUTO)
                .values.back();
        table1_numeric[static_cast<size_t>(r)][static_cast<size_t>(e)] = got;
        const double ref = e == 0 ? row.ref_eps1 : row.ref_eps2;
        const double tol =
            0.5 * std::pow(10.0, std::floor(std::log10(std::fabs(ref))) - 3.0);
        track(std::fabs(got - ref) - tol, worst_excess,
              "m=" + std::to_string(row.m) + " l=" + std::to_string(row.l) +
                  " eps=" + num(eps[e]),
              where);
      }
    }
    d = "worst digit-tolerance excess " + num(worst_excess) + " at " + where;
    return worst_excess < 0.0;
  });

  v.run("fd-slope-halving", [&](std::string& d) {
    // Halving eps must cut the slope error by at least 40% in every row.
    double worst_ratio = 0.0;
    std::string where;
    for (int r = 0; r < 9; ++r) {
      const auto& row = kTable1[r];
      const double lambda0 = static_cast<double>(row.l) * (row.l + 1);
      const double lambda1 = esp::biaxial_lambda1(row.l, row.m, 0.0, 1.0);
      const double e1 =
          std::fabs((table1_numeric[static_cast<size_t>(r)][0] - lambda0) / 0.1 - lambda1);
      const double e2 =
          std::fabs((table1_numeric[static_cast<size_t>(r)][1] - lambda0) / 0.05 - lambda1);
      track(e2 / e1, worst_ratio,
            "m=" + std::to_string(row.m) + " l=" + std::to_string(row.l), where);
    }
    d = "worst error ratio " + num(worst_ratio) + " at " + where;
    return worst_ratio < 0.6;
  });

  v.run("fd-convergence-order", [&](std::string& d) {
    const auto spec = esp::EllipsoidSpec::from_perturbation(0, 0, 1, 0.1);
    const auto study = esp::convergence_study(spec, 1, {100, 200, 400}, 3);
    double lo = 1e300, hi = -1e300;
    for (double o : study.order) {
      lo = std::min(lo, o);
      hi = std::max(hi, o);
    }
    d = "order range [" + num(lo) + " .. " + num(hi) + "]";
    return lo > 1.6 && hi < 2.4;
  });

  v.run("fd-pole-bc-agreement", [&](std::string& d) {
    const auto spec = esp::EllipsoidSpec::from_perturbation(0, 0, 1, 0.1);
    const auto rn = esp::solve_biaxial_fd(spec, 1, 400, 3, esp::PoleBc::NEUMANN);
    const auto ra = esp::solve_biaxial_fd(spec, 1, 400, 3, esp::PoleBc::AUTO);
    double worst = 0.0;
    for (int i = 0; i < 3; ++i)
      worst = std::max(worst, std::fabs(rn.values[static_cast<size_t>(i)] -
                                        ra.values[static_cast<size_t>(i)]) /
                                  (1.0 + std::fabs(ra.values[static_cast<size_t>(i)])));
    d = "worst relative gap " + num(worst);
    return worst < 5e-3;
  });

  v.run("fd-prolate-limit", [&](std::string& d) {
    // Extreme prolate (1, 1, 500): the lowest order-m eigenvalue approaches
    // m^2 (equatorial concentration).
    const auto spec = esp::EllipsoidSpec::from_axes(1, 1, 500);
    double worst = 0.0;
    for (int m = 1; m <= 5; ++m) {
      const double lam =
          esp::solve_biaxial_fd(spec, m, 400, 1, esp::PoleBc::AUTO).values[0];
      worst = std::max(worst, std::fabs(lam - m * m) / (m * m));
    }
    d = "worst relative gap to m^2 " + num(worst);
    return worst < 0.10;
  });

  v.run("fd-oblate-limit", [&](std::string& d) {
    // Extreme oblate (1, 1, 0.1): eigenvalues approach squared Bessel roots
    // (disk limit; both J_m and J_m' families appear).
    const auto spec = esp::EllipsoidSpec::from_axes(1, 1, 0.1);
    double worst = 0.0;
    std::string where;
    for (int m = 1; m <= 5; ++m) {
      const auto res = esp::solve_biaxial_fd(spec, m, 800, 5, esp::PoleBc::AUTO);
      std::vector<double> roots;
      for (int k = 1; k <= 8; ++k) {
        roots.push_back(esp::bessel_root(m, k, esp::BesselRootKind::J));
        roots.push_back(esp::bessel_root(m, k, esp::BesselRootKind::JPrime));
      }
      for (int i = 0; i < 5; ++i) {
        const double lam = res.values[static_cast<size_t>(i)];
        double best = 1e300;
        for (double r : roots)
          best = std::min(best, std::fabs(lam - r * r) / (r * r));
        track(best, worst, "m=" + std::to_string(m) + " index=" + std::to_string(i),
              where);
      }
    }
    d = "worst relative gap to a squared root " + num(worst) + " at " + where;
    return worst < 0.05;
  });

  // ---------------------------------------------------------------- Galerkin
  v.run("galerkin-sphere-exactness", [&](std::string& d) {
    // The quadrature is exact on the sphere, so every eigenvalue through
    // degree l_max - 2 = 6 must be l(l+1) to solver precision, with the full
    // 2l+1 multiplicity.
    const auto mats =
        esp::assemble_galerkin(esp::EllipsoidSpec::from_axes(1, 1, 1), 8, jobs);
    const auto eig = esp::eig_generalized(mats.K, mats.M, 49);
    double worst = 0.0;
    for (int l = 0; l <= 6; ++l) {
      for (int i = l * l; i < (l + 1) * (l + 1); ++i)
        worst = std::max(worst, std::fabs(eig.values[static_cast<size_t>(i)] -
                                          l * (l + 1.0)) /
                                    std::max(1.0, l * (l + 1.0)));
    }
    d = "worst relative deviation from l(l+1) " + num(worst);
    return worst < 1e-10;
  });

  v.run("galerkin-truncation-stability", [&](std::string& d) {
    // The shape perturbation couples degree l to l and l +- 2, so truncating
    // at l_max leaves the top two or three retained bands under-resolved:
    // measured shifts when raising l_max from 8 to 12 at eps = 0.1 are
    // ~7e-9 for the first 16 values (l <= 3), ~4e-8 through l = 4, and
    // ~7e-5 for the l = 5 band sitting three below the cut.  We pin both
    // regimes with a factor ~10 margin over measurement.
    const auto spec = esp::EllipsoidSpec::from_perturbation(0, 1, -1, 0.1);
    const auto s8 = esp::solve_triaxial(spec, 8, 36, jobs);
    const auto s12 = esp::solve_triaxial(spec, 12, 36, jobs);
    double worst16 = 0.0;
    double worst36 = 0.0;
    for (int i = 0; i < 36; ++i) {
      const double shift = std::fabs(s8.values[static_cast<size_t>(i)] -
                                     s12.values[static_cast<size_t>(i)]) /
                           std::max(1.0, std::fabs(s12.values[static_cast<size_t>(i)]));
      if (i < 16) worst16 = std::max(worst16, shift);
      worst36 = std::max(worst36, shift);
    }
    d = "relative truncation shift " + num(worst16) + " (first 16) .. " +
        num(worst36) + " (first 36)";
    return worst16 < 1e-7 && worst36 < 5e-4;
  });

  v.run("galerkin-axis-permutation", [&](std::string& d) {
    // Eigenvalues are functions of the axis multiset only; the basis spans
    // the same subspace in every chart orientation.
    const double ax[3] = {1.05, 0.95, 1.0};
    const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                             {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
    std::vector<double> base;
    double worst = 0.0;
    for (const auto& p : perms) {
      const auto spec = esp::EllipsoidSpec::from_axes(ax[p[0]], ax[p[1]], ax[p[2]]);
      const auto s = esp::solve_triaxial(spec, 6, 20, jobs);
      if (base.empty()) {
        base = s.values;
        continue;
      }
      for (int i = 0; i < 20; ++i)
        worst = std::max(worst, std::fabs(s.values[static_cast<size_t>(i)] -
                                          base[static_cast<size_t>(i)]) /
                                    std::max(1.0, std::fabs(base[static_cast<size_t>(i)])));
    }
    d = "worst relative deviation across orientations " + num(worst);
    return worst < 1e-10;
  });

  v.run("galerkin-window-extraction", [&](std::string& d) {
    const auto t1 = esp::slope_extraction(0, 1, -1, {0.1}, 1, 8, jobs);
    const auto t2 = esp::slope_extraction(0, 1, -1, {0.1}, 2, 8, jobs);
    const bool ok = t1.slope.size() == 1 && t1.slope[0].size() == 3 &&
                    t2.slope[0].size() == 5;
    d = "level 1 -> " + std::to_string(t1.slope[0].size()) +
        " slopes; level 2 -> " + std::to_string(t2.slope[0].size());
    return ok;
  });

  // Slope tables shared by the halving and Richardson checks.
  std::vector<esp::SlopeTable> slope_cache;
  std::vector<std::vector<double>> closed_cache;
  bool slope_cache_ok = true;
  try {
    for (int l = 1; l <= 2; ++l) {
      slope_cache.push_back(
          esp::slope_extraction(0, 1, -1, {0.1, 0.05, 0.025}, l, 10, jobs));
      std::vector<double> closed;
      for (const auto& pe : esp::perturbed_spectrum(l, 0, 1, -1))
        closed.push_back(pe.lambda1);
      closed_cache.push_back(closed);
    }
  } catch (const std::exception&) {
    slope_cache_ok = false;
  }

  v.run("galerkin-slope-halving", [&](std::string& d) {
    if (!slope_cache_ok) {
      d = "slope extraction failed";
      return false;
    }
    double lo = 1e300, hi = -1e300;
    for (size_t li = 0; li < slope_cache.size(); ++li) {
      const auto& tab = slope_cache[li];
      for (size_t r = 0; r < tab.slope[0].size(); ++r) {
        const double e1 = std::fabs(tab.slope[0][r] - closed_cache[li][r]);
        const double e2 = std::fabs(tab.slope[1][r] - closed_cache[li][r]);
        if (e1 < 1e-5) continue;  // second-order coefficient too small to rate
        const double ratio = e2 / e1;
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
      }
    }
    d = "error ratios in [" + num(lo) + " .. " + num(hi) + "]";
    return lo > 0.3 && hi < 0.7;
  });

  v.run("richardson-closed-form", [&](std::string& d) {
    if (!slope_cache_ok) {
      d = "slope extraction failed";
      return false;
    }
    double worst = 0.0;
    for (size_t li = 0; li < slope_cache.size(); ++li) {
      const auto rich = esp::richardson3(slope_cache[li]);
      for (size_t r = 0; r < rich.size(); ++r)
        worst = std::max(worst, std::fabs(rich[r] - closed_cache[li][r]));
    }
    d = "worst extrapolated-slope deviation " + num(worst);
    return worst < 5e-3;
  });

  // ------------------------------------------------------------------- nodal
  v.run("nodal-conjectured-sequences", [&](std::string& d) {
    // conjecture_sequences returns the statement-as-written tables (the
    // oblate label carries the zonal-first sequence there); the adjudicated
    // pairing by computed slope ordering is what check_conjecture applies
    // and is covered by nodal-analytic-exemplars.
    const std::vector<int> obl = esp::conjecture_sequences(4, esp::ShapeCase::OBLATE);
    const std::vector<int> pro = esp::conjecture_sequences(4, esp::ShapeCase::PROLATE);
    const std::vector<int> tri = esp::conjecture_sequences(4, esp::ShapeCase::TRIAXIAL);
    const std::vector<int> want_obl = {5, 8, 8, 12, 12, 12, 12, 8, 8};
    std::vector<int> want_pro(want_obl.rbegin(), want_obl.rend());
    const std::vector<int> want_tri = {5, 8, 8, 12, 10, 12, 8, 8, 5};
    bool ok = pro == want_pro && obl == want_obl && tri == want_tri;
    ok = ok && esp::conjecture_sequences(2, esp::ShapeCase::TRIAXIAL) ==
                   std::vector<int>{3, 4, 4, 4, 3};
    for (const auto shape : {esp::ShapeCase::OBLATE, esp::ShapeCase::PROLATE,
                             esp::ShapeCase::TRIAXIAL}) {
      ok = ok && esp::conjecture_sequences(0, shape) == std::vector<int>{1};
      for (int l = 1; l <= 7; ++l)
        ok = ok && static_cast<int>(esp::conjecture_sequences(l, shape).size()) ==
                       2 * l + 1;
    }
    // The triaxial sequence reads the same under orientation reversal.
    for (int l = 1; l <= 5; ++l) {
      auto seq = esp::conjecture_sequences(l, esp::ShapeCase::TRIAXIAL);
      std::vector<int> rev(seq.rbegin(), seq.rend());
      ok = ok && seq == rev;
    }
    d = ok ? "degree-4 sequences and palindromes as expected" : "mismatch";
    return ok;
  });

  v.run("nodal-raster-reference-counts", [&](std::string& d) {
    using esp::Family;
    const esp::ModeCombination constant = {{{0, 0, Family::COS}, 1.0}};
    const esp::ModeCombination zonal1 = {{{1, 0, Family::COS}, 1.0}};
    const esp::ModeCombination zonal4 = {{{4, 0, Family::COS}, 1.0}};
    const auto c0 = esp::count_nodal_domains_checked(constant, 401, 800);
    const auto c1 = esp::count_nodal_domains_checked(zonal1, 401, 800);
    const auto c4 = esp::count_nodal_domains_checked(zonal4, 401, 800);
    // Mixed-line modes of the degree-2 cos/even block: three domains each,
    // raster and analytic counters agreeing.
    bool lines_ok = true;
    for (const auto& pe : esp::perturbed_spectrum(2, 0, 1, -1)) {
      if (pe.source != esp::BlockKind::COS_EVEN) continue;
      if (std::fabs(pe.lambda1) < 1e-9) continue;
      const auto cc = esp::count_nodal_domains_checked(pe.eigvec, 401, 800);
      const int exact = esp::exact_nodal_count(2, pe.eigvec, 0, 1, -1);
      lines_ok = lines_ok && !cc.suspect && cc.count == 3 && exact == 3;
    }
    const bool ok = !c0.suspect && c0.count == 1 && !c1.suspect &&
                    c1.count == 2 && !c4.suspect && c4.count == 5 && lines_ok;
    d = "constant " + std::to_string(c0.count) + "; zonal-1 " +
        std::to_string(c1.count) + "; zonal-4 " + std::to_string(c4.count) +
        "; degree-2 line modes " + (lines_ok ? "3" : "mismatch");
    return ok;
  });

  v.run("nodal-raster-rotation-invariance", [&](std::string& d) {
    // Rotating a combination about the polar axis maps cos components onto
    // cos/sin mixtures; the count must not move.
    esp::ModeCombination base;
    for (const auto& pe : esp::perturbed_spectrum(2, 0, 1, -1)) {
      if (pe.source == esp::BlockKind::COS_EVEN && pe.lambda1 < -1e-9) {
        base = pe.eigvec;
        break;
      }
    }
    if (base.empty()) {
      d = "reference mode not found";
      return false;
    }
    int first = -1;
    bool ok = true;
    for (int k = 0; k < 8; ++k) {
      const double delta = k * kPi / 8.0;
      esp::ModeCombination rotated;
      for (const auto& term : base) {
        const double mm = term.first.m;
        if (term.first.family == esp::Family::COS) {
          rotated.push_back({term.first, term.second * std::cos(mm * delta)});
          if (term.first.m >= 1)
            rotated.push_back({{term.first.l, term.first.m, esp::Family::SIN},
                               term.second * std::sin(mm * delta)});
        } else {
          rotated.push_back({term.first, term.second * std::cos(mm * delta)});
          rotated.push_back({{term.first.l, term.first.m, esp::Family::COS},
                             -term.second * std::sin(mm * delta)});
        }
      }
      const auto cc = esp::count_nodal_domains_checked(rotated, 401, 800);
      if (first < 0) first = cc.count;
      ok = ok && !cc.suspect && cc.count == first;
    }
    d = "count " + std::to_string(first) + " across 8 rotations";
    return ok && first == 3;
  });

  v.run("nodal-analytic-biaxial-counts", [&](std::string& d) {
    // Pure modes of a polar-distinguished biaxial direction: l+1 bands for
    // m = 0, otherwise 2m(l+1-m) patches.
    bool ok = true;
    std::string bad;
    for (int l = 0; l <= 5 && ok; ++l) {
      for (int m = 0; m <= l && ok; ++m) {
        const int want = m == 0 ? l + 1 : 2 * m * (l + 1 - m);
        for (const auto fam : {esp::Family::COS, esp::Family::SIN}) {
          if (fam == esp::Family::SIN && m == 0) continue;
          const esp::ModeCombination mode = {{{l, m, fam}, 1.0}};
          const int got = esp::exact_nodal_count(l, mode, 0.2, 0.2, 0.7);
          if (got != want) {
            ok = false;
            bad = "l=" + std::to_string(l) + " m=" + std::to_string(m) +
                  " got " + std::to_string(got) + " want " + std::to_string(want);
          }
        }
      }
    }
    d = ok ? "all pure modes l<=5 counted" : bad;
    return ok;
  });

  v.run("nodal-analytic-exemplars", [&](std::string& d) {
    // Degree-4 count sequences for the three shape cases, raster-validated.
    const auto pro = esp::check_conjecture(
        esp::EllipsoidSpec::from_perturbation(0, 0, 1, 0.1), 4, 401, 800);
    const auto obl = esp::check_conjecture(
        esp::EllipsoidSpec::from_perturbation(1, 1, 0, 0.1), 4, 401, 800);
    const auto tri =
        esp::check_conjecture(esp::EllipsoidSpec::from_axes(1, 2, 3), 4, 401, 800);
    auto seq_of = [](const esp::ConjectureReport& r) {
      std::vector<int> s;
      for (const auto& row : r.rows) s.push_back(row.conjectured);
      return s;
    };
    const std::vector<int> want_pro = {5, 8, 8, 12, 12, 12, 12, 8, 8};
    const std::vector<int> want_obl(want_pro.rbegin(), want_pro.rend());
    const std::vector<int> want_tri = {5, 8, 8, 12, 10, 12, 8, 8, 5};
    bool ok = pro.shape == esp::ShapeCase::PROLATE && seq_of(pro) == want_pro &&
              pro.all_match && pro.courant_ok;
    ok = ok && obl.shape == esp::ShapeCase::OBLATE && seq_of(obl) == want_obl &&
         obl.all_match && obl.courant_ok;
    ok = ok && tri.shape == esp::ShapeCase::TRIAXIAL && seq_of(tri) == want_tri &&
         tri.all_match && tri.courant_ok;
    d = ok ? "prolate/oblate/triaxial degree-4 sequences all match"
           : "sequence or match failure";
    return ok;
  });

  v.run("nodal-analytic-random-sweep", [&](std::string& d) {
    // Twenty random pairwise-distinct directions: per-cluster count
    // multisets match the conjectured sequence and respect the Courant
    // bound, degrees 1..5.
    int checked = 0;
    for (int draw = 0; draw < 20; ++draw) {
      double al = uniform_in(v.rng, -1, 1);
      double be = uniform_in(v.rng, -1, 1);
      double ga = uniform_in(v.rng, -1, 1);
      if (std::fabs(be - al) < 0.05) be += 0.4;
      if (std::fabs(ga - al) < 0.05 || std::fabs(ga - be) < 0.05) ga -= 0.55;
      for (int l = 1; l <= 5; ++l) {
        const auto sp = esp::perturbed_spectrum(l, al, be, ga);
        const auto want = esp::conjecture_sequences(l, esp::ShapeCase::TRIAXIAL);
        std::vector<int> got;
        double scale = 1.0;
        for (const auto& pe : sp) scale = std::max(scale, std::fabs(pe.lambda1));
        size_t i = 0;
        while (i < sp.size()) {
          size_t j = i;
          while (j + 1 < sp.size() &&
                 std::fabs(sp[j + 1].lambda1 - sp[i].lambda1) <= 1e-9 * scale)
            ++j;
          std::vector<int> cluster_got, cluster_want;
          for (size_t r = i; r <= j; ++r) {
            const int count = esp::exact_nodal_count(l, sp[r].eigvec, al, be, ga);
            cluster_got.push_back(count);
            cluster_want.push_back(want[r]);
            // Courant: at most (index within the whole spectrum) domains,
            // where the cluster's top index bounds every member.
            const int bound = l * l + static_cast<int>(j) + 1;
            if (count > bound) {
              d = "Courant bound violated at degree " + std::to_string(l);
              return false;
            }
          }
          if (!multiset_equal_int(cluster_got, cluster_want)) {
            d = "cluster mismatch at degree " + std::to_string(l) + " draw " +
                std::to_string(draw);
            return false;
          }
          ++checked;
          i = j + 1;
        }
      }
    }
    d = std::to_string(checked) + " clusters matched across 20 directions";
    return true;
  });

  std::printf("verify: %d/%d checks passed\n", v.total - v.failures, v.total);
  std::fflush(stdout);
  if (table) {
    table->trailer.push_back("checks_passed: " + std::to_string(v.total - v.failures) +
                             "/" + std::to_string(v.total));
  }
  return v.failures;
}

}  // namespace ellspec
