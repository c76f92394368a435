#include "esp/biaxial_fd.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "esp/eigensolve.hpp"
#include "esp/errors.hpp"

namespace esp {

namespace {

double pfun(double a, double c, double phi) {
  double sp = std::sin(phi), cp = std::cos(phi);
  return a * sp / std::sqrt(a * a * cp * cp + c * c * sp * sp);
}

double wfun(double a, double phi) {
  double sp = std::sin(phi);
  return a * a * sp * sp;
}

struct Discretization {
  std::vector<double> diag, off, mass, nodes;
};

Discretization discretize(double a, double c, int m, int N, PoleBc bc) {
  const double h = M_PI / N;
  Discretization d;

  if (bc == PoleBc::NEUMANN) {
    // Unknowns at centers (j-1/2)h, fluxes at faces j*h; p(0) = p(pi) = 0
    // makes both boundary fluxes vanish without extra equations.
    std::vector<double> pf(N + 1), pc(N);
    for (int j = 0; j <= N; ++j) pf[j] = pfun(a, c, j * h);
    d.nodes.resize(N);
    for (int j = 0; j < N; ++j) {
      d.nodes[j] = (j + 0.5) * h;
      pc[j] = pfun(a, c, d.nodes[j]);
    }
    d.diag.resize(N);
    d.mass.resize(N);
    for (int j = 0; j < N; ++j) {
      d.diag[j] = (pf[j] + pf[j + 1]) / h;
      if (m != 0) d.diag[j] += h * m * m / pc[j];
      d.mass[j] = h * wfun(a, d.nodes[j]) / pc[j];
    }
    d.off.resize(N - 1);
    for (int j = 0; j < N - 1; ++j) d.off[j] = -pf[j + 1] / h;
    return d;
  }

  if (m == 0) {
    // Vertex grid including the poles; finite-volume half cells there keep
    // the constant mode exact.
    std::vector<double> pf(N);
    for (int j = 0; j < N; ++j) pf[j] = pfun(a, c, (j + 0.5) * h);
    d.nodes.resize(N + 1);
    for (int j = 0; j <= N; ++j) d.nodes[j] = j * h;
    d.diag.assign(N + 1, 0.0);
    for (int j = 0; j < N; ++j) {
      d.diag[j] += pf[j] / h;
      d.diag[j + 1] += pf[j] / h;
    }
    d.off.resize(N);
    for (int j = 0; j < N; ++j) d.off[j] = -pf[j] / h;
    d.mass.resize(N + 1);
    for (int j = 1; j < N; ++j) {
      d.mass[j] = h * wfun(a, d.nodes[j]) / pfun(a, c, d.nodes[j]);
    }
    d.mass[0] = 0.5 * h * wfun(a, 0.25 * h) / pfun(a, c, 0.25 * h);
    d.mass[N] = 0.5 * h * wfun(a, M_PI - 0.25 * h) / pfun(a, c, M_PI - 0.25 * h);
    return d;
  }

  // m >= 1: interior vertices only (mode functions vanish at the poles).
  std::vector<double> pf(N), pc(N - 1);
  for (int j = 0; j < N; ++j) pf[j] = pfun(a, c, (j + 0.5) * h);
  d.nodes.resize(N - 1);
  for (int j = 0; j < N - 1; ++j) {
    d.nodes[j] = (j + 1) * h;
    pc[j] = pfun(a, c, d.nodes[j]);
  }
  d.diag.resize(N - 1);
  d.mass.resize(N - 1);
  for (int j = 0; j < N - 1; ++j) {
    d.diag[j] = (pf[j] + pf[j + 1]) / h + h * m * m / pc[j];
    d.mass[j] = h * wfun(a, d.nodes[j]) / pc[j];
  }
  d.off.resize(N - 2);
  for (int j = 0; j < N - 2; ++j) d.off[j] = -pf[j + 1] / h;
  return d;
}

}  // namespace

BiaxialEigenResult solve_biaxial_fd(const EllipsoidSpec& spec, int m, int N,
                                    int k, PoleBc bc, bool want_vectors) {
  if (!spec.biaxial()) {
    throw domain_error("solve_biaxial_fd: spec must be biaxial (a == b)");
  }
  if (m < 0) throw domain_error("solve_biaxial_fd: m must be >= 0");
  if (N < 16) throw domain_error("solve_biaxial_fd: need N >= 16");

  Discretization d = discretize(spec.a, spec.c, m, N, bc);
  const int n = static_cast<int>(d.diag.size());
  if (k < 1 || k > n) {
    throw domain_error("solve_biaxial_fd: need 1 <= k <= " +
                       std::to_string(n));
  }

  // Symmetrize the generalized pencil (T, diag mass) by the diagonal
  // similarity s = mass^{-1/2}.
  std::vector<double> s(n);
  for (int j = 0; j < n; ++j) s[j] = 1.0 / std::sqrt(d.mass[j]);
  SymTridiagonal T;
  T.diag.resize(n);
  for (int j = 0; j < n; ++j) T.diag[j] = d.diag[j] * s[j] * s[j];
  T.offdiag.resize(n - 1);
  for (int j = 0; j + 1 < n; ++j) T.offdiag[j] = d.off[j] * s[j] * s[j + 1];

  BiaxialEigenResult result;
  result.m = m;
  result.grid = FdGrid{N, M_PI / N};
  result.bc = bc;

  if (want_vectors) {
    EigenPairs ep = eig_tridiagonal(T);
    result.values.assign(ep.values.begin(), ep.values.begin() + k);
    result.nodes = d.nodes;
    result.vectors.resize(k);
    for (int q = 0; q < k; ++q) {
      result.vectors[q].resize(n);
      for (int j = 0; j < n; ++j) {
        result.vectors[q][j] = s[j] * ep.vectors[q][j];  // back to physical u
      }
    }
  } else {
    std::vector<double> vals = eig_tridiagonal_values(T);
    result.values.assign(vals.begin(), vals.begin() + k);
  }
  return result;
}

ConvergenceStudy convergence_study(const EllipsoidSpec& spec, int m,
                                   const std::vector<int>& sizes, int k,
                                   PoleBc bc) {
  if (sizes.size() < 3) {
    throw domain_error("convergence_study: need at least three grid sizes");
  }
  ConvergenceStudy study;
  study.sizes = sizes;
  for (int N : sizes) {
    study.values.push_back(solve_biaxial_fd(spec, m, N, k, bc).values);
  }
  const size_t last = sizes.size() - 1;
  study.order.resize(k);
  for (int q = 0; q < k; ++q) {
    double d1 = study.values[last - 2][q] - study.values[last - 1][q];
    double d2 = study.values[last - 1][q] - study.values[last][q];
    study.order[q] = (d2 != 0.0) ? std::log2(d1 / d2) :
                                   std::numeric_limits<double>::quiet_NaN();
  }
  return study;
}

}  // namespace esp
