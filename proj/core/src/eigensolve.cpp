#include "esp/eigensolve.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "esp/errors.hpp"

namespace esp {

namespace {

// Implicit-shift QL on (d, e); if z is non-null the rotations are
// accumulated into its columns (z must come in as identity, row-major n*n).
// Classic tql2-style iteration; e is used as scratch with e[n-1] spare.
void ql_implicit(std::vector<double>& d, std::vector<double>& e, double* z,
                 int n) {
  if (n == 0) return;
  e.push_back(0.0);  // e[n-1] sentinel
  for (int l = 0; l < n; ++l) {
    int iter = 0;
    int m;
    do {
      for (m = l; m < n - 1; ++m) {
        double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= 1e-300 + 2.3e-16 * dd) break;
      }
      if (m != l) {
        if (iter++ == 30) {
          throw numerical_error(
              "eig_tridiagonal: QL iteration failed to converge");
        }
        double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
        double r = std::hypot(g, 1.0);
        g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
        double s = 1.0, c = 1.0, p = 0.0;
        for (int i = m - 1; i >= l; --i) {
          double f = s * e[i];
          double b = c * e[i];
          r = std::hypot(f, g);
          e[i + 1] = r;
          if (r == 0.0) {
            d[i + 1] -= p;
            e[m] = 0.0;
            break;
          }
          s = f / r;
          c = g / r;
          g = d[i + 1] - p;
          r = (d[i] - g) * s + 2.0 * c * b;
          p = s * r;
          d[i + 1] = g + p;
          g = c * r - b;
          if (z != nullptr) {
            for (int k = 0; k < n; ++k) {
              double zk1 = z[static_cast<size_t>(k) * n + i + 1];
              double zk0 = z[static_cast<size_t>(k) * n + i];
              z[static_cast<size_t>(k) * n + i + 1] = s * zk0 + c * zk1;
              z[static_cast<size_t>(k) * n + i] = c * zk0 - s * zk1;
            }
          }
        }
        if (r == 0.0 && m - 1 >= l) continue;
        d[l] -= p;
        e[l] = g;
        e[m] = 0.0;
      }
    } while (m != l);
  }
  e.pop_back();
}

// Deterministic sign rule: flip so the first component with |v_i| > 1e-12
// is positive.
void fix_sign(std::vector<double>& v) {
  for (double x : v) {
    if (std::abs(x) > 1e-12) {
      if (x < 0.0) {
        for (double& y : v) y = -y;
      }
      return;
    }
  }
}

// Sort ascending, permuting columns along.
void sort_pairs(std::vector<double>& values,
                std::vector<std::vector<double>>& vectors) {
  const int n = static_cast<int>(values.size());
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](int i, int j) { return values[i] < values[j]; });
  std::vector<double> v2(n);
  std::vector<std::vector<double>> w2(vectors.empty() ? 0 : n);
  for (int k = 0; k < n; ++k) {
    v2[k] = values[idx[k]];
    if (!vectors.empty()) w2[k] = std::move(vectors[idx[k]]);
  }
  values = std::move(v2);
  vectors = std::move(w2);
}

double tridiagonal_residual(const SymTridiagonal& T, const EigenPairs& ep) {
  const int n = static_cast<int>(T.diag.size());
  double worst = 0.0;
  for (size_t k = 0; k < ep.values.size(); ++k) {
    const std::vector<double>& v = ep.vectors[k];
    double norm2 = 0.0;
    for (int i = 0; i < n; ++i) {
      double r = T.diag[i] * v[i] - ep.values[k] * v[i];
      if (i > 0) r += T.offdiag[i - 1] * v[i - 1];
      if (i + 1 < n) r += T.offdiag[i] * v[i + 1];
      norm2 += r * r;
    }
    worst = std::max(worst, std::sqrt(norm2));
  }
  return worst;
}

}  // namespace

EigenPairs eig_tridiagonal(const SymTridiagonal& T) {
  const int n = static_cast<int>(T.diag.size());
  if (n > 0 && T.offdiag.size() != static_cast<size_t>(n) - 1) {
    throw domain_error("eig_tridiagonal: offdiag must have n-1 entries");
  }
  std::vector<double> d = T.diag;
  std::vector<double> e = T.offdiag;
  std::vector<double> z(static_cast<size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) z[static_cast<size_t>(i) * n + i] = 1.0;

  ql_implicit(d, e, z.data(), n);

  EigenPairs ep;
  ep.values = std::move(d);
  ep.vectors.assign(n, std::vector<double>(n));
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < n; ++i) {
      ep.vectors[k][i] = z[static_cast<size_t>(i) * n + k];
    }
    fix_sign(ep.vectors[k]);
  }
  sort_pairs(ep.values, ep.vectors);
  ep.residual_bound = tridiagonal_residual(T, ep);
  return ep;
}

std::vector<double> eig_tridiagonal_values(const SymTridiagonal& T) {
  const int n = static_cast<int>(T.diag.size());
  if (n > 0 && T.offdiag.size() != static_cast<size_t>(n) - 1) {
    throw domain_error("eig_tridiagonal_values: offdiag must have n-1 entries");
  }
  std::vector<double> d = T.diag;
  std::vector<double> e = T.offdiag;
  ql_implicit(d, e, nullptr, n);
  std::sort(d.begin(), d.end());
  return d;
}

EigenPairs eig_dense_symmetric(const Matrix& A) {
  const int n = A.n;
  double amax = 0.0;
  for (double x : A.a) amax = std::max(amax, std::abs(x));
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (std::abs(A(i, j) - A(j, i)) > 1e-12 * std::max(1.0, amax)) {
        throw domain_error("eig_dense_symmetric: matrix is not symmetric");
      }
    }
  }

  Matrix S = A;  // rotated in place
  std::vector<double> v(static_cast<size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) v[static_cast<size_t>(i) * n + i] = 1.0;

  double fro = 0.0;
  for (double x : A.a) fro += x * x;
  fro = std::sqrt(fro);
  const double tol = 1e-13 * std::max(fro, 1e-300);

  for (int sweep = 0; sweep < 60; ++sweep) {
    double off = 0.0;
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) off += 2.0 * S(i, j) * S(i, j);
    }
    off = std::sqrt(off);
    if (off <= tol) {
      EigenPairs ep;
      ep.values.resize(n);
      for (int i = 0; i < n; ++i) ep.values[i] = S(i, i);
      ep.vectors.assign(n, std::vector<double>(n));
      for (int k = 0; k < n; ++k) {
        for (int i = 0; i < n; ++i) {
          ep.vectors[k][i] = v[static_cast<size_t>(i) * n + k];
        }
        fix_sign(ep.vectors[k]);
      }
      sort_pairs(ep.values, ep.vectors);
      // residual against the original matrix
      double worst = 0.0;
      for (int k = 0; k < n; ++k) {
        double norm2 = 0.0;
        for (int i = 0; i < n; ++i) {
          double r = -ep.values[k] * ep.vectors[k][i];
          for (int j = 0; j < n; ++j) r += A(i, j) * ep.vectors[k][j];
          norm2 += r * r;
        }
        worst = std::max(worst, std::sqrt(norm2));
      }
      ep.residual_bound = worst;
      return ep;
    }

    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        double apq = S(p, q);
        if (std::abs(apq) <= 1e-300) continue;
        double app = S(p, p), aqq = S(q, q);
        double tau = (aqq - app) / (2.0 * apq);
        double t = std::copysign(1.0, tau) /
                   (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        double c = 1.0 / std::sqrt(1.0 + t * t);
        double s = t * c;
        for (int k = 0; k < n; ++k) {
          double skp = S(k, p), skq = S(k, q);
          S(k, p) = c * skp - s * skq;
          S(k, q) = s * skp + c * skq;
        }
        for (int k = 0; k < n; ++k) {
          double spk = S(p, k), sqk = S(q, k);
          S(p, k) = c * spk - s * sqk;
          S(q, k) = s * spk + c * sqk;
        }
        for (int k = 0; k < n; ++k) {
          double vkp = v[static_cast<size_t>(k) * n + p];
          double vkq = v[static_cast<size_t>(k) * n + q];
          v[static_cast<size_t>(k) * n + p] = c * vkp - s * vkq;
          v[static_cast<size_t>(k) * n + q] = s * vkp + c * vkq;
        }
      }
    }
  }
  throw numerical_error("eig_dense_symmetric: Jacobi sweeps did not converge");
}

namespace {

// Lower-triangular Cholesky factor of M, or throw.
Matrix cholesky(const Matrix& M) {
  const int n = M.n;
  Matrix L(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      double sum = M(i, j);
      for (int k = 0; k < j; ++k) sum -= L(i, k) * L(j, k);
      if (i == j) {
        if (!(sum > 0.0)) {
          throw numerical_error(
              "eig_generalized: mass matrix is not positive definite "
              "(quadrature under-resolution?)");
        }
        L(i, i) = std::sqrt(sum);
      } else {
        L(i, j) = sum / L(j, j);
      }
    }
  }
  return L;
}

}  // namespace

EigenPairs eig_generalized(const Matrix& A, const Matrix& M, int k) {
  const int n = A.n;
  if (M.n != n) throw domain_error("eig_generalized: size mismatch");
  if (k < 1 || k > n) {
    throw domain_error("eig_generalized: need 1 <= k <= n");
  }
  Matrix L = cholesky(M);

  // B = L^-1 A L^-T, built column by column: solve L X = A, then
  // B^T = L^-1 X^T (i.e. forward-substitute twice).
  Matrix X(n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      double sum = A(i, j);
      for (int p = 0; p < i; ++p) sum -= L(i, p) * X(p, j);
      X(i, j) = sum / L(i, i);
    }
  }
  Matrix B(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double sum = X(i, j);
      for (int p = 0; p < j; ++p) sum -= L(j, p) * B(i, p);
      B(i, j) = sum / L(j, j);
    }
  }
  // symmetrize roundoff
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      double m = 0.5 * (B(i, j) + B(j, i));
      B(i, j) = m;
      B(j, i) = m;
    }
  }

  EigenPairs dense = eig_dense_symmetric(B);

  EigenPairs out;
  out.values.assign(dense.values.begin(), dense.values.begin() + k);
  out.vectors.resize(k);
  for (int q = 0; q < k; ++q) {
    // x = L^-T y by back substitution
    std::vector<double> x(dense.vectors[q]);
    for (int i = n - 1; i >= 0; --i) {
      double sum = x[i];
      for (int p = i + 1; p < n; ++p) sum -= L(p, i) * x[p];
      x[i] = sum / L(i, i);
    }
    fix_sign(x);
    out.vectors[q] = std::move(x);
  }
  // residual in the pencil sense: ||A x - lambda M x||
  double worst = 0.0;
  for (int q = 0; q < k; ++q) {
    double norm2 = 0.0;
    for (int i = 0; i < n; ++i) {
      double r = 0.0;
      for (int j = 0; j < n; ++j) {
        r += (A(i, j) - out.values[q] * M(i, j)) * out.vectors[q][j];
      }
      norm2 += r * r;
    }
    worst = std::max(worst, std::sqrt(norm2));
  }
  out.residual_bound = worst;
  return out;
}

}  // namespace esp
