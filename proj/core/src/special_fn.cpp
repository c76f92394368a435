#include "esp/special_fn.hpp"

#include <cmath>
#include <cstdlib>
#include <string>

#include "esp/errors.hpp"

namespace esp {

namespace {

void check_mode(LegendreMode mode) {
  if (mode.l < 0 || mode.m < 0 || mode.m > mode.l) {
    throw domain_error("legendre: need l >= 0 and 0 <= m <= l, got l=" +
                       std::to_string(mode.l) + " m=" + std::to_string(mode.m));
  }
}

// Q_l^m(t) by upward recurrence in l at fixed m.  Derivation: differentiate
// the defining relation (1-t^2)^{-m/2} Q_l^m = d^{m+l} (1-t^2)^l once more to
// climb l.  Seeds:
//   Q_m^m     = (-1)^m (2m)! (1-t^2)^{m/2}
//   Q_{m+1}^m = -2(m+1)(2m+1) t Q_m^m
// and for l >= m+2
//   Q_l^m = [ -2l(2l-1) t Q_{l-1}^m - 4l(l-1)(l+m-1) Q_{l-2}^m ] / (l - m).
double q_recurrence(int l, int m, double t, double one_minus_t2) {
  double qmm = std::pow(one_minus_t2, 0.5 * m);
  // (-1)^m (2m)!
  double fact = 1.0;
  for (int j = 1; j <= 2 * m; ++j) fact *= j;
  if (m % 2 == 1) fact = -fact;
  qmm *= fact;
  if (l == m) return qmm;

  double qprev = qmm;                                // Q_m^m
  double qcur = -2.0 * (m + 1) * (2 * m + 1) * t * qmm;  // Q_{m+1}^m
  for (int n = m + 2; n <= l; ++n) {
    double qnext = (-2.0 * n * (2 * n - 1) * t * qcur -
                    4.0 * n * (n - 1.0) * (n + m - 1.0) * qprev) /
                   (n - m);
    qprev = qcur;
    qcur = qnext;
  }
  return qcur;
}

}  // namespace

double legendre_q(LegendreMode mode, double t) {
  check_mode(mode);
  if (std::abs(t) > 1.0) {
    throw domain_error("legendre_q: |t| > 1");
  }
  return q_recurrence(mode.l, mode.m, t, 1.0 - t * t);
}

double legendre_norm_constant(LegendreMode mode) {
  check_mode(mode);
  const int l = mode.l, m = mode.m;
  // integral_{-1}^{1} (Q_l^m)^2 dt = 4^l (l!)^2 * 2/(2l+1) * (l+m)!/(l-m)!
  double log_int = 2.0 * l * std::log(2.0) + 2.0 * std::lgamma(l + 1.0) +
                   std::log(2.0 / (2 * l + 1)) + std::lgamma(l + m + 1.0) -
                   std::lgamma(l - m + 1.0);
  // azimuthal factor: integral of cos^2(m theta) over [0, 2pi)
  double log_c = std::log((m == 0) ? 2.0 * M_PI : M_PI);
  return std::exp(-0.5 * (log_c + log_int));
}

double legendre_p_normalized(LegendreMode mode, double t) {
  return legendre_norm_constant(mode) * legendre_q(mode, t);
}

LegendreDerivs legendre_p_derivs(LegendreMode mode, double t) {
  check_mode(mode);
  if (!(std::abs(t) < 1.0)) {
    throw domain_error("legendre_p_derivs: need |t| < 1 strictly");
  }
  const int l = mode.l, m = mode.m;
  const double omt2 = 1.0 - t * t;
  const double q = q_recurrence(l, m, t, omt2);
  // dQ/dt = -m t Q / (1-t^2) + Q_l^{m+1} / sqrt(1-t^2); the order-raised
  // term drops out when m+1 > l because d^{m+1+l} (1-t^2)^l = 0.
  double q_up = (m + 1 <= l) ? q_recurrence(l, m + 1, t, omt2) : 0.0;
  double dq = -m * t * q / omt2 + q_up / std::sqrt(omt2);
  // Second derivative from the associated Legendre equation
  // (1-t^2) Q'' - 2t Q' + [l(l+1) - m^2/(1-t^2)] Q = 0.
  double d2q = (2.0 * t * dq - (l * (l + 1.0) - m * m / omt2) * q) / omt2;

  const double a = legendre_norm_constant(mode);
  return LegendreDerivs{a * q, a * dq, a * d2q};
}

double legendre_ratio(LegendreMode mode) {
  check_mode(mode);
  const double l = mode.l, m = mode.m;
  return (2.0 * l * l - 2.0 * m * m + 2.0 * l - 1.0) /
         ((2.0 * l + 3.0) * (2.0 * l - 1.0));
}

double bessel_j(int m, double x) {
  if (m < 0 || x < 0.0) {
    throw domain_error("bessel_j: need m >= 0 and x >= 0");
  }
  if (x == 0.0) return (m == 0) ? 1.0 : 0.0;

  if (x < 12.0) {
    // Ascending series sum_k (-1)^k (x/2)^{m+2k} / (k! (k+m)!), with the
    // leading term through log-gamma to avoid factorial overflow.
    const double half = 0.5 * x;
    double term = std::exp(m * std::log(half) - std::lgamma(m + 1.0));
    double sum = term;
    for (int k = 0; k < 200; ++k) {
      term *= -(half * half) / ((k + 1.0) * (k + 1.0 + m));
      sum += term;
      if (std::abs(term) < 1e-18 * std::abs(sum) + 1e-300) break;
    }
    return sum;
  }

  // Miller's algorithm: downward three-term recurrence from a start order
  // well above both m and x, normalized by J_0 + 2 sum J_{2k} = 1.
  int start = m + static_cast<int>(1.2 * x) + 60;
  if (start % 2 == 1) ++start;
  double jp = 0.0;   // J_{k+1}
  double jc = 1e-30; // J_k (arbitrary scale)
  double result = 0.0;
  double norm = 0.0;
  for (int k = start; k >= 1; --k) {
    double jm = (2.0 * k / x) * jc - jp;
    jp = jc;
    jc = jm;
    if (k - 1 == m) result = jc;
    if ((k - 1) % 2 == 0) norm += (k - 1 == 0) ? jc : 2.0 * jc;
    if (std::abs(jc) > 1e250) {  // rescale to dodge overflow
      jp /= 1e250;
      jc /= 1e250;
      result /= 1e250;
      norm /= 1e250;
    }
  }
  return result / norm;
}

namespace {

double bessel_target(int m, double x, BesselRootKind kind) {
  if (kind == BesselRootKind::J) return bessel_j(m, x);
  // J_m'(x) = (J_{m-1}(x) - J_{m+1}(x)) / 2, and J_0' = -J_1.
  if (m == 0) return -bessel_j(1, x);
  return 0.5 * (bessel_j(m - 1, x) - bessel_j(m + 1, x));
}

}  // namespace

double bessel_root(int m, int k, BesselRootKind kind) {
  if (m < 0 || k < 1) {
    throw domain_error("bessel_root: need m >= 0 and k >= 1");
  }
  // All positive roots exceed max(m,...) - scan upward with a step well
  // below the asymptotic root spacing of pi, bisect each sign change.
  double x = (m == 0) ? 0.05 : 0.5 * m;
  const double step = 0.2;
  double fprev = bessel_target(m, x, kind);
  int found = 0;
  for (int iter = 0; iter < 2000000; ++iter) {
    double xn = x + step;
    double fn = bessel_target(m, xn, kind);
    if ((fprev < 0.0) != (fn < 0.0) || fn == 0.0) {
      double lo = x, hi = xn, flo = fprev;
      for (int b = 0; b < 200; ++b) {
        double mid = 0.5 * (lo + hi);
        double fm = bessel_target(m, mid, kind);
        if ((flo < 0.0) != (fm < 0.0)) {
          hi = mid;
        } else {
          lo = mid;
          flo = fm;
        }
        if (hi - lo < 1e-15 * hi) break;
      }
      ++found;
      if (found == k) return 0.5 * (lo + hi);
    }
    x = xn;
    fprev = fn;
  }
  throw numerical_error("bessel_root: scan failed to find requested root");
}

QuadratureRule gauss_legendre(int order) {
  if (order < 1) {
    throw domain_error("gauss_legendre: order must be >= 1");
  }
  const int n = order;
  QuadratureRule rule;
  rule.order = n;
  rule.nodes.assign(n, 0.0);
  rule.weights.assign(n, 0.0);

  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // Cosine initial guess for the i-th root of P_n, then Newton iteration
    // with P_n and P_n' from the standard three-term recurrence.
    double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
      }
      // P_n'(z) = n (z P_n - P_{n-1}) / (z^2 - 1)
      pp = n * (z * p0 - p1) / (z * z - 1.0);
      double dz = p0 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    rule.nodes[i] = -z;  // roots found from the +1 end; store ascending
    rule.nodes[n - 1 - i] = z;
    double w = 2.0 / ((1.0 - z * z) * pp * pp);
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;  // exact middle root
  return rule;
}

}  // namespace esp
