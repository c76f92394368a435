#pragma once

#include <vector>

namespace esp {

// Degree/order pair for associated Legendre functions, l >= 0, 0 <= m <= l.
struct LegendreMode {
  int l = 0;
  int m = 0;
};

// Gauss-Legendre rule on [-1, 1]: integrates polynomials of degree
// <= 2*order - 1 exactly (to ~1e-13 absolute for moderate order).
struct QuadratureRule {
  std::vector<double> nodes;    // strictly increasing, all in (-1, 1)
  std::vector<double> weights;  // positive, sum to 2
  int order = 0;
};

// Unnormalized associated Legendre function in the derivative convention
//
//   Q_l^m(t) = (1 - t^2)^{m/2} * d^{m+l}/dt^{m+l} [ (1 - t^2)^l ],
//
// i.e. no Condon-Shortley phase is applied afterwards and the leading
// normalization 1/(2^l l!) of the Rodrigues formula is NOT divided out.
// Consequently Q_1^0(t) = -2t and Q_m^m(t) = (-1)^m (2m)! (1-t^2)^{m/2}.
// Throws esp::domain_error if |t| > 1, l < 0, m < 0 or m > l.
double legendre_q(LegendreMode mode, double t);

// Positive constant A_{l,m} such that A_{l,m} * Q_l^m(cos phi) * cos(m theta)
// (and the sin(m theta) partner for m >= 1) has unit L^2 norm on the unit
// sphere with area element sin(phi) dphi dtheta.  Evaluated through
// log-gamma so no factorial overflows for any practical degree.
double legendre_norm_constant(LegendreMode mode);

// A_{l,m} * Q_l^m(t): the colatitude factor of the unit-norm spherical
// harmonic.  Note the sign follows the Q convention above; for example the
// normalized (l,m) = (1,0) function at t = 1 is -sqrt(3/(4 pi)).
double legendre_p_normalized(LegendreMode mode, double t);

// Value and first/second t-derivatives of the unit-norm colatitude factor.
struct LegendreDerivs {
  double value = 0;
  double d1 = 0;
  double d2 = 0;
};

// Requires |t| < 1 strictly (the derivatives blow up at the poles for m >= 1
// and the ODE-based second derivative divides by 1 - t^2).
LegendreDerivs legendre_p_derivs(LegendreMode mode, double t);

// The weighted moment ratio
//
//   integral t^2 (Q_l^m)^2 w / integral (Q_l^m)^2 w
//     = (2 l^2 - 2 m^2 + 2 l - 1) / ((2l + 3)(2l - 1)),   w = weight used by
//
// the perturbation matrix elements.  Returned in closed form; property tests
// compare against direct quadrature.
double legendre_ratio(LegendreMode mode);

// Regular cylindrical Bessel function J_m(x), m >= 0, x >= 0.  Ascending
// series below x = 12, Miller backward recurrence above; relative accuracy
// about 1e-12 for x <= 100.
double bessel_j(int m, double x);

enum class BesselRootKind {
  J,       // k-th positive root of J_m
  JPrime,  // k-th positive root of J_m' (x = 0 never counts, so the first
           // root of J_0' is the first positive root of J_1, ~3.8317)
};

// k-th positive root (k >= 1), refined to ~1e-12 relative accuracy.
double bessel_root(int m, int k, BesselRootKind kind);

// Nodes and weights by Newton iteration on the Legendre polynomial with the
// usual cosine initial guesses; order >= 1.
QuadratureRule gauss_legendre(int order);

}  // namespace esp
