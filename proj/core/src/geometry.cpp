#include "esp/geometry.hpp"

#include <cmath>
#include <string>

#include "esp/errors.hpp"

namespace esp {

EllipsoidSpec EllipsoidSpec::from_axes(double a, double b, double c) {
  if (!(a > 0.0) || !(b > 0.0) || !(c > 0.0)) {
    throw domain_error("EllipsoidSpec: all semi-axes must be positive");
  }
  EllipsoidSpec s;
  s.a = a;
  s.b = b;
  s.c = c;
  return s;
}

EllipsoidSpec EllipsoidSpec::from_perturbation(double alpha, double beta,
                                               double gamma, double eps) {
  EllipsoidSpec s = from_axes(1.0 + alpha * eps, 1.0 + beta * eps,
                              1.0 + gamma * eps);
  s.has_perturbation = true;
  s.alpha = alpha;
  s.beta = beta;
  s.gamma = gamma;
  s.eps = eps;
  return s;
}

MetricAtPoint metric_triaxial(const EllipsoidSpec& spec, double phi,
                              double theta) {
  const double a2 = spec.a * spec.a, b2 = spec.b * spec.b,
               c2 = spec.c * spec.c;
  const double sp = std::sin(phi), cp = std::cos(phi);
  const double st = std::sin(theta), ct = std::cos(theta);
  const double P = a2 * ct * ct + b2 * st * st;  // theta profile along r_phi
  const double Q = a2 * st * st + b2 * ct * ct;  // theta profile along r_theta

  MetricAtPoint g;
  g.g11 = cp * cp * P + c2 * sp * sp;
  g.g22 = sp * sp * Q;
  g.g12 = (b2 - a2) * sp * cp * st * ct;  // = (b^2-a^2) sin2phi sin2theta / 4
  g.D = g.g11 * g.g22 - g.g12 * g.g12;
  if (sp == 0.0) {
    g.degenerate_pole = true;
    g.D = 0.0;
  }
  return g;
}

MetricAtPoint metric_biaxial(const EllipsoidSpec& spec, double phi) {
  if (!spec.biaxial()) {
    throw domain_error("metric_biaxial: spec is not biaxial (a != b)");
  }
  const double a2 = spec.a * spec.a, c2 = spec.c * spec.c;
  const double sp = std::sin(phi), cp = std::cos(phi);
  MetricAtPoint g;
  g.g11 = a2 * cp * cp + c2 * sp * sp;
  g.g22 = a2 * sp * sp;
  g.g12 = 0.0;
  g.D = g.g11 * g.g22;
  if (sp == 0.0) {
    g.degenerate_pole = true;
    g.D = 0.0;
  }
  return g;
}

namespace {

void check_pole_margin(double phi, double pole_margin, const char* who) {
  if (!(phi >= pole_margin && phi <= M_PI - pole_margin)) {
    throw domain_error(std::string(who) +
                       ": phi must stay pole_margin away from {0, pi}");
  }
}

}  // namespace

OperatorCoeffs laplace_coeffs(const EllipsoidSpec& spec, double phi,
                              double theta, double pole_margin) {
  check_pole_margin(phi, pole_margin, "laplace_coeffs");

  const double a2 = spec.a * spec.a, b2 = spec.b * spec.b,
               c2 = spec.c * spec.c;
  const double sp = std::sin(phi), cp = std::cos(phi);
  const double st = std::sin(theta), ct = std::cos(theta);
  const double s2phi = 2.0 * sp * cp, c2phi = cp * cp - sp * sp;
  const double s2th = 2.0 * st * ct, c2th = ct * ct - st * st;
  const double R = b2 - a2;

  const double P = a2 * ct * ct + b2 * st * st;
  const double Q = a2 * st * st + b2 * ct * ct;
  const double Pt = R * s2th;   // dP/dtheta
  const double Qt = -R * s2th;  // dQ/dtheta

  const double g11 = cp * cp * P + c2 * sp * sp;
  const double g22 = sp * sp * Q;
  const double g12 = R * s2phi * s2th / 4.0;

  const double g11_p = s2phi * (c2 - P);
  const double g11_t = cp * cp * Pt;
  const double g22_p = s2phi * Q;
  const double g22_t = sp * sp * Qt;
  const double g12_p = R * c2phi * s2th / 2.0;
  const double g12_t = R * s2phi * c2th / 2.0;

  const double D = g11 * g22 - g12 * g12;
  const double D_p = g11_p * g22 + g11 * g22_p - 2.0 * g12 * g12_p;
  const double D_t = g11_t * g22 + g11 * g22_t - 2.0 * g12 * g12_t;

  OperatorCoeffs op;
  op.A = g22 / D;
  op.B = -2.0 * g12 / D;
  op.C = g11 / D;
  // E = D^{-1/2}[(g22 D^{-1/2})_phi - (g12 D^{-1/2})_theta], expanded so a
  // single division by D^2 carries all the derivative terms.
  op.E = (g22_p - g12_t) / D - 0.5 * (g22 * D_p - g12 * D_t) / (D * D);
  op.F = (g11_t - g12_p) / D - 0.5 * (g11 * D_t - g12 * D_p) / (D * D);
  return op;
}

OperatorCoeffs a1_coeffs(double alpha, double beta, double gamma, double phi,
                         double theta, double pole_margin) {
  check_pole_margin(phi, pole_margin, "a1_coeffs");

  const double sp = std::sin(phi), cp = std::cos(phi);
  const double st = std::sin(theta), ct = std::cos(theta);
  const double cp2 = cp * cp, ct2 = ct * ct, sp2 = sp * sp;

  OperatorCoeffs op;
  op.A = (2.0 * beta - 2.0 * alpha) * ct2 * cp2 +
         (2.0 * gamma - 2.0 * beta) * cp2 - 2.0 * gamma;
  op.B = 4.0 * (alpha - beta) * cp * st * ct / sp;
  op.C = ((2.0 * alpha - 2.0 * beta) * ct2 - 2.0 * alpha) / sp2;
  op.E = 4.0 *
         (((beta - alpha) * ct2 - beta + gamma) * cp2 +
          1.5 * (alpha - beta) * ct2 - 0.5 * alpha + beta - gamma) *
         cp / sp;
  op.F = 4.0 * (beta - alpha) * st * ct / sp2;
  return op;
}

double a1_apply(double alpha, double beta, double gamma,
                const FunctionJet2& jet, double phi, double theta) {
  return apply(a1_coeffs(alpha, beta, gamma, phi, theta), jet);
}

}  // namespace esp
