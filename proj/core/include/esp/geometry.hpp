#pragma once

namespace esp {

// Near-sphere ellipsoid x^2/a^2 + y^2/b^2 + z^2/c^2 = 1.  Axes are either
// given directly or through the one-parameter family
//   a = 1 + alpha*eps,  b = 1 + beta*eps,  c = 1 + gamma*eps.
struct EllipsoidSpec {
  double a = 1.0;
  double b = 1.0;
  double c = 1.0;

  // Set when constructed via from_perturbation; the direct constructor
  // leaves the perturbative form unset.
  bool has_perturbation = false;
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  double eps = 0.0;

  static EllipsoidSpec from_axes(double a, double b, double c);
  static EllipsoidSpec from_perturbation(double alpha, double beta,
                                         double gamma, double eps);

  // Equatorial symmetry about the z-axis; exact comparison by design so that
  // block decoupling decisions are reproducible.
  bool biaxial() const { return a == b; }
};

// First fundamental form at a chart point.  Chart (colatitude phi from the
// c-axis, longitude theta):
//   (x, y, z) = (a sin(phi) cos(theta), b sin(phi) sin(theta), c cos(phi)).
struct MetricAtPoint {
  double g11 = 0;  // <r_phi, r_phi>
  double g12 = 0;  // <r_phi, r_theta>
  double g22 = 0;  // <r_theta, r_theta>
  double D = 0;    // det = g11 g22 - g12^2
  bool degenerate_pole = false;  // sin(phi) == 0: D degenerates to 0
};

// Coefficients of a second-order operator
//   L u = A u_phiphi + B u_phitheta + C u_thetatheta + E u_phi + F u_theta.
struct OperatorCoeffs {
  double A = 0, B = 0, C = 0, E = 0, F = 0;
};

// Second-order jet of a scalar field at one chart point, supplied by the
// caller (used to apply operators pointwise in tests and oracles).
struct FunctionJet2 {
  double u = 0;
  double u_phi = 0, u_theta = 0;
  double u_phiphi = 0, u_phitheta = 0, u_thetatheta = 0;
};

inline double apply(const OperatorCoeffs& op, const FunctionJet2& j) {
  return op.A * j.u_phiphi + op.B * j.u_phitheta + op.C * j.u_thetatheta +
         op.E * j.u_phi + op.F * j.u_theta;
}

// Default margin keeping operator coefficient evaluation away from the
// coordinate poles, where C, E, F blow up like 1/sin^2.
inline constexpr double kPoleMargin = 1e-8;

// Metric of the general ellipsoid in the chart above:
//   g11 = cos^2(phi) (a^2 cos^2(theta) + b^2 sin^2(theta)) + c^2 sin^2(phi)
//   g22 = sin^2(phi) (a^2 sin^2(theta) + b^2 cos^2(theta))
//   g12 = (b^2 - a^2) sin(2 phi) sin(2 theta) / 4
// Exact poles return the degenerate limit with D = 0 flagged.
MetricAtPoint metric_triaxial(const EllipsoidSpec& spec, double phi,
                              double theta);

// Axisymmetric case a = b (theta drops out): g11 = a^2 cos^2 + c^2 sin^2,
// g22 = a^2 sin^2, g12 = 0.  Requires spec.biaxial().
MetricAtPoint metric_biaxial(const EllipsoidSpec& spec, double phi);

// Laplace-Beltrami coefficients
//   A = g22/D, B = -2 g12/D, C = g11/D,
//   E = D^{-1/2} [ (g22 D^{-1/2})_phi - (g12 D^{-1/2})_theta ],
//   F = D^{-1/2} [ (g11 D^{-1/2})_theta - (g12 D^{-1/2})_phi ],
// with the partial derivatives evaluated in closed form.  Requires
// phi in [pole_margin, pi - pole_margin].
OperatorCoeffs laplace_coeffs(const EllipsoidSpec& spec, double phi,
                              double theta, double pole_margin = kPoleMargin);

// Coefficients of the first-order operator A_1 = d/deps Laplace(spec(eps))
// at eps = 0 for the family a = 1+alpha*eps, b = 1+beta*eps, c = 1+gamma*eps
// (A_1 has no zeroth-order term).  Same pole restriction as laplace_coeffs.
OperatorCoeffs a1_coeffs(double alpha, double beta, double gamma, double phi,
                         double theta, double pole_margin = kPoleMargin);

// A_1 applied to the given jet at (phi, theta).
double a1_apply(double alpha, double beta, double gamma,
                const FunctionJet2& jet, double phi, double theta);

}  // namespace esp
