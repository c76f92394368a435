#pragma once

#include <vector>

#include "esp/eigensolve.hpp"
#include "esp/geometry.hpp"
#include "esp/perturbation.hpp"

namespace esp {

// Sphere-harmonic Galerkin basis through degree l_max: per degree l the
// cos-family orders m = 0..l, then the sin-family m = 1..l, giving
// (l_max + 1)^2 functions in total.
struct GalerkinBasis {
  int l_max = 0;
  std::vector<ModeIndex> modes;
};

GalerkinBasis galerkin_basis(int l_max);

// Stiffness K (weak-form Dirichlet energy) and mass M of the ellipsoid in
// the unit-norm sphere-harmonic basis.  Quadrature: Gauss-Legendre in
// t = cos(phi) with 2*(l_max+4) nodes, trapezoid in theta with 4*(l_max+4)
// nodes (exact for the trigonometric parts in play).
struct GalerkinMatrices {
  GalerkinBasis basis;
  Matrix K, M;
  int n_t_nodes = 0, n_theta_nodes = 0;
};

// jobs >= 1 parallelizes over output rows; every matrix entry is a serial
// fixed-order reduction, so results are byte-identical for any jobs value.
GalerkinMatrices assemble_galerkin(const EllipsoidSpec& spec, int l_max,
                                   int jobs = 1);

struct TriaxialSpectrum {
  std::vector<double> values;  // k lowest, ascending (values[0] ~ 0)
  int l_max = 0;
  double residual_bound = 0;
};

// k lowest Laplace-Beltrami eigenvalues; requires k <= (l_max+1)^2 / 2
// (the upper half of a spectral discretization is not trustworthy).
TriaxialSpectrum solve_triaxial(const EllipsoidSpec& spec, int l_max, int k,
                                int jobs = 1);

// Finite-difference-in-eps slopes (Lambda_numeric - l(l+1)) / eps of the
// level-l cluster.  Cluster membership assigns each computed eigenvalue to
// the nearest sphere level, i.e. the open window (l^2, (l+1)^2), which is
// the small-eps reading of the first-order isolation window
// [l(l+1) - 2l, l(l+1) + 2l]; a count different from 2l+1 raises
// esp::numerical_error naming the colliding levels.
struct SlopeTable {
  int l = 0;
  std::vector<double> eps;
  std::vector<std::vector<double>> lambda_numeric;  // [eps index][rank]
  std::vector<std::vector<double>> slope;           // same shape
};

SlopeTable slope_extraction(double alpha, double beta, double gamma,
                            const std::vector<double>& eps_list, int l,
                            int l_max, int jobs = 1);

// Second-order Richardson extrapolation of slopes measured at eps, eps/2,
// eps/4 (rows of a 3-row SlopeTable): (8 S2 - 6 S1 + S0) / 3 per rank.
std::vector<double> richardson3(const SlopeTable& table);

}  // namespace esp
