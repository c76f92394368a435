#pragma once

#include <vector>

#include "esp/geometry.hpp"

namespace esp {

// Colatitude grid phi_j = j*h, h = pi/N (vertex-centered reference); the
// Neumann discretization places unknowns at cell centers (j - 1/2)*h.
struct FdGrid {
  int N = 0;
  double h = 0;
};

// Pole treatment for the azimuthal-mode ODE
//   -(p u')' + (m^2 / p) u = Lambda (w / p) u,
//   p(phi) = a sin(phi) / sqrt(a^2 cos^2 phi + c^2 sin^2 phi),
//   w(phi) = a^2 sin^2 phi,
// on (0, pi) for the ellipsoid with equal equatorial semi-axes a = b and
// polar semi-axis c.
enum class PoleBc {
  // Cell-centered grid, faces at j*h: p vanishes at both poles, so the
  // zero-flux condition holds automatically for every m.
  NEUMANN,
  // Vertex grid: m = 0 keeps the pole nodes with half-size finite-volume
  // cells; m >= 1 drops them (the mode functions vanish at the poles).
  AUTO,
};

struct BiaxialEigenResult {
  int m = 0;
  FdGrid grid;
  PoleBc bc = PoleBc::AUTO;
  std::vector<double> values;  // ascending, k of them
  // Sample abscissae and physical eigenfunction samples (filled only when
  // vectors were requested); vectors are mass-normalized.
  std::vector<double> nodes;
  std::vector<std::vector<double>> vectors;
};

// k lowest eigenvalues of the azimuthal-mode problem.  Requires a biaxial
// spec (spec.a == spec.b), N >= 16, 1 <= k <= matrix dimension.
BiaxialEigenResult solve_biaxial_fd(const EllipsoidSpec& spec, int m, int N,
                                    int k, PoleBc bc = PoleBc::AUTO,
                                    bool want_vectors = false);

// Eigenvalues at a sequence of grid sizes plus a per-eigenvalue Richardson
// order estimate log2((v[N0]-v[N1])/(v[N1]-v[N2])) from the last three
// sizes (expects roughly doubling N; order ~2 for interior eigenvalues).
struct ConvergenceStudy {
  std::vector<int> sizes;
  std::vector<std::vector<double>> values;  // values[i] at sizes[i]
  std::vector<double> order;                // per eigenvalue index
};

ConvergenceStudy convergence_study(const EllipsoidSpec& spec, int m,
                                   const std::vector<int>& sizes, int k,
                                   PoleBc bc = PoleBc::AUTO);

}  // namespace esp
