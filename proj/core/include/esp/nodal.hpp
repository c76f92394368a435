#pragma once

/// Nodal-domain counting for first-order eigenfunctions.
///
/// Two independent counters are provided.
///
///  * A raster counter: the eigenfunction is sampled on a regular
///    (phi, theta) grid, cells are classified by sign, and connected
///    components are counted with a union-find (4-neighbour adjacency,
///    theta seam wrap, pole-row fusion).  Counting again on a grid with
///    both dimensions doubled flags resolution-sensitive results.
///
///  * An analytic counter for degree l <= 5: a first-order eigenfunction
///    is a monomial W = X^wx Y^wy Z^wz times a polynomial G in the even
///    invariants p = X^2 - Y^2 and q = Z^2 (on the unit sphere).  G splits
///    into at most two affine lines in the (p, q) plane; the sphere octant
///    maps to the triangle with vertices (-1,0), (1,0), (0,1), and nodal
///    domains are counted exactly by clipping the triangle against the
///    lines and gluing regions across the non-nodal coordinate planes.
///    Internal closed-form cross checks throw rather than return a wrong
///    count.
///
/// The raster counter is cheap and fully general but inherits raster
/// artifacts (e.g. sign tie handling along pole rows); the analytic
/// counter is authoritative whenever it is available.

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "esp/geometry.hpp"
#include "esp/perturbation.hpp"

namespace esp {

/// A scalar field sampled on the rectangle phi in [0, pi] (n_phi rows,
/// poles included) times theta_j = 2*pi*j/n_theta (n_theta columns, seam
/// not duplicated).  Row-major: values[i * n_theta + j].
struct ModeGrid {
  int n_phi = 0;
  int n_theta = 0;
  std::vector<double> values;
};

/// Linear combination of normalized basis modes, as produced by
/// perturbed_spectrum().  Coefficients below 1e-15 in magnitude are
/// skipped during evaluation.
using ModeCombination = std::vector<std::pair<ModeIndex, double>>;

/// Sample sum_k c_k * P_norm(l_k, m_k, cos phi) * trig(m_k theta) on the
/// grid described above.  Throws domain_error for an empty or zero
/// combination or degenerate grid dimensions.
ModeGrid eval_mode_function(const ModeCombination& modes, int n_phi,
                            int n_theta);

/// Count sign-domains of a sampled field.  Cells are split into two
/// classes by s = (u + (u == 0) * eta > 0) with eta = 1e-13 * max|u|, so
/// exact zeros join the positive class; components of both classes are
/// counted with 4-neighbour adjacency, theta wrap-around, and fusion of
/// same-class cells along each pole row.
int count_nodal_domains(const ModeGrid& grid);

/// Raster count at the requested resolution and at double resolution
/// (2*n_phi - 1, 2*n_theta).  `count` is the fine-grid result; `suspect`
/// is set when the two disagree, which marks the count as unresolved.
struct CheckedCount {
  int count = 0;
  int coarse_count = 0;
  bool suspect = false;
};

CheckedCount count_nodal_domains_checked(const ModeCombination& modes,
                                         int n_phi, int n_theta);

/// Write the sign raster of a sampled field as an ASCII PGM image
/// (positive class white).  Throws numerical_error if the file cannot be
/// written.  Output bytes depend only on the grid contents.
void write_sign_pgm(const ModeGrid& grid, const std::string& path);

/// Exact nodal-domain count of a first-order eigenfunction of degree
/// l <= 5.  All modes must belong to a single symmetry block (one
/// trigonometric family and one parity of m).  alpha, beta, gamma are the
/// axis perturbation directions; for pairwise distinct values every
/// extracted line is verified to be a member of the confocal pencil and
/// the count is cross-checked against the closed-form species count, for
/// a z-distinguished pair (alpha == beta != gamma) a pure mode is checked
/// against the classical latitude/meridian count.  Any inconsistency
/// throws numerical_error.
int exact_nodal_count(int l, const ModeCombination& modes, double alpha,
                      double beta, double gamma);

/// Spheroid/ellipsoid case labels for the conjectured count sequences.
enum class ShapeCase { OBLATE, PROLATE, TRIAXIAL };

/// Conjectured nodal-domain counts for the 2l+1 first-order
/// eigenfunctions of degree l, indexed by ascending first-order
/// correction.  Base sequence N_0 = l+1, N_{2m-1} = N_{2m} = (l+1-m)*2m;
/// OBLATE returns N, PROLATE the reverse, TRIAXIAL the modified sequence
/// with N_{2m} lowered by 2(m-1) for 1 <= m <= l-1 and N_{2l} = l+1.
/// l = 0 gives {1}.
std::vector<int> conjecture_sequences(int l, ShapeCase shape);

/// Per-eigenfunction record produced by check_conjecture().
struct ConjectureRow {
  int rank = 0;           ///< 0-based rank within the level, ascending lambda1
  double lambda1 = 0.0;   ///< first-order eigenvalue correction
  int m_tilde = -1;       ///< pure-mode azimuthal order (spheroids), else -1
  int grid_count = 0;     ///< raster count (fine grid)
  bool grid_suspect = false;
  int exact_count = -1;   ///< analytic count, -1 when l > 5
  int conjectured = 0;    ///< conjectured count at this rank
  bool match = false;     ///< authoritative count matches the conjecture
  int courant_bound = 0;  ///< l^2 + (last rank in cluster) + 1
  bool courant_ok = false;
};

struct ConjectureReport {
  int l = 0;
  ShapeCase shape = ShapeCase::TRIAXIAL;
  bool zonal_first = false;  ///< spheroids: zonal mode has the lowest lambda1
  bool exact_available = false;  ///< analytic counts present (l <= 5)
  std::vector<ConjectureRow> rows;
  bool all_match = false;
  bool courant_ok = false;
};

/// Count nodal domains of every degree-l first-order eigenfunction of the
/// given ellipsoid and compare against the conjectured sequence.
///
/// A sphere is rejected (domain_error): its eigenfunctions are not pinned
/// down at first order.  An exact axis pair is handled in a frame with the
/// distinguished axis rotated to z, where the eigenfunctions are the pure
/// modes m_tilde = 0..l; the expected ordering (zonal or sectoral first)
/// is derived from the closed-form lambda1, not assumed.  Otherwise the
/// eigenvectors of the perturbation blocks are counted and matched
/// cluster-by-cluster (multisets within groups of equal lambda1).
/// Matching uses the analytic count when l <= 5 and the raster count
/// (with its suspect flag) otherwise.  Courant's bound is checked with
/// the cluster-maximal eigenvalue index.
ConjectureReport check_conjecture(const EllipsoidSpec& spec, int l,
                                  int n_phi = 801, int n_theta = 1600);

}  // namespace esp
