#pragma once

#include <utility>
#include <vector>

#include "esp/eigensolve.hpp"

namespace esp {

// Azimuthal family of a sphere-harmonic basis function:
// COS uses cos(m theta), SIN uses sin(m theta) (SIN requires m >= 1).
enum class Family { COS, SIN };

// Basis label: unit-norm colatitude factor times the azimuthal family.
struct ModeIndex {
  int l = 0;
  int m = 0;
  Family family = Family::COS;
};

// The first-order matrix on a degree-l eigenspace decouples into four
// tridiagonal blocks: azimuthal order parity x family.
enum class BlockKind { COS_EVEN, COS_ODD, SIN_EVEN, SIN_ODD };

// One decoupled block, already negated so that its eigenvalues are the
// first-order eigenvalue slopes Lambda_1.  modes[i] labels row/column i
// (m ascending in steps of 2).
struct TridiagonalBlock {
  BlockKind kind = BlockKind::COS_EVEN;
  SymTridiagonal matrix;
  std::vector<ModeIndex> modes;
};

// One first-order eigenvalue Lambda(eps) = lambda0 + eps*lambda1 + O(eps^2)
// with its eigenvector expressed in the mode basis of the source block.
struct PerturbedEigenvalue {
  double lambda0 = 0;
  double lambda1 = 0;
  int multiplicity = 1;  // cluster size at 1e-9 relative tolerance
  std::vector<std::pair<ModeIndex, double>> eigvec;
  BlockKind source = BlockKind::COS_EVEN;
};

// Closed-form slope for the biaxial case: alpha_pair is the coefficient of
// the two equal axes, beta_dist of the distinguished one.  Each value for
// m >= 1 is attained by a cos/sin double; m = 0 is simple.
//
//   Lambda_1 = -2 alpha_pair l(l+1)
//              + (alpha_pair - beta_dist) * 2l(l+1)/((2l+3)(2l-1))
//                * (2l^2 - 2m^2 + 2l - 1)
double biaxial_lambda1(int l, int m, double alpha_pair, double beta_dist);

// Matrix element <v_m, A_1 v_m> of the first-order operator in the unit-norm
// basis (family matters only at m = 1, where the cos/sin diagonal entries
// differ).  Requires 0 <= m <= l.
double triaxial_entry_diag(int l, int m, Family family, double alpha,
                           double beta, double gamma);

// Coupling <v_{m-2}, A_1 v_m> for 2 <= m <= l; the extra sqrt(2) at m = 2
// comes from the different azimuthal norm of the m = 0 partner.  Same value
// for both families.
double triaxial_entry_offdiag(int l, int m, double alpha, double beta);

// The four negated blocks for level l (empty blocks are omitted, so l = 0
// yields just the 1x1 COS_EVEN block and l = 1 has no SIN_EVEN block).
std::vector<TridiagonalBlock> assemble_blocks(int l, double alpha, double beta,
                                              double gamma);

// All 2l+1 first-order eigenvalues of level l, ascending in lambda1, with
// multiplicity classification and block-labeled eigenvectors.  Deterministic
// tie order: COS_EVEN, COS_ODD, SIN_EVEN, SIN_ODD.
std::vector<PerturbedEigenvalue> perturbed_spectrum(int l, double alpha,
                                                    double beta, double gamma);

struct MultiplicityCluster {
  double lambda1 = 0;  // representative (smallest member)
  int count = 1;
};

// Clustered view of the level-l slopes.  For the biaxial case the exact
// pattern is l doubles plus one simple value; for pairwise-distinct
// coefficients all 2l+1 values are expected distinct, but for l >= 4 that
// distinctness is an observed (not proven) property, flagged here.
struct MultiplicityReport {
  int l = 0;
  std::vector<MultiplicityCluster> clusters;
  bool distinctness_empirical = false;
};

MultiplicityReport multiplicity_report(int l, double alpha, double beta,
                                       double gamma);

}  // namespace esp
