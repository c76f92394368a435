#include "esp/perturbation.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "esp/errors.hpp"

namespace esp {

namespace {

void check_lm(int l, int m, const char* who) {
  if (l < 0 || m < 0 || m > l) {
    throw domain_error(std::string(who) + ": need l >= 0 and 0 <= m <= l");
  }
}

}  // namespace

double biaxial_lambda1(int l, int m, double alpha_pair, double beta_dist) {
  check_lm(l, m, "biaxial_lambda1");
  const double L = static_cast<double>(l) * (l + 1);
  const double fac = 2.0 * L / ((2.0 * l + 3.0) * (2.0 * l - 1.0));
  return -2.0 * alpha_pair * L +
         (alpha_pair - beta_dist) * fac *
             (2.0 * l * l - 2.0 * m * m + 2.0 * l - 1.0);
}

double triaxial_entry_diag(int l, int m, Family family, double alpha,
                           double beta, double gamma) {
  check_lm(l, m, "triaxial_entry_diag");
  const double L = static_cast<double>(l) * (l + 1);
  if (m != 1) {
    return 2.0 * gamma * L + (alpha + beta - 2.0 * gamma) * 2.0 * L /
                                 ((2.0 * l + 3.0) * (2.0 * l - 1.0)) *
                                 (static_cast<double>(l) * l + m * m + l - 1.0);
  }
  // m = 1 picks up an extra contribution that differs between families.
  const double fac = 2.0 * L * L / ((2.0 * l + 3.0) * (2.0 * l - 1.0));
  if (family == Family::COS) {
    return (1.5 * alpha + 0.5 * beta - 2.0 * gamma) * fac + 2.0 * L * gamma;
  }
  return (1.5 * beta + 0.5 * alpha - 2.0 * gamma) * fac + 2.0 * L * gamma;
}

double triaxial_entry_offdiag(int l, int m, double alpha, double beta) {
  check_lm(l, m, "triaxial_entry_offdiag");
  if (m < 2) {
    throw domain_error("triaxial_entry_offdiag: coupling needs m >= 2");
  }
  const double L = static_cast<double>(l) * (l + 1);
  const double rad = static_cast<double>(l - m + 1) * (l - m + 2) *
                     (l + m - 1) * (l + m);
  double val =
      (beta - alpha) * L / ((2.0 * l - 1.0) * (2.0 * l + 3.0)) * std::sqrt(rad);
  if (m == 2) val *= std::sqrt(2.0);  // m = 0 partner has the 2pi norm
  return val;
}

std::vector<TridiagonalBlock> assemble_blocks(int l, double alpha, double beta,
                                              double gamma) {
  if (l < 0) throw domain_error("assemble_blocks: l must be >= 0");

  const int le = (l % 2 == 0) ? l : l - 1;  // top even order
  const int lo = (l % 2 == 1) ? l : l - 1;  // top odd order

  struct BlockPlan {
    BlockKind kind;
    Family family;
    int m_start;
    int m_stop;
  };
  const BlockPlan plans[] = {
      {BlockKind::COS_EVEN, Family::COS, 0, le},
      {BlockKind::COS_ODD, Family::COS, 1, lo},
      {BlockKind::SIN_EVEN, Family::SIN, 2, le},
      {BlockKind::SIN_ODD, Family::SIN, 1, lo},
  };

  std::vector<TridiagonalBlock> blocks;
  for (const BlockPlan& plan : plans) {
    if (plan.m_stop < plan.m_start) continue;
    TridiagonalBlock blk;
    blk.kind = plan.kind;
    for (int m = plan.m_start; m <= plan.m_stop; m += 2) {
      blk.modes.push_back(ModeIndex{l, m, plan.family});
      // negated so the block's eigenvalues are Lambda_1 directly
      blk.matrix.diag.push_back(
          -triaxial_entry_diag(l, m, plan.family, alpha, beta, gamma));
      if (m > plan.m_start) {
        blk.matrix.offdiag.push_back(
            -triaxial_entry_offdiag(l, m, alpha, beta));
      }
    }
    blocks.push_back(std::move(blk));
  }
  return blocks;
}

namespace {

// Cluster already-sorted slopes at 1e-9 relative tolerance and write the
// cluster size into each member's multiplicity field.
void classify_multiplicity(std::vector<PerturbedEigenvalue>& eigs) {
  if (eigs.empty()) return;
  double scale = 1.0;
  for (const PerturbedEigenvalue& e : eigs) {
    scale = std::max(scale, std::abs(e.lambda1));
  }
  const double tol = 1e-9 * scale;
  size_t start = 0;
  for (size_t i = 1; i <= eigs.size(); ++i) {
    if (i == eigs.size() ||
        eigs[i].lambda1 - eigs[i - 1].lambda1 > tol) {
      for (size_t j = start; j < i; ++j) {
        eigs[j].multiplicity = static_cast<int>(i - start);
      }
      start = i;
    }
  }
}

}  // namespace

std::vector<PerturbedEigenvalue> perturbed_spectrum(int l, double alpha,
                                                    double beta, double gamma) {
  std::vector<TridiagonalBlock> blocks = assemble_blocks(l, alpha, beta, gamma);
  const double lambda0 = static_cast<double>(l) * (l + 1);

  std::vector<PerturbedEigenvalue> eigs;
  eigs.reserve(2 * l + 1);
  for (const TridiagonalBlock& blk : blocks) {
    EigenPairs ep = eig_tridiagonal(blk.matrix);
    for (size_t k = 0; k < ep.values.size(); ++k) {
      PerturbedEigenvalue pe;
      pe.lambda0 = lambda0;
      pe.lambda1 = ep.values[k];
      pe.source = blk.kind;
      pe.eigvec.reserve(blk.modes.size());
      for (size_t i = 0; i < blk.modes.size(); ++i) {
        pe.eigvec.emplace_back(blk.modes[i], ep.vectors[k][i]);
      }
      eigs.push_back(std::move(pe));
    }
  }
  // ascending lambda1; block construction order breaks exact ties
  std::stable_sort(eigs.begin(), eigs.end(),
                   [](const PerturbedEigenvalue& x,
                      const PerturbedEigenvalue& y) {
                     return x.lambda1 < y.lambda1;
                   });
  classify_multiplicity(eigs);
  return eigs;
}

MultiplicityReport multiplicity_report(int l, double alpha, double beta,
                                       double gamma) {
  std::vector<PerturbedEigenvalue> eigs =
      perturbed_spectrum(l, alpha, beta, gamma);
  MultiplicityReport report;
  report.l = l;
  const bool pairwise_distinct =
      alpha != beta && beta != gamma && alpha != gamma;
  report.distinctness_empirical = (l >= 4) && pairwise_distinct;
  for (size_t i = 0; i < eigs.size();) {
    MultiplicityCluster cl;
    cl.lambda1 = eigs[i].lambda1;
    cl.count = eigs[i].multiplicity;
    report.clusters.push_back(cl);
    i += static_cast<size_t>(eigs[i].multiplicity);
  }
  return report;
}

}  // namespace esp
