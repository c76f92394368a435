#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "esp/eigensolve.hpp"
#include "esp/errors.hpp"
#include "esp/geometry.hpp"
#include "esp/perturbation.hpp"
#include "esp/special_fn.hpp"

namespace {

constexpr double kPi = 3.14159265358979323846;

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Sorted copy for multiset comparisons.
std::vector<double> sorted(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v;
}

void check_multiset(const std::vector<double>& got,
                    const std::vector<double>& want, double tol) {
  REQUIRE(got.size() == want.size());
  const auto g = sorted(got);
  const auto w = sorted(want);
  for (size_t i = 0; i < g.size(); ++i) CHECK(std::fabs(g[i] - w[i]) < tol);
}

// Second-order jet of a unit-norm basis mode at a chart point.
esp::FunctionJet2 mode_jet(const esp::ModeIndex& mi, double phi,
                           double theta) {
  const double t = std::cos(phi);
  const double st = std::sin(phi);
  const auto p = esp::legendre_p_derivs({mi.l, mi.m}, t);
  double ang, dang;
  if (mi.family == esp::Family::COS) {
    ang = std::cos(mi.m * theta);
    dang = -mi.m * std::sin(mi.m * theta);
  } else {
    ang = std::sin(mi.m * theta);
    dang = mi.m * std::cos(mi.m * theta);
  }
  esp::FunctionJet2 j;
  j.u = p.value * ang;
  j.u_phi = -st * p.d1 * ang;
  j.u_phiphi = (-t * p.d1 + st * st * p.d2) * ang;
  j.u_theta = p.value * dang;
  j.u_phitheta = -st * p.d1 * dang;
  j.u_thetatheta = -double(mi.m) * mi.m * p.value * ang;
  return j;
}

// <v_i, A_1 v_j> by product quadrature: Gauss-Legendre in t = cos(phi)
// (the integrand is polynomial in t within a block by m-parity), trapezoid
// in theta (trig polynomial, exact once the node count exceeds the degree).
double entry_quadrature(const esp::ModeIndex& vi, const esp::ModeIndex& vj,
                        double alpha, double beta, double gamma) {
  const int l = vi.l;
  const auto rule = esp::gauss_legendre(2 * l + 12);
  const int n_theta = 4 * l + 16;
  double acc = 0.0;
  for (size_t q = 0; q < rule.nodes.size(); ++q) {
    const double phi = std::acos(rule.nodes[q]);
    double row = 0.0;
    for (int s = 0; s < n_theta; ++s) {
      const double theta = 2.0 * kPi * s / n_theta;
      const auto ji = mode_jet(vi, phi, theta);
      const auto jj = mode_jet(vj, phi, theta);
      row += ji.u * esp::a1_apply(alpha, beta, gamma, jj, phi, theta);
    }
    acc += rule.weights[q] * row * (2.0 * kPi / n_theta);
  }
  return acc;
}

}  // namespace

TEST_CASE("biaxial closed form: the nine reference rationals") {
  // Distinguished-axis direction (alpha_pair, beta_dist) = (0, 1); the
  // slopes are exact rationals.
  const struct {
    int l, m;
    double num, den;
  } rows[] = {
      {1, 0, -12, 5}, {2, 0, -44, 7}, {3, 0, -184, 15},
      {1, 1, -4, 5},  {2, 1, -36, 7}, {3, 1, -56, 5},
      {2, 2, -12, 7}, {3, 2, -8, 1},  {3, 3, -8, 3},
  };
  for (const auto& r : rows) {
    CHECK(std::fabs(esp::biaxial_lambda1(r.l, r.m, 0.0, 1.0) -
                    r.num / r.den) < 1e-12);
  }
}

TEST_CASE("biaxial closed form: scaling and symmetry properties") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const double s = -1.0 + 2.0 * uniform01(rng);
    for (int l = 1; l <= 6; ++l) {
      // Equal coefficients shrink/grow the sphere: Lambda_1 = -2 s l(l+1)
      // independent of m.
      for (int m = 0; m <= l; ++m)
        CHECK(esp::biaxial_lambda1(l, m, s, s) ==
              doctest::Approx(-2.0 * s * l * (l + 1)).epsilon(1e-13));
      // Linearity in (alpha_pair, beta_dist).
      const double p = -1.0 + 2.0 * uniform01(rng);
      const double q = -1.0 + 2.0 * uniform01(rng);
      CHECK(esp::biaxial_lambda1(l, 1, p, q) ==
            doctest::Approx(p * esp::biaxial_lambda1(l, 1, 1, 0) +
                            q * esp::biaxial_lambda1(l, 1, 0, 1))
                .epsilon(1e-12));
    }
  }
}

TEST_CASE("level 1 and level 2 closed forms for random directions") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 25; ++trial) {
    const double a = -1.0 + 2.0 * uniform01(rng);
    const double b = -1.0 + 2.0 * uniform01(rng);
    const double c = -1.0 + 2.0 * uniform01(rng);

    // l = 1: the three slopes are -(4/5) of (a+b+3c), (3a+b+c), (a+3b+c).
    {
      std::vector<double> got;
      for (const auto& pe : esp::perturbed_spectrum(1, a, b, c))
        got.push_back(pe.lambda1);
      check_multiset(got,
                     {-0.8 * (a + b + 3 * c), -0.8 * (3 * a + b + c),
                      -0.8 * (a + 3 * b + c)},
                     1e-11);
    }

    // l = 2: a symmetric pair around -4(a+b+c) plus three linear slopes.
    {
      std::vector<double> got;
      for (const auto& pe : esp::perturbed_spectrum(2, a, b, c))
        got.push_back(pe.lambda1);
      const double mean = -4.0 * (a + b + c);
      const double disc = std::sqrt(a * a + b * b + c * c - a * b - a * c -
                                    b * c);
      check_multiset(got,
                     {mean - (16.0 / 7.0) * disc, mean + (16.0 / 7.0) * disc,
                      -(12.0 / 7.0) * (3 * a + b + 3 * c),
                      -(12.0 / 7.0) * (3 * a + 3 * b + c),
                      -(12.0 / 7.0) * (a + 3 * b + 3 * c)},
                     1e-11);
    }
  }
}

TEST_CASE("level 3 block spectra match the surd expressions") {
  // Each decoupled level-3 block diagonalizes in closed form; SIN_EVEN is
  // the single slope -8(a+b+c), the other three blocks give mean +- surd.
  std::mt19937_64 rng(57);
  for (int trial = 0; trial < 12; ++trial) {
    double a = -1.0 + 2.0 * uniform01(rng);
    double b = -1.0 + 2.0 * uniform01(rng);
    double c = -1.0 + 2.0 * uniform01(rng);
    if (trial == 0) {
      a = 0.0;
      b = 1.0;
      c = -1.0;
    }

    const auto pair_for = [](double x, double y, double z) {
      // mean -(104x + 104y + 152z)/15, surd
      // (32/15) sqrt(4x^2 + 4y^2 - 7xy - xz - yz + z^2).
      const double mean = -(104.0 * x + 104.0 * y + 152.0 * z) / 15.0;
      const double disc = std::sqrt(4 * x * x + 4 * y * y - 7 * x * y -
                                    x * z - y * z + z * z);
      return std::vector<double>{mean - (32.0 / 15.0) * disc,
                                 mean + (32.0 / 15.0) * disc};
    };

    for (const auto& block : esp::assemble_blocks(3, a, b, c)) {
      const auto vals = esp::eig_tridiagonal_values(block.matrix);
      switch (block.kind) {
        case esp::BlockKind::COS_EVEN:
          check_multiset(vals, pair_for(a, b, c), 1e-10);
          break;
        case esp::BlockKind::COS_ODD:
          check_multiset(vals, pair_for(c, b, a), 1e-10);
          break;
        case esp::BlockKind::SIN_ODD:
          check_multiset(vals, pair_for(c, a, b), 1e-10);
          break;
        case esp::BlockKind::SIN_EVEN:
          REQUIRE(vals.size() == 1);
          CHECK(vals[0] == doctest::Approx(-8.0 * (a + b + c)).epsilon(1e-12));
          break;
      }
    }
  }
}

TEST_CASE("block structure: kinds, sizes, and mode labels") {
  // l = 0: just the 1x1 COS_EVEN block; l = 1 has no SIN_EVEN block.
  CHECK(esp::assemble_blocks(0, 1, 2, 3).size() == 1);
  CHECK(esp::assemble_blocks(1, 1, 2, 3).size() == 3);

  for (int l = 2; l <= 5; ++l) {
    const auto blocks = esp::assemble_blocks(l, 0.3, -0.2, 0.8);
    REQUIRE(blocks.size() == 4);
    size_t total = 0;
    for (const auto& blk : blocks) {
      total += blk.modes.size();
      REQUIRE(blk.matrix.diag.size() == blk.modes.size());
      REQUIRE(blk.matrix.offdiag.size() + 1 == blk.modes.size());
      for (size_t i = 0; i < blk.modes.size(); ++i) {
        CHECK(blk.modes[i].l == l);
        if (i > 0) CHECK(blk.modes[i].m == blk.modes[i - 1].m + 2);
        const bool sin_family = blk.kind == esp::BlockKind::SIN_EVEN ||
                                blk.kind == esp::BlockKind::SIN_ODD;
        CHECK((blk.modes[i].family == esp::Family::SIN) == sin_family);
      }
    }
    CHECK(total == static_cast<size_t>(2 * l + 1));
  }
}

TEST_CASE("tridiagonal entries match direct quadrature of <v, A_1 v>") {
  // The assembled blocks store the negated matrix elements (so that their
  // eigenvalues are the slopes directly); the quadrature sees the raw sign.
  std::mt19937_64 rng(6021);
  for (int trial = 0; trial < 4; ++trial) {
    const double a = -1.0 + 2.0 * uniform01(rng);
    const double b = -1.0 + 2.0 * uniform01(rng);
    const double c = -1.0 + 2.0 * uniform01(rng);
    const int l = 2 + static_cast<int>(rng() % 3);

    for (const auto& blk : esp::assemble_blocks(l, a, b, c)) {
      for (size_t i = 0; i < blk.modes.size(); ++i) {
        const double quad =
            entry_quadrature(blk.modes[i], blk.modes[i], a, b, c);
        CHECK(std::fabs(quad + blk.matrix.diag[i]) < 1e-8);
        if (i + 1 < blk.modes.size()) {
          const double off =
              entry_quadrature(blk.modes[i], blk.modes[i + 1], a, b, c);
          CHECK(std::fabs(off + blk.matrix.offdiag[i]) < 1e-8);
        }
      }
    }
  }

  // Raw entry accessors agree with quadrature too (family matters at m=1).
  const double a = 0.4, b = -0.7, c = 0.1;
  CHECK(std::fabs(esp::triaxial_entry_diag(3, 1, esp::Family::COS, a, b, c) -
                  entry_quadrature({3, 1, esp::Family::COS},
                                   {3, 1, esp::Family::COS}, a, b, c)) <
        1e-8);
  CHECK(std::fabs(esp::triaxial_entry_diag(3, 1, esp::Family::SIN, a, b, c) -
                  entry_quadrature({3, 1, esp::Family::SIN},
                                   {3, 1, esp::Family::SIN}, a, b, c)) <
        1e-8);
  CHECK(std::fabs(esp::triaxial_entry_offdiag(3, 2, a, b) -
                  entry_quadrature({3, 0, esp::Family::COS},
                                   {3, 2, esp::Family::COS}, a, b, c)) <
        1e-8);
}

TEST_CASE("perturbed_spectrum is consistent with the biaxial closed form") {
  std::mt19937_64 rng(1312);
  for (int trial = 0; trial < 6; ++trial) {
    const double p = -1.0 + 2.0 * uniform01(rng);
    const double q = -1.0 + 2.0 * uniform01(rng);
    for (int l = 1; l <= 4; ++l) {
      // Distinguished axis along z: (p, p, q).
      std::vector<double> want;
      want.push_back(esp::biaxial_lambda1(l, 0, p, q));
      for (int m = 1; m <= l; ++m) {
        want.push_back(esp::biaxial_lambda1(l, m, p, q));
        want.push_back(esp::biaxial_lambda1(l, m, p, q));
      }
      std::vector<double> got;
      for (const auto& pe : esp::perturbed_spectrum(l, p, p, q))
        got.push_back(pe.lambda1);
      check_multiset(got, want, 1e-11);
    }
  }
}

TEST_CASE("perturbed_spectrum ordering, vectors, and trace identity") {
  const auto spec = esp::perturbed_spectrum(3, 0.9, -0.4, 0.2);
  REQUIRE(spec.size() == 7);
  double sum = 0.0;
  for (size_t i = 0; i < spec.size(); ++i) {
    CHECK(spec[i].lambda0 == doctest::Approx(12.0));
    if (i > 0) CHECK(spec[i].lambda1 >= spec[i - 1].lambda1);
    sum += spec[i].lambda1;
    // Eigenvector lives in a single block: all labels share the family and
    // m-parity of the source block.
    REQUIRE(!spec[i].eigvec.empty());
    double nrm = 0.0;
    for (const auto& mc : spec[i].eigvec) {
      CHECK(mc.first.l == 3);
      CHECK((mc.first.m % 2) == (spec[i].eigvec[0].first.m % 2));
      CHECK(mc.first.family == spec[i].eigvec[0].first.family);
      nrm += mc.second * mc.second;
    }
    CHECK(nrm == doctest::Approx(1.0).epsilon(1e-12));
  }
  // Trace: the slope sum equals the sum of the negated block diagonals,
  // which the scaling direction fixes to -2(a+b+c)/3 * l(l+1) * (2l+1)
  // by linearity and symmetry.
  const double per_axis = -2.0 * 12.0 * 7.0 / 3.0;
  CHECK(sum == doctest::Approx((0.9 - 0.4 + 0.2) * per_axis).epsilon(1e-11));
}

TEST_CASE("multiplicity_report: biaxial pattern and triaxial splitting") {
  std::mt19937_64 rng(2718);
  for (int l = 1; l <= 6; ++l) {
    // Biaxial: l doubles plus one simple value.
    const auto rep = esp::multiplicity_report(l, 0.35, 0.35, -0.6);
    int doubles = 0, simples = 0;
    for (const auto& cl : rep.clusters) {
      if (cl.count == 2) ++doubles;
      if (cl.count == 1) ++simples;
    }
    CHECK(doubles == l);
    CHECK(simples == 1);
    CHECK_FALSE(rep.distinctness_empirical);
  }
  for (int l = 1; l <= 5; ++l) {
    // Pairwise-distinct coefficients: 2l+1 simple slopes.
    const double a = -1.0 + 2.0 * uniform01(rng);
    const double b = a + 0.2 + uniform01(rng);
    const double c = b + 0.2 + uniform01(rng);
    const auto rep = esp::multiplicity_report(l, a, b, c);
    CHECK(rep.clusters.size() == static_cast<size_t>(2 * l + 1));
    for (const auto& cl : rep.clusters) CHECK(cl.count == 1);
    CHECK(rep.distinctness_empirical == (l >= 4));
  }
}

TEST_CASE("entry accessors validate their arguments") {
  CHECK_THROWS_AS(esp::triaxial_entry_diag(2, 3, esp::Family::COS, 1, 0, 0),
                  esp::domain_error);
  CHECK_THROWS_AS(esp::triaxial_entry_diag(2, -1, esp::Family::COS, 1, 0, 0),
                  esp::domain_error);
  CHECK_THROWS_AS(esp::triaxial_entry_offdiag(3, 1, 1, 0), esp::domain_error);
  CHECK_THROWS_AS(esp::triaxial_entry_offdiag(3, 5, 1, 0), esp::domain_error);
  CHECK_THROWS_AS(esp::perturbed_spectrum(-1, 1, 0, 0), esp::domain_error);
}
