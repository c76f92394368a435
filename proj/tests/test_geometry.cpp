#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "esp/errors.hpp"
#include "esp/geometry.hpp"
#include "esp/special_fn.hpp"

namespace {

constexpr double kPi = 3.14159265358979323846;

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Chart embedding of the ellipsoid.
void embed(const esp::EllipsoidSpec& s, double phi, double theta, double* x) {
  x[0] = s.a * std::sin(phi) * std::cos(theta);
  x[1] = s.b * std::sin(phi) * std::sin(theta);
  x[2] = s.c * std::cos(phi);
}

// Second-order jet of the unit-norm harmonic (l, m, cos family) at a chart
// point, built from the colatitude-factor derivatives via the chain rule
// t = cos(phi).
esp::FunctionJet2 harmonic_jet(int l, int m, double phi, double theta) {
  const double t = std::cos(phi);
  const double st = std::sin(phi);
  const auto p = esp::legendre_p_derivs({l, m}, t);
  const double ang = std::cos(m * theta);
  const double dang = -m * std::sin(m * theta);

  esp::FunctionJet2 j;
  j.u = p.value * ang;
  j.u_phi = -st * p.d1 * ang;
  j.u_phiphi = (-t * p.d1 + st * st * p.d2) * ang;
  j.u_theta = p.value * dang;
  j.u_phitheta = -st * p.d1 * dang;
  j.u_thetatheta = -double(m) * m * p.value * ang;
  return j;
}

}  // namespace

TEST_CASE("spec constructors and validation") {
  const auto s = esp::EllipsoidSpec::from_axes(1.2, 0.8, 1.0);
  CHECK(s.a == 1.2);
  CHECK_FALSE(s.has_perturbation);
  CHECK_FALSE(s.biaxial());

  const auto p = esp::EllipsoidSpec::from_perturbation(0, 1, -1, 0.2);
  CHECK(p.has_perturbation);
  CHECK(p.a == doctest::Approx(1.0));
  CHECK(p.b == doctest::Approx(1.2));
  CHECK(p.c == doctest::Approx(0.8));

  CHECK_THROWS_AS(esp::EllipsoidSpec::from_axes(0.0, 1.0, 1.0),
                  esp::domain_error);
  CHECK_THROWS_AS(esp::EllipsoidSpec::from_axes(1.0, -2.0, 1.0),
                  esp::domain_error);
  // A perturbation large enough to close an axis is rejected too.
  CHECK_THROWS_AS(esp::EllipsoidSpec::from_perturbation(-1, 0, 0, 1.0),
                  esp::domain_error);
}

TEST_CASE("metric agrees with finite differences of the embedding") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 50; ++trial) {
    esp::EllipsoidSpec s = esp::EllipsoidSpec::from_axes(
        0.5 + uniform01(rng), 0.5 + uniform01(rng), 0.5 + uniform01(rng));
    const double phi = 0.15 + (kPi - 0.3) * uniform01(rng);
    const double theta = 2.0 * kPi * uniform01(rng);

    const double h = 1e-6;
    double xp[3], xm[3], yp[3], ym[3];
    embed(s, phi + h, theta, xp);
    embed(s, phi - h, theta, xm);
    embed(s, phi, theta + h, yp);
    embed(s, phi, theta - h, ym);
    double rphi[3], rtheta[3];
    for (int i = 0; i < 3; ++i) {
      rphi[i] = (xp[i] - xm[i]) / (2.0 * h);
      rtheta[i] = (yp[i] - ym[i]) / (2.0 * h);
    }
    double g11 = 0, g12 = 0, g22 = 0;
    for (int i = 0; i < 3; ++i) {
      g11 += rphi[i] * rphi[i];
      g12 += rphi[i] * rtheta[i];
      g22 += rtheta[i] * rtheta[i];
    }

    const auto g = esp::metric_triaxial(s, phi, theta);
    CHECK(g.g11 == doctest::Approx(g11).epsilon(1e-8));
    CHECK(g.g12 == doctest::Approx(g12).epsilon(1e-6).scale(1.0));
    CHECK(g.g22 == doctest::Approx(g22).epsilon(1e-8));
    CHECK(g.D == doctest::Approx(g.g11 * g.g22 - g.g12 * g.g12));
    CHECK_FALSE(g.degenerate_pole);
  }
}

TEST_CASE("sphere and biaxial reductions") {
  const auto sphere = esp::EllipsoidSpec::from_axes(1, 1, 1);
  const auto g = esp::metric_triaxial(sphere, 0.7, 1.3);
  CHECK(g.g11 == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(g.g12 == doctest::Approx(0.0));
  CHECK(g.g22 == doctest::Approx(std::sin(0.7) * std::sin(0.7)));

  // theta drops out of the biaxial metric and both routines agree.
  const auto bi = esp::EllipsoidSpec::from_axes(1.3, 1.3, 0.6);
  for (double phi : {0.2, 1.0, 2.5}) {
    const auto gb = esp::metric_biaxial(bi, phi);
    for (double theta : {0.0, 0.9, 4.4}) {
      const auto gt = esp::metric_triaxial(bi, phi, theta);
      CHECK(gb.g11 == doctest::Approx(gt.g11).epsilon(1e-14));
      CHECK(gb.g22 == doctest::Approx(gt.g22).epsilon(1e-14));
      CHECK(gt.g12 == doctest::Approx(0.0));
    }
  }
  CHECK_THROWS_AS(esp::metric_biaxial(esp::EllipsoidSpec::from_axes(1, 2, 3),
                                      1.0),
                  esp::domain_error);

  // Exact poles flag the degenerate limit instead of throwing.
  CHECK(esp::metric_triaxial(bi, 0.0, 0.0).degenerate_pole);
  CHECK(esp::metric_triaxial(bi, kPi, 1.0).D == doctest::Approx(0.0));
}

TEST_CASE("laplace_coeffs on the round sphere") {
  // Delta u = u_phiphi + cot(phi) u_phi + u_thetatheta / sin^2(phi).
  const auto sphere = esp::EllipsoidSpec::from_axes(1, 1, 1);
  for (double phi : {0.3, 1.1, 2.0, 2.8}) {
    const auto op = esp::laplace_coeffs(sphere, phi, 0.77);
    const double st = std::sin(phi);
    CHECK(op.A == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(op.B == doctest::Approx(0.0));
    CHECK(op.C == doctest::Approx(1.0 / (st * st)).epsilon(1e-13));
    CHECK(op.E == doctest::Approx(std::cos(phi) / st).epsilon(1e-12));
    CHECK(op.F == doctest::Approx(0.0).scale(1.0));
  }
  CHECK_THROWS_AS(esp::laplace_coeffs(sphere, 1e-12, 0.0), esp::domain_error);
}

TEST_CASE("sphere harmonics are eigenfunctions of laplace_coeffs") {
  const auto sphere = esp::EllipsoidSpec::from_axes(1, 1, 1);
  std::mt19937_64 rng(123);
  for (int trial = 0; trial < 60; ++trial) {
    const int l = 1 + static_cast<int>(rng() % 8);
    const int m = static_cast<int>(rng() % (l + 1));
    const double phi = 0.2 + (kPi - 0.4) * uniform01(rng);
    const double theta = 2.0 * kPi * uniform01(rng);
    const auto jet = harmonic_jet(l, m, phi, theta);
    const auto op = esp::laplace_coeffs(sphere, phi, theta);
    const double lhs = esp::apply(op, jet);
    CHECK(lhs == doctest::Approx(-double(l) * (l + 1) * jet.u)
                     .epsilon(1e-9)
                     .scale(1.0 + std::fabs(jet.u)));
  }
}

TEST_CASE("a1 equals the eps-derivative of the full operator") {
  // A_1 = d/deps Delta(spec(eps)) at eps = 0; compare coefficient by
  // coefficient against a central difference in eps.
  std::mt19937_64 rng(321);
  for (int trial = 0; trial < 40; ++trial) {
    const double al = -1.0 + 2.0 * uniform01(rng);
    const double be = -1.0 + 2.0 * uniform01(rng);
    const double ga = -1.0 + 2.0 * uniform01(rng);
    const double phi = 0.25 + (kPi - 0.5) * uniform01(rng);
    const double theta = 2.0 * kPi * uniform01(rng);

    const double h = 1e-5;
    const auto lp = esp::laplace_coeffs(
        esp::EllipsoidSpec::from_perturbation(al, be, ga, h), phi, theta);
    const auto lm = esp::laplace_coeffs(
        esp::EllipsoidSpec::from_perturbation(al, be, ga, -h), phi, theta);
    const auto a1 = esp::a1_coeffs(al, be, ga, phi, theta);

    CHECK(a1.A == doctest::Approx((lp.A - lm.A) / (2 * h)).epsilon(1e-7)
                      .scale(1.0));
    CHECK(a1.B == doctest::Approx((lp.B - lm.B) / (2 * h)).epsilon(1e-7)
                      .scale(1.0));
    CHECK(a1.C == doctest::Approx((lp.C - lm.C) / (2 * h)).epsilon(1e-7)
                      .scale(10.0));
    CHECK(a1.E == doctest::Approx((lp.E - lm.E) / (2 * h)).epsilon(1e-7)
                      .scale(10.0));
    CHECK(a1.F == doctest::Approx((lp.F - lm.F) / (2 * h)).epsilon(1e-7)
                      .scale(1.0));
  }
}

TEST_CASE("pure scaling gives A_1 = -2 Delta") {
  // For (alpha,beta,gamma) = (s,s,s) the surface is a sphere of radius
  // 1 + s*eps, whose Laplacian is (1+s*eps)^{-2} Delta, so the first
  // eps-derivative is -2 s Delta.
  const auto sphere = esp::EllipsoidSpec::from_axes(1, 1, 1);
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const double s = -1.0 + 2.0 * uniform01(rng);
    const double phi = 0.3 + (kPi - 0.6) * uniform01(rng);
    const double theta = 2.0 * kPi * uniform01(rng);
    const auto jet = harmonic_jet(3, 1, phi, theta);
    const double lhs = esp::a1_apply(s, s, s, jet, phi, theta);
    const double rhs =
        -2.0 * s * esp::apply(esp::laplace_coeffs(sphere, phi, theta), jet);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10).scale(1.0));
  }
}
