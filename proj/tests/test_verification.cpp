#include <cmath>
#include <random>

#include "doctest.h"
#include "hyperkg/verification.hpp"
#include "test_util.hpp"

using namespace hyperkg;

namespace {

/// Scales x by t in place.
Vector scaled(const Vector& x, double t) {
  Vector y = x;
  for (double& c : y) c *= t;
  return y;
}

/// Boundary of {x : d(x, r) <= lambda} along the ray through r, found by
/// bisection on the long double reference distance. Returns (t_lo, t_hi)
/// with the boundary points at t * r / |r|.
std::pair<double, double> boundary_along_r(const Vector& r, double lambda) {
  const double n = testutil::l2(r);
  const Vector u = scaled(r, 1.0 / n);
  auto d = [&](double t) { return testutil::ref_distance(scaled(u, t), r); };
  double lo = -1.0 + 1e-15, hi = n;  // d decreasing on [-1, |r|]
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (d(mid) > lambda ? lo : hi) = mid;
  }
  const double t_lo = 0.5 * (lo + hi);
  lo = n;
  hi = 1.0 - 1e-15;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (d(mid) <= lambda ? lo : hi) = mid;
  }
  return {t_lo, 0.5 * (lo + hi)};
}

}  // namespace

TEST_CASE("region at the origin") {
  const Vector r{0.0, 0.0, 0.0};
  const auto reg = region_from(r, std::acosh(3.0));
  CHECK(reg.rho == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(reg.radius_sq == doctest::Approx(0.5).epsilon(1e-15));
  for (double c : reg.center) CHECK(c == 0.0);
}

TEST_CASE("region matches the bisected boundary") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> lam(0.05, 4.0);
  for (int i = 0; i < 300; ++i) {
    const Vector r = testutil::in_ball(4, 0.95, rng);
    if (testutil::l2(r) < 1e-3) continue;
    const double lambda = lam(rng);
    const auto reg = region_from(r, lambda);
    const auto [t_lo, t_hi] = boundary_along_r(r, lambda);
    const Vector u = scaled(r, 1.0 / testutil::l2(r));
    const Vector center = scaled(u, 0.5 * (t_lo + t_hi));
    for (std::size_t k = 0; k < r.size(); ++k) CHECK(reg.center[k] == doctest::Approx(center[k]).epsilon(1e-7));
    const double radius = 0.5 * (t_hi - t_lo);
    CHECK(std::sqrt(reg.radius_sq) == doctest::Approx(radius).epsilon(1e-7));
  }
}

TEST_CASE("region invariants") {
  Rng rng(9);
  std::uniform_real_distribution<double> lam(1e-3, 6.0);
  for (int i = 0; i < 10000; ++i) {
    const Vector r = sample_unit_ball(1 + i % 6, rng);
    CHECK(testutil::l2(r) < 1.0);
    const auto reg = region_from(r, lam(rng));
    CHECK(reg.rho > 0.0);
    CHECK(reg.radius_sq > 0.0);
    // The whole ball stays inside the unit ball.
    CHECK(testutil::l2(reg.center) + std::sqrt(reg.radius_sq) < 1.0);
  }

  // Shrinks monotonically to the single point r as lambda -> 0.
  const Vector r{0.3, -0.4};
  double prev = INFINITY;
  for (double lambda : {2.0, 1.0, 0.5, 0.1, 1e-2, 1e-3, 1e-4}) {
    const auto reg = region_from(r, lambda);
    CHECK(reg.radius_sq < prev);
    prev = reg.radius_sq;
    CHECK(testutil::l2({reg.center[0] - r[0], reg.center[1] - r[1]}) < 2 * std::sqrt(reg.radius_sq) + 1e-12);
  }
  CHECK(prev < 1e-8);
}

TEST_CASE("points just inside and outside the sphere") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> lam(0.05, 4.0);
  for (int i = 0; i < 200; ++i) {
    const std::size_t dim = 2 + i % 5;
    const Vector r = testutil::in_ball(dim, 0.9, rng);
    const double lambda = lam(rng);
    const auto reg = region_from(r, lambda);
    const double rad = std::sqrt(reg.radius_sq);
    for (int j = 0; j < 20; ++j) {
      const Vector dir = testutil::on_sphere(dim, 1.0, rng);
      Vector in = reg.center, out = reg.center;
      for (std::size_t k = 0; k < dim; ++k) {
        in[k] += rad * (1 - 1e-3) * dir[k];
        out[k] += rad * (1 + 1e-3) * dir[k];
      }
      CHECK(testutil::ref_distance(in, r) < lambda);
      if (testutil::l2(out) < 1.0) CHECK(testutil::ref_distance(out, r) > lambda);
    }
  }
}

TEST_CASE("locus and convexity checks") {
  Rng rng(4);
  const auto reg = region_from(Vector{0.2, 0.5, -0.1}, 1.3);
  const auto locus = check_locus_equivalence(reg, 20000, rng);
  CHECK(locus.samples == 20000);
  CHECK(locus.violations == 0);
  CHECK(locus.skipped < 100);
  const auto conv = check_region_convexity(reg, 20000, rng);
  CHECK(conv.violations == 0);

  // A wrong region is caught.
  auto wrong = reg;
  wrong.radius_sq *= 1.2;
  CHECK(check_locus_equivalence(wrong, 20000, rng).violations > 0);

  for (std::size_t dim : {2u, 5u, 30u}) {
    const auto suite = check_random_regions(dim, 10, 2000, rng);
    CHECK(suite.regions == 10);
    CHECK(suite.locus_violations == 0);
    CHECK(suite.convexity_violations == 0);
  }
}

TEST_CASE("restriction counterexamples") {
  for (double a : {1.0, 0.25, 3.0}) {
    for (double offset : {0.0, 0.7}) {
      const auto rep = lemma1_counterexamples(a, offset);
      REQUIRE(rep.cases.size() == 3);
      CHECK(rep.holds());
      for (const auto& c : rep.cases) {
        for (const auto& p : c.premises) {
          CHECK(p.l1 <= a * (1 + 1e-15));
          CHECK(p.l2 <= a * (1 + 1e-15));
        }
        CHECK(c.conclusion.l1 > a);
        CHECK(c.conclusion.l2 > a);
      }
      CHECK(rep.cases[0].conclusion.l2 == doctest::Approx(3 * a).epsilon(1e-14));
      CHECK(rep.cases[1].conclusion.l2 == doctest::Approx(3 * a).epsilon(1e-14));
      CHECK(std::abs(rep.cases[2].conclusion.l2 - std::sqrt(26.0) / 2.0 * a) <= 1e-12 * std::max(1.0, a));
    }
  }
  const auto high = lemma1_counterexamples(1.0, 0.0, 50);
  CHECK(high.holds());
  CHECK(std::abs(high.cases[2].conclusion.l2 - std::sqrt(26.0) / 2.0) <= 1e-12);
}

TEST_CASE("gradient suite") {
  const auto r = check_loss_gradients(60, 5);
  CHECK(r.configurations == 60);
  CHECK(r.failures == 0);
  CHECK(r.max_rel_error < kGradientTolerance);
  // Same seed, same outcome.
  CHECK(check_loss_gradients(60, 5).max_rel_error == r.max_rel_error);
}
