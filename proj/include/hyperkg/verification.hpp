#pragma once

// Executable checks of the geometric claims behind the model: relation
// regions d_p(x, r) <= lambda are Euclidean balls (hence convex), and the
// TransE restrictions R1-R3 fail once validity means a score below a
// positive threshold.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "hyperkg/geometry.hpp"
#include "hyperkg/rng.hpp"

namespace hyperkg {

/// The locus {x : d_p(x, r) <= lambda} written as the Euclidean ball
/// |x - center|^2 <= radius_sq, with rho = (cosh(lambda) - 1) / 2 * (1 - |r|^2).
struct RelationRegion {
  Vector r;
  double lambda = 0.0;
  double rho = 0.0;
  Vector center;
  double radius_sq = 0.0;
};

RelationRegion region_from(std::span<const double> r, double lambda);

/// Uniform sample from the open unit ball of dimension n (direction times
/// U^(1/n) radius).
Vector sample_unit_ball(std::size_t n, Rng& rng);

struct CheckResult {
  std::string name;
  std::size_t samples = 0;
  std::size_t skipped = 0;  // inside the tolerance band around a threshold
  std::size_t violations = 0;
  /// Smallest distance of an evaluated sample from either decision
  /// threshold.
  double worst_margin = 0.0;
};

inline constexpr double kLocusTolerance = 1e-9;

/// Draws x (half uniformly in the unit ball, half near the region) and
/// counts disagreements between d_p(x, r) <= lambda and
/// |x - center|^2 <= radius_sq, skipping samples within `tol` of either
/// threshold.
CheckResult check_locus_equivalence(const RelationRegion& region, std::size_t samples, Rng& rng,
                                    double tol = kLocusTolerance);

/// Midpoints of in-region pairs must be in-region (up to `tol` in d_p).
CheckResult check_region_convexity(const RelationRegion& region, std::size_t pairs, Rng& rng,
                                   double tol = kLocusTolerance);

struct RegionSuiteResult {
  std::size_t dim = 0;
  std::size_t regions = 0;
  std::size_t samples = 0;  // per region, for each of the two checks
  std::size_t skipped = 0;
  std::size_t locus_violations = 0;
  std::size_t convexity_violations = 0;
  double worst_margin = 0.0;
};

/// Both checks over `regions` random regions: r uniform in the ball and
/// lambda uniform in [0.05, 4].
RegionSuiteResult check_random_regions(std::size_t dim, std::size_t regions, std::size_t samples,
                                       Rng& rng, double tol = kLocusTolerance);

struct NormPair {
  double l1 = 0.0;
  double l2 = 0.0;
};

/// One TransE restriction instance: premise scores (which must all be <= a)
/// and the conclusion score that the restriction claims is <= a.
struct RestrictionCase {
  std::string name;
  std::vector<NormPair> premises;
  NormPair conclusion;
};

struct Lemma1Report {
  double a = 0.0;
  double offset = 0.0;
  std::vector<RestrictionCase> cases;  // R1, R2, R3

  /// Every premise <= a and every conclusion > a, under both norms.
  bool holds() const;
};

/// Builds the R1/R2/R3 counterexample vectors (first coordinates offset by
/// `offset`, embedded in dimension `dim`) and evaluates TransE scores.
Lemma1Report lemma1_counterexamples(double a, double offset, std::size_t dim = 2);

struct GradientCheckResult {
  std::size_t configurations = 0;
  std::size_t failures = 0;
  std::size_t resampled = 0;  // draws on a hinge kink or with a vanishing gradient
  double max_rel_error = 0.0;
};

inline constexpr double kGradientTolerance = 1e-5;

/// Random small stores (both variants, random dims, margins, lambdas and
/// batches) whose analytic batch-loss gradient is compared with central
/// differences of step `h`. Relative error is |g - g_fd| / (|g| + |g_fd|)
/// over the whole parameter vector.
GradientCheckResult check_loss_gradients(std::size_t configurations, std::uint64_t seed,
                                         double tol = kGradientTolerance, double h = 1e-6);

}  // namespace hyperkg
