#include "hyperkg/verification.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "hyperkg/errors.hpp"
#include "hyperkg/model.hpp"
#include "hyperkg/training.hpp"

namespace hyperkg {

RelationRegion region_from(std::span<const double> r, double lambda) {
  const BallPoint checked(Vector(r.begin(), r.end()));
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw DomainError("region_from: lambda must be finite and > 0");
  }
  RelationRegion reg;
  reg.r.assign(r.begin(), r.end());
  reg.lambda = lambda;
  const double r_sq = norm_sq(r);
  reg.rho = (std::cosh(lambda) - 1.0) / 2.0 * (1.0 - r_sq);
  const double k = reg.rho + 1.0;
  reg.center.resize(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) reg.center[i] = r[i] / k;
  // rho/(rho+1) + |r|^2/(rho+1)^2 - |r|^2/(rho+1), factored to avoid
  // cancellation when rho is small.
  reg.radius_sq = reg.rho / k * (1.0 - r_sq / k);
  return reg;
}

Vector sample_unit_ball(std::size_t n, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  Vector x(n);
  double len = 0.0;
  while (len == 0.0) {
    for (double& c : x) c = gauss(rng);
    len = norm(x);
  }
  const double radius = std::pow(uni(rng), 1.0 / static_cast<double>(n));
  for (double& c : x) c *= radius / len;
  if (!(norm_sq(x) < 1.0)) {
    for (double& c : x) c *= 1.0 - 1e-12;
  }
  return x;
}

namespace {

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s;
}

// Uniform point of the Euclidean ball (center, scale * sqrt(radius_sq)),
// redrawn until it lies inside the unit ball.
Vector sample_near_region(const RelationRegion& region, double scale, Rng& rng) {
  const double radius = scale * std::sqrt(region.radius_sq);
  for (;;) {
    Vector x = sample_unit_ball(region.center.size(), rng);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = region.center[i] + radius * x[i];
    if (norm_sq(x) < 1.0) return x;
  }
}

}  // namespace

CheckResult check_locus_equivalence(const RelationRegion& region, std::size_t samples, Rng& rng,
                                    double tol) {
  if (samples < 1) throw DomainError("check_locus_equivalence: samples must be >= 1");
  CheckResult res;
  res.name = "locus_equivalence";
  res.samples = samples;
  res.worst_margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < samples; ++i) {
    const Vector x = i % 2 == 0 ? sample_unit_ball(region.center.size(), rng)
                                : sample_near_region(region, 1.2, rng);
    const double d = poincare_distance(x, region.r);
    const double e = squared_distance(x, region.center);
    const double margin = std::min(std::abs(d - region.lambda), std::abs(e - region.radius_sq));
    if (margin < tol) {
      ++res.skipped;
      continue;
    }
    res.worst_margin = std::min(res.worst_margin, margin);
    if ((d <= region.lambda) != (e <= region.radius_sq)) ++res.violations;
  }
  return res;
}

CheckResult check_region_convexity(const RelationRegion& region, std::size_t pairs, Rng& rng,
                                   double tol) {
  CheckResult res;
  res.name = "region_convexity";
  res.samples = pairs;
  res.worst_margin = std::numeric_limits<double>::infinity();
  Vector mid(region.center.size());
  for (std::size_t i = 0; i < pairs; ++i) {
    const Vector a = sample_near_region(region, 1.0, rng);
    const Vector b = sample_near_region(region, 1.0, rng);
    if (poincare_distance(a, region.r) > region.lambda - tol ||
        poincare_distance(b, region.r) > region.lambda - tol) {
      ++res.skipped;
      continue;
    }
    for (std::size_t k = 0; k < mid.size(); ++k) mid[k] = 0.5 * (a[k] + b[k]);
    const double slack = region.lambda - poincare_distance(mid, region.r);
    res.worst_margin = std::min(res.worst_margin, slack);
    if (slack < -tol) ++res.violations;
  }
  return res;
}

RegionSuiteResult check_random_regions(std::size_t dim, std::size_t regions, std::size_t samples,
                                       Rng& rng, double tol) {
  RegionSuiteResult res;
  res.dim = dim;
  res.regions = regions;
  res.samples = samples;
  res.worst_margin = std::numeric_limits<double>::infinity();
  std::uniform_real_distribution<double> lambda_dist(0.05, 4.0);
  for (std::size_t i = 0; i < regions; ++i) {
    const Vector r = sample_unit_ball(dim, rng);
    const RelationRegion region = region_from(r, lambda_dist(rng));
    const CheckResult locus = check_locus_equivalence(region, samples, rng, tol);
    const CheckResult convex = check_region_convexity(region, samples, rng, tol);
    res.skipped += locus.skipped + convex.skipped;
    res.locus_violations += locus.violations;
    res.convexity_violations += convex.violations;
    res.worst_margin = std::min(res.worst_margin, locus.worst_margin);
  }
  return res;
}

bool Lemma1Report::holds() const {
  // Premises are inclusive; the relative slack absorbs round-off in the
  // offset arithmetic.
  const double bound = a * (1.0 + 1e-12);
  for (const auto& c : cases) {
    for (const auto& p : c.premises) {
      if (p.l1 > bound || p.l2 > bound) return false;
    }
    if (!(c.conclusion.l1 > a) || !(c.conclusion.l2 > a)) return false;
  }
  return true;
}

Lemma1Report lemma1_counterexamples(double a, double offset, std::size_t dim) {
  if (!(a > 0.0)) throw DomainError("lemma1_counterexamples: a must be > 0");
  if (dim < 2) throw DimensionError("lemma1_counterexamples: R3 needs dimension >= 2");

  auto vec = [dim](double x0, double x1 = 0.0) {
    Vector v(dim, 0.0);
    v[0] = x0;
    v[1] = x1;
    return v;
  };
  auto score = [](const Vector& s, const Vector& r, const Vector& o) {
    return NormPair{score_transe(s, r, o, Norm::L1), score_transe(s, r, o, Norm::L2)};
  };

  Lemma1Report rep;
  rep.a = a;
  rep.offset = offset;
  const Vector r = vec(a);
  {
    // Reflexive on {e1, e2} but not symmetric.
    const Vector e1 = vec(offset - a);
    const Vector e2 = vec(offset + a);
    rep.cases.push_back({"R1",
                         {score(e1, r, e1), score(e2, r, e2), score(e1, r, e2)},
                         score(e2, r, e1)});
  }
  {
    // Reflexive on {e1, e2, e3} but not transitive.
    const Vector e1 = vec(offset - a);
    const Vector e2 = vec(offset + a);
    const Vector e3 = vec(offset + 3.0 * a);
    rep.cases.push_back({"R2",
                         {score(e1, r, e1), score(e1, r, e2), score(e2, r, e3), score(e2, r, e2),
                          score(e3, r, e3)},
                         score(e1, r, e3)});
  }
  {
    // e1 relates to all of {e1, e2, e3}, e2 relates to e3 only.
    const Vector e1 = vec(offset);
    const Vector e2 = vec(offset + 1.5 * a, 0.5 * a);
    const Vector e3 = vec(offset + 2.0 * a);
    rep.cases.push_back({"R3",
                         {score(e1, r, e1), score(e1, r, e2), score(e1, r, e3), score(e2, r, e3)},
                         score(e2, r, e1)});
  }
  return rep;
}

namespace {

// Random draw for the gradient check, with parameters spread through the
// constraint balls rather than left near the origin by the initialiser.
struct GradientCase {
  ParameterStore store;
  TrainingBatch batch;
  double gamma;
  double lambda;
};

GradientCase draw_gradient_case(Variant variant, Rng& rng) {
  std::uniform_int_distribution<int> dim_dist(2, 8);
  std::uniform_int_distribution<int> n_ent_dist(3, 6);
  std::uniform_int_distribution<int> n_rel_dist(1, 3);
  std::uniform_int_distribution<int> count_dist(1, 3);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  const auto dim = static_cast<std::size_t>(dim_dist(rng));
  const auto n_ent = static_cast<std::size_t>(n_ent_dist(rng));
  const auto n_rel = static_cast<std::size_t>(n_rel_dist(rng));
  std::uniform_int_distribution<std::size_t> beta_dist(0, dim - 1);
  ParameterStore store = init_params(n_ent, n_rel, dim, beta_dist(rng), variant, rng());
  auto spread = [&](std::span<double> v, double radius) {
    const Vector x = sample_unit_ball(dim, rng);
    for (std::size_t k = 0; k < dim; ++k) v[k] = 0.9 * radius * x[k];
  };
  for (std::size_t e = 0; e < n_ent; ++e) spread(store.entity(static_cast<EntityId>(e)), store.entity_radius());
  for (std::size_t r = 0; r < n_rel; ++r) spread(store.relation(static_cast<RelationId>(r)), store.relation_radius());

  std::uniform_int_distribution<EntityId> ent(0, static_cast<EntityId>(n_ent - 1));
  std::uniform_int_distribution<RelationId> rel(0, static_cast<RelationId>(n_rel - 1));
  auto random_triple = [&] { return Triple{ent(rng), rel(rng), ent(rng)}; };
  TrainingBatch batch;
  batch.negs_per_positive = static_cast<std::size_t>(count_dist(rng));
  const int n_pos = count_dist(rng);
  for (int i = 0; i < n_pos; ++i) {
    const Triple pos = random_triple();
    batch.positives.push_back(pos);
    for (std::size_t j = 0; j < batch.negs_per_positive; ++j) {
      // A negative equal to its positive has an identically zero gradient.
      Triple neg = random_triple();
      while (neg == pos) neg = random_triple();
      batch.negatives.push_back(neg);
    }
  }
  const double gamma = 0.5 + 2.5 * unit(rng);
  const double lambda = unit(rng) < 0.3 ? 0.0 : unit(rng);
  return GradientCase{std::move(store), std::move(batch), gamma, lambda};
}

// The hinge is not differentiable at zero and the distance is not
// differentiable where a term meets its relation.
bool near_kink(const GradientCase& c) {
  constexpr double kMargin = 1e-4;
  for (std::size_t i = 0; i < c.batch.positives.size(); ++i) {
    const double pos = score_hyperkg(c.store, c.batch.positives[i]);
    if (pos < kMargin) return true;
    for (std::size_t j = 0; j < c.batch.negs_per_positive; ++j) {
      const double neg = score_hyperkg(c.store, c.batch.negatives[i * c.batch.negs_per_positive + j]);
      if (neg < kMargin || std::abs(c.gamma + pos - neg) < kMargin) return true;
    }
  }
  return false;
}

}  // namespace

GradientCheckResult check_loss_gradients(std::size_t configurations, std::uint64_t seed, double tol,
                                         double h) {
  Rng rng = RngStreams(seed).stream("gradient-check");
  GradientCheckResult res;
  while (res.configurations < configurations) {
    const Variant variant = res.configurations % 2 == 0 ? Variant::EuclideanAdd : Variant::MobiusAdd;
    GradientCase c = draw_gradient_case(variant, rng);
    if (near_kink(c)) {
      ++res.resampled;
      continue;
    }
    GradientBuffer grads(c.store);
    compute_loss_and_grads(c.store, c.batch, c.gamma, c.lambda, true, grads);

    double diff_sq = 0.0;
    double analytic_sq = 0.0;
    double numeric_sq = 0.0;
    auto probe = [&](std::span<double> param, std::span<const double> analytic) {
      for (std::size_t k = 0; k < param.size(); ++k) {
        const double saved = param[k];
        param[k] = saved + h;
        const double up = compute_loss(c.store, c.batch, c.gamma, c.lambda);
        param[k] = saved - h;
        const double down = compute_loss(c.store, c.batch, c.gamma, c.lambda);
        param[k] = saved;
        const double numeric = (up - down) / (2.0 * h);
        diff_sq += (analytic[k] - numeric) * (analytic[k] - numeric);
        analytic_sq += analytic[k] * analytic[k];
        numeric_sq += numeric * numeric;
      }
    };
    for (std::size_t e = 0; e < c.store.n_entities(); ++e) {
      const auto id = static_cast<EntityId>(e);
      probe(c.store.entity(id), grads.entity(id));
    }
    for (std::size_t r = 0; r < c.store.n_relations(); ++r) {
      const auto id = static_cast<RelationId>(r);
      probe(c.store.relation(id), grads.relation(id));
    }
    // A gradient that cancels to zero leaves only round-off on both sides, and
    // the relative error carries no information there.
    const double denom = std::sqrt(analytic_sq) + std::sqrt(numeric_sq);
    if (denom < 1e-6) {
      ++res.resampled;
      continue;
    }
    const double rel = std::sqrt(diff_sq) / denom;
    res.max_rel_error = std::max(res.max_rel_error, rel);
    if (!(rel < tol)) ++res.failures;
    ++res.configurations;
  }
  return res;
}

}  // namespace hyperkg
