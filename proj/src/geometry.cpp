#include "hyperkg/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hyperkg/errors.hpp"

namespace hyperkg {

namespace {

void require_same_dim(std::span<const double> a, std::span<const double> b, const char* op) {
  if (a.size() != b.size()) {
    throw DimensionError(std::string(op) + ": dimension mismatch (" + std::to_string(a.size()) +
                         " vs " + std::to_string(b.size()) + ")");
  }
  if (a.empty()) throw DimensionError(std::string(op) + ": empty vectors");
}

void require_finite(std::span<const double> x, const char* op) {
  for (double c : x) {
    if (!std::isfinite(c)) throw DomainError(std::string(op) + ": non-finite coordinate");
  }
}

// Returns |x|^2 after checking x lies strictly inside the unit ball.
double require_in_ball(std::span<const double> x, const char* op) {
  require_finite(x, op);
  const double nsq = norm_sq(x);
  if (!(nsq < 1.0)) {
    throw DomainError(std::string(op) + ": point not inside the unit ball (|x|^2 = " +
                      std::to_string(nsq) + ")");
  }
  return nsq;
}

double distance_from_parts(double diff_sq, double u_sq, double v_sq) {
  const double delta = diff_sq / ((1.0 - u_sq) * (1.0 - v_sq));
  // 1 + 2*delta >= 1 analytically; the clamp only absorbs round-off.
  return std::acosh(std::max(1.0 + 2.0 * delta, 1.0));
}

double squared_distance(std::span<const double> u, std::span<const double> v) {
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double d = u[i] - v[i];
    s += d * d;
  }
  return s;
}

}  // namespace

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm_sq(std::span<const double> x) { return dot(x, x); }

double norm(std::span<const double> x) { return std::sqrt(norm_sq(x)); }

BallPoint::BallPoint(Vector coords) : coords_(std::move(coords)) {
  if (coords_.empty()) throw DimensionError("BallPoint: dimension must be at least 1");
  require_in_ball(coords_, "BallPoint");
}

PermutationSpec::PermutationSpec(std::size_t dim, std::size_t shift) : dim_(dim), shift_(shift) {
  if (dim == 0) throw DimensionError("PermutationSpec: dimension must be positive");
  if (shift >= dim) {
    throw DomainError("PermutationSpec: shift " + std::to_string(shift) + " not in [0, " +
                      std::to_string(dim) + ")");
  }
}

PermutationSpec PermutationSpec::inverse() const {
  return PermutationSpec(dim_, shift_ == 0 ? 0 : dim_ - shift_);
}

void PermutationSpec::apply(std::span<const double> x, std::span<double> out) const {
  if (x.size() != dim_ || out.size() != dim_) {
    throw DimensionError("circ_permute: vector length does not match permutation dimension");
  }
  const std::size_t head = dim_ - shift_;
  std::copy(x.begin() + static_cast<std::ptrdiff_t>(shift_), x.end(), out.begin());
  std::copy(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(shift_),
            out.begin() + static_cast<std::ptrdiff_t>(head));
}

void PermutationSpec::apply_inverse(std::span<const double> x, std::span<double> out) const {
  inverse().apply(x, out);
}

double poincare_distance(std::span<const double> u, std::span<const double> v) {
  require_same_dim(u, v, "poincare_distance");
  const double u_sq = require_in_ball(u, "poincare_distance");
  const double v_sq = require_in_ball(v, "poincare_distance");
  return distance_from_parts(squared_distance(u, v), u_sq, v_sq);
}

double poincare_distance(const BallPoint& u, const BallPoint& v) {
  return poincare_distance(u.coords(), v.coords());
}

double poincare_distance_unchecked(std::span<const double> u, std::span<const double> v) {
  return distance_from_parts(squared_distance(u, v), norm_sq(u), norm_sq(v));
}

void mobius_add_into(std::span<const double> u, std::span<const double> v, std::span<double> out) {
  const double uv = dot(u, v);
  const double u_sq = norm_sq(u);
  const double v_sq = norm_sq(v);
  const double a = 1.0 + 2.0 * uv + v_sq;
  const double b = 1.0 - u_sq;
  const double denom = 1.0 + 2.0 * uv + u_sq * v_sq;
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = (a * u[i] + b * v[i]) / denom;
}

Vector mobius_add(std::span<const double> u, std::span<const double> v) {
  require_same_dim(u, v, "mobius_add");
  require_in_ball(u, "mobius_add");
  require_in_ball(v, "mobius_add");
  Vector out(u.size());
  mobius_add_into(u, v, out);
  if (!(norm_sq(out) < 1.0)) throw NumericError("mobius_add: result left the unit ball");
  return out;
}

BallPoint mobius_add(const BallPoint& u, const BallPoint& v) {
  return BallPoint(mobius_add(u.coords(), v.coords()));
}

void mobius_add_vjp(std::span<const double> u, std::span<const double> v,
                    std::span<const double> grad_z, double weight,
                    std::span<double> grad_u, std::span<double> grad_v) {
  // z = (A u + B v) / D with A = 1 + 2<u,v> + |v|^2, B = 1 - |u|^2,
  // D = 1 + 2<u,v> + |u|^2 |v|^2.
  const double uv = dot(u, v);
  const double u_sq = norm_sq(u);
  const double v_sq = norm_sq(v);
  const double a = 1.0 + 2.0 * uv + v_sq;
  const double b = 1.0 - u_sq;
  const double denom = 1.0 + 2.0 * uv + u_sq * v_sq;
  const double gu = dot(grad_z, u);
  const double gv = dot(grad_z, v);
  // <g, z>
  const double gz = (a * gu + b * gv) / denom;
  const double w = weight / denom;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double du = 2.0 * gu * v[i] + a * grad_z[i] - 2.0 * gv * u[i] -
                      gz * (2.0 * v[i] + 2.0 * v_sq * u[i]);
    const double dv = gu * (2.0 * u[i] + 2.0 * v[i]) + b * grad_z[i] -
                      gz * (2.0 * u[i] + 2.0 * u_sq * v[i]);
    grad_u[i] += w * du;
    grad_v[i] += w * dv;
  }
}

Vector circ_permute(const PermutationSpec& spec, std::span<const double> x) {
  Vector out(x.size());
  spec.apply(x, out);
  return out;
}

void project_to_radius_inplace(std::span<double> x, double a, double eps) {
  if (!(a > 0.0)) throw DomainError("project_to_radius: radius must be positive");
  if (!(eps > 0.0)) throw DomainError("project_to_radius: eps must be positive");
  require_finite(x, "project_to_radius");
  const double len = norm(x);
  if (len >= a) {
    const double scale = a / (len + eps);
    for (double& c : x) c *= scale;
    // For |x| >> eps the scaled norm rounds to a itself; nudge it inside.
    while (norm(x) >= a) {
      for (double& c : x) c *= 1.0 - 0x1p-50;
    }
  }
}

Vector project_to_radius(std::span<const double> x, double a, double eps) {
  Vector out(x.begin(), x.end());
  project_to_radius_inplace(out, a, eps);
  return out;
}

double riemannian_scale(std::span<const double> theta) {
  const double nsq = require_in_ball(theta, "riemannian_scale");
  const double c = 1.0 - nsq;
  return c * c / 4.0;
}

bool accumulate_distance_grad(std::span<const double> x, std::span<const double> r, double weight,
                              std::span<double> grad_x, std::span<double> grad_r) {
  const double x_sq = norm_sq(x);
  const double r_sq = norm_sq(r);
  const double diff_sq = squared_distance(x, r);
  const double alpha = 1.0 - x_sq;
  const double beta = 1.0 - r_sq;
  const double delta = diff_sq / (alpha * beta);
  if (std::acosh(std::max(1.0 + 2.0 * delta, 1.0)) < kCoincidenceThreshold) return false;

  // d/dx arccosh(1 + 2 delta) = (d delta/dx) / sqrt(delta (1 + delta)).
  const double coef = weight / std::sqrt(delta * (1.0 + delta));
  const double cx = coef / (alpha * alpha * beta);
  const double cr = coef / (beta * beta * alpha);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - r[i];
    grad_x[i] += cx * (2.0 * d * alpha + 2.0 * x[i] * diff_sq);
    grad_r[i] += cr * (-2.0 * d * beta + 2.0 * r[i] * diff_sq);
  }
  return true;
}

DistanceGradient distance_grad(std::span<const double> x, std::span<const double> r) {
  require_same_dim(x, r, "distance_grad");
  require_in_ball(x, "distance_grad");
  require_in_ball(r, "distance_grad");
  DistanceGradient g{Vector(x.size(), 0.0), Vector(x.size(), 0.0)};
  if (!accumulate_distance_grad(x, r, 1.0, g.grad_x, g.grad_r)) {
    throw CoincidentPointsError("distance_grad: points coincide, distance is not differentiable");
  }
  return g;
}

}  // namespace hyperkg
