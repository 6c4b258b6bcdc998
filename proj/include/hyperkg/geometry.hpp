#pragma once

// Poincare-ball kernel: distance, Mobius addition, circular permutations,
// radius projection and the analytic distance gradient.
//
// Every function is pure; all arithmetic is double precision because the
// conformal factor squares (1 - |x|^2) and single precision underflows near
// the boundary.

#include <cstddef>
#include <span>
#include <vector>

namespace hyperkg {

using Vector = std::vector<double>;

/// Constant of the radius projection used throughout training.
inline constexpr double kProjectionEps = 1e-5;

/// Distances below this are treated as coincident points by the gradient.
inline constexpr double kCoincidenceThreshold = 1e-9;

double dot(std::span<const double> a, std::span<const double> b);
double norm_sq(std::span<const double> x);
double norm(std::span<const double> x);

/// A point of the open unit ball. Construction validates finiteness and
/// |x| < 1.
class BallPoint {
 public:
  explicit BallPoint(Vector coords);

  std::span<const double> coords() const { return coords_; }
  std::size_t dim() const { return coords_.size(); }
  double operator[](std::size_t i) const { return coords_[i]; }

  friend bool operator==(const BallPoint&, const BallPoint&) = default;

 private:
  Vector coords_;
};

/// Circular shift of the coordinates by `shift` positions: the permuted
/// vector is (x[shift], ..., x[n-1], x[0], ..., x[shift-1]).
class PermutationSpec {
 public:
  PermutationSpec(std::size_t dim, std::size_t shift);

  std::size_t dim() const { return dim_; }
  std::size_t shift() const { return shift_; }

  /// The permutation undoing this one (shift n - beta).
  PermutationSpec inverse() const;

  void apply(std::span<const double> x, std::span<double> out) const;
  void apply_inverse(std::span<const double> x, std::span<double> out) const;

  friend bool operator==(const PermutationSpec&, const PermutationSpec&) = default;

 private:
  std::size_t dim_;
  std::size_t shift_;
};

/// Hyperbolic distance arccosh(1 + 2 |u-v|^2 / ((1-|u|^2)(1-|v|^2))).
/// Throws DimensionError on mismatch and DomainError when either point is
/// not strictly inside the ball. Inputs are never clamped.
double poincare_distance(std::span<const double> u, std::span<const double> v);
double poincare_distance(const BallPoint& u, const BallPoint& v);

/// Same formula without validation, for inputs already known to be valid.
double poincare_distance_unchecked(std::span<const double> u, std::span<const double> v);

/// Gyrovector sum u (+) v.
Vector mobius_add(std::span<const double> u, std::span<const double> v);
BallPoint mobius_add(const BallPoint& u, const BallPoint& v);

/// Unchecked Mobius addition into a caller buffer (training hot path).
void mobius_add_into(std::span<const double> u, std::span<const double> v, std::span<double> out);

/// Vector-Jacobian product of z = u (+) v: given dL/dz, accumulates
/// weight * dL/du into grad_u and weight * dL/dv into grad_v.
void mobius_add_vjp(std::span<const double> u, std::span<const double> v,
                    std::span<const double> grad_z, double weight,
                    std::span<double> grad_u, std::span<double> grad_v);

Vector circ_permute(const PermutationSpec& spec, std::span<const double> x);

/// a * x / (|x| + eps) when |x| >= a, x otherwise.
Vector project_to_radius(std::span<const double> x, double a, double eps = kProjectionEps);
void project_to_radius_inplace(std::span<double> x, double a, double eps = kProjectionEps);

/// Conformal factor (1 - |theta|^2)^2 / 4 mapping Euclidean to Riemannian
/// gradients.
double riemannian_scale(std::span<const double> theta);

struct DistanceGradient {
  Vector grad_x;
  Vector grad_r;
};

/// Euclidean gradient of poincare_distance(x, r) with respect to both
/// arguments. Throws CoincidentPointsError when the distance is below
/// kCoincidenceThreshold, where the distance is not differentiable.
DistanceGradient distance_grad(std::span<const double> x, std::span<const double> r);

/// Training-side variant: adds weight * grad into the two buffers and
/// returns true, or leaves them untouched and returns false at
/// near-coincidence. Inputs are assumed valid.
bool accumulate_distance_grad(std::span<const double> x, std::span<const double> r, double weight,
                              std::span<double> grad_x, std::span<double> grad_r);

}  // namespace hyperkg
