#pragma once

#include <Eigen/Dense>

#include <vector>

namespace evasion {

/// A point in D-dimensional feature space.
using Instance = Eigen::VectorXd;
using Vector = Eigen::VectorXd;

/// Weighted L1 distance from a fixed target instance:
///   cost(x) = sum_d c_d * |x_d - target_d|,   0 < c_d < inf.
class CostFunction {
 public:
  CostFunction(Instance target, Vector weights);

  /// Uniform unit weights around `target`.
  static CostFunction uniform(Instance target);

  const Instance& target() const { return target_; }
  const Vector& weights() const { return weights_; }
  Eigen::Index dimension() const { return target_.size(); }

  double operator()(const Instance& x) const { return cost(x); }
  double cost(const Instance& x) const;

  /// Weighted L1 distance between two arbitrary points under the same weights.
  double distance(const Instance& a, const Instance& b) const;

 private:
  Instance target_;
  Vector weights_;
};

/// Closed halfspace { x : normal . x <= offset }.
class Halfspace {
 public:
  Halfspace(Vector normal, double offset);

  const Vector& normal() const { return normal_; }
  double offset() const { return offset_; }

  double evaluate(const Instance& x) const { return normal_.dot(x); }
  bool contains(const Instance& x) const { return normal_.dot(x) <= offset_; }

 private:
  Vector normal_;
  double offset_;
};

/// Vertices target +/- (C / c_d) e_d of the cost-C ball, ordered
/// +e_1, -e_1, +e_2, -e_2, ...
std::vector<Instance> ball_vertices(const CostFunction& cf, double cost_level);

/// Directions +/- (1 / c_d) e_d, each of unit cost; same ordering as
/// ball_vertices.
std::vector<Vector> unit_cost_directions(const CostFunction& cf);

/// Componentwise c_f * sign(y_f - target_f), with 0 at y_f == target_f.
Vector subgradient(const CostFunction& cf, const Instance& y);

/// Halfspace through `y` whose normal is the cost subgradient at `y`.
/// Contains every x with cost(x) <= cost_level; requires cost(y) > cost_level.
Halfspace separating_halfspace(const CostFunction& cf, const Instance& y, double cost_level);

void require_dimension(const CostFunction& cf, const Instance& x);

}  // namespace evasion
