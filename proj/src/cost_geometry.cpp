#include "evasion/cost_geometry.hpp"

#include "evasion/errors.hpp"

#include <cmath>
#include <string>

namespace evasion {

CostFunction::CostFunction(Instance target, Vector weights)
    : target_(std::move(target)), weights_(std::move(weights)) {
  if (target_.size() < 1) throw UsageError("cost function: dimension must be at least 1");
  if (weights_.size() != target_.size()) {
    throw UsageError("cost function: weights length " + std::to_string(weights_.size()) +
                     " does not match target dimension " + std::to_string(target_.size()));
  }
  if (!target_.allFinite()) throw UsageError("cost function: target has non-finite coordinates");
  for (Eigen::Index d = 0; d < weights_.size(); ++d) {
    const double c = weights_[d];
    if (!(c > 0.0) || !std::isfinite(c)) {
      throw UsageError("cost function: weight " + std::to_string(d) + " must satisfy 0 < c < inf");
    }
  }
}

CostFunction CostFunction::uniform(Instance target) {
  Vector w = Vector::Ones(target.size());
  return CostFunction(std::move(target), std::move(w));
}

void require_dimension(const CostFunction& cf, const Instance& x) {
  if (x.size() != cf.dimension()) {
    throw UsageError("dimension mismatch: instance has " + std::to_string(x.size()) +
                     " coordinates, cost function expects " + std::to_string(cf.dimension()));
  }
}

double CostFunction::cost(const Instance& x) const {
  require_dimension(*this, x);
  return weights_.dot((x - target_).cwiseAbs());
}

double CostFunction::distance(const Instance& a, const Instance& b) const {
  require_dimension(*this, a);
  require_dimension(*this, b);
  return weights_.dot((a - b).cwiseAbs());
}

Halfspace::Halfspace(Vector normal, double offset) : normal_(std::move(normal)), offset_(offset) {
  if (normal_.size() == 0 || normal_.isZero(0.0)) throw UsageError("halfspace: normal must be nonzero");
  if (!normal_.allFinite() || !std::isfinite(offset_)) throw UsageError("halfspace: non-finite coefficients");
}

std::vector<Instance> ball_vertices(const CostFunction& cf, double cost_level) {
  if (!(cost_level > 0.0)) throw UsageError("ball_vertices: cost level must be positive");
  std::vector<Instance> out;
  out.reserve(static_cast<std::size_t>(2 * cf.dimension()));
  for (const Vector& e : unit_cost_directions(cf)) out.emplace_back(cf.target() + cost_level * e);
  return out;
}

std::vector<Vector> unit_cost_directions(const CostFunction& cf) {
  const Eigen::Index dim = cf.dimension();
  std::vector<Vector> out;
  out.reserve(static_cast<std::size_t>(2 * dim));
  for (Eigen::Index d = 0; d < dim; ++d) {
    Vector e = Vector::Zero(dim);
    e[d] = 1.0 / cf.weights()[d];
    out.push_back(e);
    out.emplace_back(-e);
  }
  return out;
}

Vector subgradient(const CostFunction& cf, const Instance& y) {
  require_dimension(cf, y);
  Vector g(cf.dimension());
  for (Eigen::Index f = 0; f < g.size(); ++f) {
    const double diff = y[f] - cf.target()[f];
    g[f] = diff > 0.0 ? cf.weights()[f] : (diff < 0.0 ? -cf.weights()[f] : 0.0);
  }
  return g;
}

Halfspace separating_halfspace(const CostFunction& cf, const Instance& y, double cost_level) {
  if (!(cf.cost(y) > cost_level)) {
    throw UsageError("separating_halfspace: point must lie strictly outside the cost ball");
  }
  Vector h = subgradient(cf, y);
  const double beta = h.dot(y);
  return Halfspace(std::move(h), beta);
}

}  // namespace evasion
