#include "evasion/errors.hpp"
#include "evasion/harness.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace evasion {

std::string_view to_string(ClassifierKind kind) {
  switch (kind) {
    case ClassifierKind::halfspace: return "halfspace";
    case ClassifierKind::l1_ball: return "l1_ball";
    case ClassifierKind::covering_defender: return "covering_defender";
    case ClassifierKind::binary_defender: return "binary_defender";
    case ClassifierKind::l2_ball: return "l2_ball";
    case ClassifierKind::box: return "box";
    case ClassifierKind::polytope: return "polytope";
  }
  return "unknown";
}

OraclePtr build_oracle(const ClassifierSpec& spec, const CostFunction& cf) {
  switch (spec.kind) {
    case ClassifierKind::halfspace: return make_halfspace_oracle(spec.normal, spec.offset, spec.halfspace_positive);
    case ClassifierKind::l1_ball: return make_l1_ball_oracle(cf, spec.radius, spec.open);
    case ClassifierKind::covering_defender: return make_covering_defender(cf, spec.radius);
    case ClassifierKind::binary_defender: return make_binary_defender(cf, spec.defender_lower, spec.defender_upper);
    case ClassifierKind::l2_ball: return make_l2_ball_oracle(spec.center, spec.radius, spec.body_positive);
    case ClassifierKind::box: return make_box_oracle(spec.lo, spec.hi, spec.body_positive);
    case ClassifierKind::polytope: return make_polytope_oracle(spec.facets, spec.interior, spec.body_positive);
  }
  throw UsageError("build_oracle: unknown classifier kind");
}

ConvexSide declared_convex_side(const ClassifierSpec& spec) {
  switch (spec.kind) {
    case ClassifierKind::halfspace: return ConvexSide::both;
    case ClassifierKind::l1_ball:
    case ClassifierKind::covering_defender:
    case ClassifierKind::binary_defender: return ConvexSide::positive;
    case ClassifierKind::l2_ball:
    case ClassifierKind::box:
    case ClassifierKind::polytope:
      return spec.body_positive == BodySide::inside ? ConvexSide::positive : ConvexSide::negative;
  }
  return ConvexSide::unknown;
}

namespace {

[[noreturn]] void target_not_positive() {
  throw UsageError("analytic_mac: the cost target is not labeled positive by this classifier");
}

double positive_or_throw(double mac) {
  if (!(mac > 0.0) || !std::isfinite(mac)) target_not_positive();
  return mac;
}

// Weighted-L1 distance from a to the hyperplane n.x = beta is
// |beta - n.a| / max_d(|n_d| / c_d).
double dual_norm(const Vector& n, const Vector& weights) { return n.cwiseAbs().cwiseQuotient(weights).maxCoeff(); }

double l2_ball_exit_cost(const ClassifierSpec& spec, const CostFunction& cf) {
  // Cheapest axis exit from the ball.
  const Vector u = cf.target() - spec.center;
  const double slack = spec.radius * spec.radius - u.squaredNorm();
  if (!(slack > 0.0)) target_not_positive();
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index d = 0; d < u.size(); ++d) {
    const double root = std::sqrt(u[d] * u[d] + slack);
    best = std::min(best, cf.weights()[d] * (root - std::abs(u[d])));
  }
  return best;
}

double l2_ball_projection_cost(const ClassifierSpec& spec, const CostFunction& cf) {
  // Minimise sum c_d |x_d - a_d| over the Euclidean ball. Stationarity gives
  // x_d(t) = m_d + sign(a_d - m_d) min(|a_d - m_d|, c_d t); the radius of
  // x(t) grows with t, so bisect on t until it reaches the ball's surface.
  const Vector& a = cf.target();
  const Vector& m = spec.center;
  const Vector& c = cf.weights();
  if (!((a - m).norm() > spec.radius)) target_not_positive();
  const auto point = [&](double t) {
    Vector x(a.size());
    for (Eigen::Index d = 0; d < a.size(); ++d) {
      const double gap = a[d] - m[d];
      x[d] = m[d] + std::copysign(std::min(std::abs(gap), c[d] * t), gap);
    }
    return x;
  };
  double lo = 0.0;
  double hi = (a - m).cwiseAbs().cwiseQuotient(c).maxCoeff();
  for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if ((point(mid) - m).norm() <= spec.radius) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return cf.cost(point(lo));
}

// Exact weighted-L1 projection onto a polytope by enumerating every vertex of
// the arrangement of facet hyperplanes and coordinate hyperplanes through the
// target. On each orthant around the target the cost is linear, so the
// optimum is one of these vertices.
std::optional<double> polytope_projection_cost(const ClassifierSpec& spec, const CostFunction& cf) {
  const Eigen::Index dim = cf.dimension();
  const Vector& a = cf.target();
  if (std::all_of(spec.facets.begin(), spec.facets.end(), [&](const Halfspace& h) { return h.contains(a); })) {
    target_not_positive();
  }
  std::vector<Vector> normals;
  std::vector<double> offsets;
  for (const Halfspace& h : spec.facets) {
    normals.push_back(h.normal());
    offsets.push_back(h.offset());
  }
  for (Eigen::Index d = 0; d < dim; ++d) {
    Vector e = Vector::Zero(dim);
    e[d] = 1.0;
    normals.push_back(e);
    offsets.push_back(a[d]);
  }
  const auto planes = static_cast<Eigen::Index>(normals.size());

  double combinations = 1.0;
  for (Eigen::Index i = 0; i < dim; ++i) {
    combinations *= static_cast<double>(planes - i) / static_cast<double>(i + 1);
  }
  if (combinations > 2.0e5) return std::nullopt;

  double best = std::numeric_limits<double>::infinity();
  std::vector<Eigen::Index> pick(static_cast<std::size_t>(dim));
  Eigen::MatrixXd system(dim, dim);
  Vector rhs(dim);
  const std::function<void(Eigen::Index, Eigen::Index)> visit = [&](Eigen::Index slot, Eigen::Index from) {
    if (slot == dim) {
      for (Eigen::Index r = 0; r < dim; ++r) {
        system.row(r) = normals[static_cast<std::size_t>(pick[static_cast<std::size_t>(r)])].transpose();
        rhs[r] = offsets[static_cast<std::size_t>(pick[static_cast<std::size_t>(r)])];
      }
      Eigen::FullPivLU<Eigen::MatrixXd> lu(system);
      if (lu.rank() < dim) return;
      const Vector x = lu.solve(rhs);
      for (const Halfspace& h : spec.facets) {
        const double scale = std::max(1.0, std::abs(h.offset()) + h.normal().cwiseAbs().dot(x.cwiseAbs()));
        if (h.evaluate(x) > h.offset() + 1e-9 * scale) return;
      }
      best = std::min(best, cf.cost(x));
      return;
    }
    for (Eigen::Index i = from; i <= planes - (dim - slot); ++i) {
      pick[static_cast<std::size_t>(slot)] = i;
      visit(slot + 1, i + 1);
    }
  };
  visit(0, 0);
  if (!std::isfinite(best)) return std::nullopt;
  return positive_or_throw(best);
}

}  // namespace

std::optional<double> analytic_mac(const ClassifierSpec& spec, const CostFunction& cf) {
  const Vector& a = cf.target();
  switch (spec.kind) {
    case ClassifierKind::l1_ball:
    case ClassifierKind::covering_defender: return positive_or_throw(spec.radius);
    case ClassifierKind::binary_defender: return std::nullopt;
    case ClassifierKind::halfspace: {
      require_dimension(cf, spec.normal);
      const double margin = spec.offset - spec.normal.dot(a);
      const double signed_margin = spec.halfspace_positive == HalfspaceSide::below ? margin : -margin;
      return positive_or_throw(signed_margin / dual_norm(spec.normal, cf.weights()));
    }
    case ClassifierKind::box: {
      require_dimension(cf, spec.lo);
      if (spec.body_positive == BodySide::inside) {
        const Vector room = (spec.hi - a).cwiseMin(a - spec.lo);
        if (!(room.minCoeff() > 0.0)) target_not_positive();
        return room.cwiseProduct(cf.weights()).minCoeff();
      }
      const Vector outside = (spec.lo - a).cwiseMax(a - spec.hi).cwiseMax(0.0);
      return positive_or_throw(outside.dot(cf.weights()));
    }
    case ClassifierKind::l2_ball:
      require_dimension(cf, spec.center);
      return spec.body_positive == BodySide::inside ? l2_ball_exit_cost(spec, cf)
                                                    : l2_ball_projection_cost(spec, cf);
    case ClassifierKind::polytope: {
      require_dimension(cf, spec.interior);
      if (spec.body_positive == BodySide::outside) return polytope_projection_cost(spec, cf);
      double best = std::numeric_limits<double>::infinity();
      for (const Halfspace& h : spec.facets) {
        const double margin = h.offset() - h.evaluate(a);
        if (!(margin > 0.0)) target_not_positive();
        best = std::min(best, margin / dual_norm(h.normal(), cf.weights()));
      }
      return best;
    }
  }
  return std::nullopt;
}

}  // namespace evasion
