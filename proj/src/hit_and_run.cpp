#include "evasion/convex_negative.hpp"

#include "evasion/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace evasion {

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

SamplerParams SamplerParams::desk_defaults(Eigen::Index dimension, double radius_ratio) {
  if (dimension < 1) throw UsageError("sampler params: dimension must be at least 1");
  if (!(radius_ratio > 1.0)) throw UsageError("sampler params: R/r must exceed 1");
  const int d = static_cast<int>(dimension);
  SamplerParams p;
  p.samples = std::max(10, 2 * d);
  p.walk_steps = std::max(50, 10 * d);
  // each centroid cut keeps at most 2/3 of the volume, and the volume ratio
  // to overcome is (R/r)^D
  p.iterations = static_cast<int>(std::ceil(static_cast<double>(d) * std::log(radius_ratio) / std::log(1.5)));
  p.pool_target = p.samples;
  p.radius_ratio = radius_ratio;
  return p;
}

FeasibleRegion::FeasibleRegion(MembershipOracle& oracle, CostFunction cf, Instance center, double radius)
    : oracle_(&oracle), cf_(std::move(cf)), center_(std::move(center)), radius_(radius) {
  require_dimension(cf_, center_);
  if (!(radius_ > 0.0) || !std::isfinite(radius_)) throw UsageError("feasible region: radius must be positive");
}

bool FeasibleRegion::contains_locally(const Instance& x) const {
  if (cf_.distance(x, center_) > radius_) return false;
  return std::all_of(cuts_.begin(), cuts_.end(), [&](const CutRecord& c) { return c.halfspace.contains(x); });
}

bool FeasibleRegion::contains(const Instance& x) const {
  return contains_locally(x) && oracle_->query(x) == Label::negative;
}

namespace {

// Largest t >= 0 with sum_d c_d |u_d + t v_d| <= rho, for u inside the ball.
double ball_step(const Vector& weights, const Vector& u, const Vector& v, double rho) {
  double g = weights.dot(u.cwiseAbs());
  if (g > rho) return 0.0;
  double slope = 0.0;
  std::vector<std::pair<double, double>> breaks;  // (t, slope increase)
  for (Eigen::Index d = 0; d < u.size(); ++d) {
    if (v[d] == 0.0) continue;
    const double cv = weights[d] * std::abs(v[d]);
    const double t = -u[d] / v[d];
    if (t > 0.0) {
      slope -= cv;
      breaks.emplace_back(t, 2.0 * cv);
    } else {
      slope += cv;
    }
  }
  std::sort(breaks.begin(), breaks.end());
  double t = 0.0;
  for (const auto& [tb, jump] : breaks) {
    const double gb = g + slope * (tb - t);
    if (gb >= rho) return t + (rho - g) / slope;
    g = gb;
    t = tb;
    slope += jump;
  }
  if (!(slope > 0.0)) return std::numeric_limits<double>::infinity();
  return t + (rho - g) / slope;
}

}  // namespace

std::pair<double, double> FeasibleRegion::local_extent(const Instance& x, const Vector& v) const {
  const Vector u = x - center_;
  double forward = ball_step(cf_.weights(), u, v, radius_);
  double backward = ball_step(cf_.weights(), u, -v, radius_);
  for (const CutRecord& c : cuts_) {
    const double slope = c.halfspace.normal().dot(v);
    const double slack = std::max(0.0, c.halfspace.offset() - c.halfspace.evaluate(x));
    if (slope > 0.0) forward = std::min(forward, slack / slope);
    if (slope < 0.0) backward = std::min(backward, slack / -slope);
  }
  return {backward, forward};
}

void FeasibleRegion::add_cut(CutRecord cut) {
  require_dimension(cf_, cut.halfspace.normal());
  cuts_.push_back(std::move(cut));
}

DirectionSampler::DirectionSampler(const SampleSet& pool, const CostFunction& cf, bool centered)
    : inverse_weights_(cf.weights().cwiseInverse()), degenerate_(pool.size() < 2) {
  const Eigen::Index dim = cf.dimension();
  spread_.resize(dim, static_cast<Eigen::Index>(pool.size()));
  for (std::size_t j = 0; j < pool.size(); ++j) spread_.col(static_cast<Eigen::Index>(j)) = pool.points[j];
  if (centered && !degenerate_) spread_.colwise() -= spread_.rowwise().mean();
  if (!degenerate_) degenerate_ = spread_.cwiseAbs().maxCoeff() == 0.0;
}

Vector DirectionSampler::draw(Rng& rng) const {
  std::normal_distribution<double> normal(0.0, 1.0);
  const Eigen::Index n = degenerate_ ? inverse_weights_.size() : spread_.cols();
  Vector nu(n);
  for (Eigen::Index j = 0; j < n; ++j) nu[j] = normal(rng);
  if (degenerate_) return nu.cwiseProduct(inverse_weights_);
  return spread_ * nu;
}

namespace {

// Bracketed chord through x: points at -back_in and +forward_in are known to
// be in the region, points at -back_out and +forward_out are outside it (or
// on the local boundary).
struct Chord {
  double back_in = 0.0;
  double back_out = 0.0;
  double forward_in = 0.0;
  double forward_out = 0.0;
};

double refine_side(const FeasibleRegion& region, const Instance& x, const Vector& dir, double limit,
                   double tolerance_steps, double& known_inside) {
  known_inside = 0.0;
  if (!(limit > 0.0)) return 0.0;
  if (!std::isfinite(limit)) throw InternalError("ray_extent: unbounded chord");
  if (region.oracle().query(x + limit * dir) == Label::negative) {
    known_inside = limit;
    return limit;
  }
  double lo = 0.0;
  double hi = limit;
  while (hi - lo > tolerance_steps) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (region.oracle().query(x + mid * dir) == Label::negative) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  known_inside = lo;
  return hi;
}

Chord find_chord(const FeasibleRegion& region, const Instance& x, const Vector& v, double tolerance) {
  if (v.size() != x.size() || v.isZero(0.0)) throw UsageError("ray_extent: direction must be nonzero");
  const double length = region.cost_function().weights().dot(v.cwiseAbs());
  const double tolerance_steps = tolerance * region.radius() / length;
  const auto [back_limit, forward_limit] = region.local_extent(x, v);
  Chord chord;
  chord.forward_out = refine_side(region, x, v, forward_limit, tolerance_steps, chord.forward_in);
  chord.back_out = refine_side(region, x, -v, back_limit, tolerance_steps, chord.back_in);
  return chord;
}

}  // namespace

std::pair<double, double> ray_extent(const FeasibleRegion& region, const Instance& x, const Vector& v,
                                     double tolerance) {
  const Chord chord = find_chord(region, x, v, tolerance);
  return {chord.back_out, chord.forward_out};
}

std::optional<Instance> hit_and_run_step(const FeasibleRegion& region, const Instance& x, const Vector& v, Rng& rng,
                                         double tolerance) {
  Chord chord = find_chord(region, x, v, tolerance);
  const double length = region.cost_function().weights().dot(v.cwiseAbs());
  if ((chord.back_out + chord.forward_out) * length <= 1e-12 * region.radius()) return std::nullopt;

  // Uniform on the chord; anything between the two known-inside points is in
  // the region by convexity and needs no query. Outside that, rejection with
  // shrinking of the rejected side.
  double lower = -chord.back_out;
  double upper = chord.forward_out;
  for (int attempt = 0; attempt < 200; ++attempt) {
    std::uniform_real_distribution<double> unif(lower, upper);
    const double omega = unif(rng);
    Instance y = x + omega * v;
    if (omega >= -chord.back_in && omega <= chord.forward_in) return y;
    if (region.contains(y)) return y;
    if (omega < 0.0) {
      lower = omega;
    } else {
      upper = omega;
    }
  }
  return x;
}

Instance hit_and_run(const FeasibleRegion& region, const SampleSet& pool, const Instance& x0, int steps, Rng& rng,
                     const SamplerParams& params) {
  if (steps < 1) throw UsageError("hit_and_run: step count must be at least 1");
  if (!region.contains(x0)) throw UsageError("hit_and_run: starting point is outside the region");
  const DirectionSampler directions(pool, region.cost_function(), params.centered);
  Instance x = x0;
  for (int i = 0; i < steps; ++i) {
    bool moved = false;
    for (int retry = 0; retry < params.max_direction_retries && !moved; ++retry) {
      const Vector v = directions.draw(rng);
      if (v.isZero(0.0)) continue;
      if (auto next = hit_and_run_step(region, x, v, rng, params.extent_tolerance)) {
        x = std::move(*next);
        moved = true;
      }
    }
    if (!moved) throw InternalError("hit_and_run: chord collapsed for every retried direction");
  }
  return x;
}

}  // namespace evasion
