#pragma once

#include "evasion/cost_geometry.hpp"
#include "evasion/evasion_result.hpp"
#include "evasion/oracles.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace evasion {

/// Per-trial generator. Every stochastic choice of a search draws from one of
/// these, so a run is reproducible from its seed.
using Rng = std::mt19937_64;

/// SplitMix64 finalizer over (master, index); used to derive per-trial and
/// per-stage seeds.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

/// Constants for the sampler-driven search. The asymptotic orders are
/// N = O*(D), K = O*(D^3), T = O(D log R/r); these are desk-scale stand-ins.
struct SamplerParams {
  int samples = 10;          ///< N; each iteration draws 2N walks
  int walk_steps = 50;       ///< K hit-and-run steps per sample
  int iterations = 10;       ///< T unsuccessful iterations before giving up
  int warmup_rounds = 8;     ///< upper limit on warm-up rounds
  int pool_target = 10;      ///< N_target, size of the warm-up sample pool
  bool centered = true;      ///< centre walk directions on the pool mean
  double extent_tolerance = 1e-6;  ///< chord refinement, relative to the bounding radius
  int max_direction_retries = 64;
  double radius_ratio = 100.0;  ///< R / r, r an inner-radius estimate at x_minus

  /// N = max(10, 2D), K = max(50, 10D), T = ceil(D ln(R/r) / ln(3/2)), N_target = N.
  static SamplerParams desk_defaults(Eigen::Index dimension, double radius_ratio = 100.0);
};

/// The shrinking body: oracle-negative points inside the weighted L1 ball of
/// cost `radius` around `center`, cut by every accumulated halfspace.
class FeasibleRegion {
 public:
  FeasibleRegion(MembershipOracle& oracle, CostFunction cf, Instance center, double radius);

  const CostFunction& cost_function() const { return cf_; }
  const Instance& center() const { return center_; }
  double radius() const { return radius_; }
  const std::vector<CutRecord>& cuts() const { return cuts_; }
  MembershipOracle& oracle() const { return *oracle_; }

  /// Re-points the region at another oracle with the same labels (used to
  /// route queries through a recorder).
  void bind(MembershipOracle& oracle) { oracle_ = &oracle; }

  /// Ball and halfspace constraints only; never queries the oracle.
  bool contains_locally(const Instance& x) const;
  /// Local constraints first, then one oracle query.
  bool contains(const Instance& x) const;

  /// Largest step along +v (second) and -v (first) allowed by the local
  /// constraints alone, starting from a locally feasible x.
  std::pair<double, double> local_extent(const Instance& x, const Vector& v) const;

  void add_cut(CutRecord cut);

 private:
  MembershipOracle* oracle_;
  CostFunction cf_;
  Instance center_;
  double radius_;
  std::vector<CutRecord> cuts_;
};

/// Pool Q of samples believed roughly uniform in the current region.
struct SampleSet {
  std::vector<Instance> points;
  std::size_t target_size = 0;

  std::size_t size() const { return points.size(); }
};

/// Random direction from the pool, v = sum_j nu_j (y_j - mean) with
/// nu_j ~ N(0, 1); without centering the raw points are combined. Falls
/// back to an isotropic draw in cost-scaled coordinates when the pool is
/// degenerate.
class DirectionSampler {
 public:
  DirectionSampler(const SampleSet& pool, const CostFunction& cf, bool centered);
  Vector draw(Rng& rng) const;

 private:
  Eigen::MatrixXd spread_;  // D x n
  Vector inverse_weights_;
  bool degenerate_;
};

/// Extents (w1, w2) with x - w1 v and x + w2 v outside the region. Local
/// constraints are solved exactly; the oracle boundary is bracketed by the
/// local extent and refined by bisection to `tolerance` times the bounding
/// radius. Each oracle probe is charged to the region's oracle.
std::pair<double, double> ray_extent(const FeasibleRegion& region, const Instance& x, const Vector& v,
                                     double tolerance = 1e-6);

/// One hit-and-run move along a fixed direction. Returns nullopt when the
/// chord through x has collapsed.
std::optional<Instance> hit_and_run_step(const FeasibleRegion& region, const Instance& x, const Vector& v, Rng& rng,
                                         double tolerance = 1e-6);

/// K hit-and-run steps from x0 with directions drawn from the pool. x0 must
/// be in the region.
Instance hit_and_run(const FeasibleRegion& region, const SampleSet& pool, const Instance& x0, int steps, Rng& rng,
                     const SamplerParams& params = {});

struct IntersectOutcome {
  bool found = false;
  Instance point;  ///< lowest-cost sample with cost <= C when found
  FeasibleRegion region;
  SampleSet samples;
  int iterations = 0;
  std::vector<std::string> events;
};

/// Decides (with high probability) whether the region meets the cost-C ball,
/// cutting the region through sample centroids when it does not find a point.
IntersectOutcome intersect_search(FeasibleRegion region, SampleSet samples, const CostFunction& cf, double cost_level,
                                  const SamplerParams& params, Rng& rng);

struct WarmupResult {
  FeasibleRegion region;
  SampleSet samples;
  int rounds = 0;
};

/// Builds the initial region (negative class within weighted L1 cost 2R of
/// x_minus, R = 2 cost(x_minus)) and a pool of pool_target samples from it,
/// starting from jittered copies of x_minus and alternating hit-and-run
/// rounds until the pool covariance trace changes by less than 10%.
WarmupResult rounding_warmup(MembershipOracle& oracle, const CostFunction& cf, const Instance& x_minus,
                             const SamplerParams& params, Rng& rng);

struct SetSearchOptions {
  QueryTranscript::Mode transcript_mode = QueryTranscript::Mode::counts;
};

/// Multiplicative binary search over cost levels using intersect_search as
/// the feasibility test. Region and pool carry over from successful calls.
EvasionResult set_search(FeasibleRegion region, SampleSet samples, const CostFunction& cf, double c_minus,
                         double c_plus, double epsilon, const SamplerParams& params, Rng& rng,
                         const SetSearchOptions& options = {});

}  // namespace evasion
