#include "evasion/convex_negative.hpp"

#include "evasion/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace evasion {

namespace {

std::size_t minimum_pool(Eigen::Index dimension) { return static_cast<std::size_t>(std::max<Eigen::Index>(2, dimension + 1)); }

const Instance& pick(const std::vector<Instance>& pool, Rng& rng) {
  std::uniform_int_distribution<std::size_t> index(0, pool.size() - 1);
  return pool[index(rng)];
}

// Tops the pool back up to its target with walks that start from `seed`
// and, afterwards, from members already in the pool.
void replenish(const FeasibleRegion& region, SampleSet& samples, const std::vector<Instance>& helpers,
               const Instance& seed, const SamplerParams& params, Rng& rng) {
  SampleSet directions{samples.points, 0};
  for (const Instance& h : helpers) directions.points.push_back(h);
  std::vector<Instance> starters = samples.points;
  starters.push_back(seed);
  const std::size_t target = std::max(samples.target_size, minimum_pool(region.cost_function().dimension()));
  while (samples.size() < target) {
    Instance x = hit_and_run(region, directions, pick(starters, rng), params.walk_steps, rng, params);
    samples.points.push_back(x);
    directions.points.push_back(x);
    starters.push_back(std::move(x));
  }
}

}  // namespace

IntersectOutcome intersect_search(FeasibleRegion region, SampleSet samples, const CostFunction& cf, double cost_level,
                                  const SamplerParams& params, Rng& rng) {
  if (!(cost_level > 0.0)) throw UsageError("intersect_search: cost level must be positive");
  if (params.samples < 1 || params.iterations < 1 || params.walk_steps < 1) {
    throw UsageError("intersect_search: N, T and K must be positive");
  }
  if (samples.points.empty()) throw UsageError("intersect_search: sample pool is empty");

  IntersectOutcome out{false, Instance(), std::move(region), std::move(samples), 0, {}};
  const auto n = static_cast<std::size_t>(params.samples);
  std::vector<Instance> drawn;
  drawn.reserve(2 * n);

  for (int s = 0; s < params.iterations; ++s) {
    out.iterations = s + 1;
    drawn.clear();
    for (std::size_t j = 0; j < 2 * n; ++j) {
      drawn.push_back(hit_and_run(out.region, out.samples, pick(out.samples.points, rng), params.walk_steps, rng,
                                  params));
    }

    double best = std::numeric_limits<double>::infinity();
    for (const Instance& x : drawn) {
      const double a = cf.cost(x);
      if (a <= cost_level && a < best) {
        best = a;
        out.point = x;
      }
    }
    if (out.found = std::isfinite(best); out.found) return out;

    Instance centroid = Instance::Zero(cf.dimension());
    for (std::size_t j = 0; j < n; ++j) centroid += drawn[j];
    centroid /= static_cast<double>(n);

    const double centroid_cost = cf.cost(centroid);
    if (centroid_cost <= cost_level) {
      // The centroid of region points is itself in the region when the
      // negative class is convex.
      if (out.region.contains(centroid)) {
        out.point = std::move(centroid);
        out.found = true;
        out.events.emplace_back("centroid-in-ball");
        return out;
      }
      out.events.emplace_back("centroid-outside-region");
      continue;
    }

    Halfspace cut = separating_halfspace(cf, centroid, cost_level);
    out.region.add_cut({cut, cost_level, centroid_cost});

    SampleSet kept{{}, out.samples.target_size};
    std::vector<Instance> helpers;
    for (std::size_t j = 0; j < 2 * n; ++j) {
      if (!cut.contains(drawn[j])) continue;
      if (j >= n) {
        kept.points.push_back(drawn[j]);
      } else {
        helpers.push_back(drawn[j]);
      }
    }
    out.samples = std::move(kept);

    if (out.samples.size() < minimum_pool(cf.dimension())) {
      Instance seed;
      if (!out.samples.points.empty()) {
        seed = out.samples.points.back();
      } else if (!helpers.empty()) {
        seed = helpers.back();
      } else if (out.region.contains(centroid)) {
        seed = centroid;
      } else {
        throw InternalError("intersect_search: no feasible point survived the cut");
      }
      replenish(out.region, out.samples, helpers, seed, params, rng);
      out.events.emplace_back("pool-replenished");
    }
  }
  return out;
}

WarmupResult rounding_warmup(MembershipOracle& oracle, const CostFunction& cf, const Instance& x_minus,
                             const SamplerParams& params, Rng& rng) {
  require_dimension(cf, x_minus);
  if (params.pool_target < 2 || params.warmup_rounds < 1 || params.walk_steps < 1) {
    throw UsageError("rounding_warmup: need pool_target >= 2 and positive rounds/steps");
  }
  const double start_cost = cf.cost(x_minus);
  if (!(start_cost > 0.0)) throw UsageError("rounding_warmup: x_minus coincides with the cost target");
  const double big_r = 2.0 * start_cost;
  FeasibleRegion region(oracle, cf, x_minus, 2.0 * big_r);
  if (!region.contains(x_minus)) throw UsageError("rounding_warmup: x_minus is not labeled negative");

  const Eigen::Index dim = cf.dimension();
  const double inner = big_r / params.radius_ratio;
  std::normal_distribution<double> normal(0.0, 1.0);
  SampleSet pool{{}, static_cast<std::size_t>(params.pool_target)};
  for (int j = 0; j < params.pool_target; ++j) {
    Instance x = x_minus;
    for (Eigen::Index d = 0; d < dim; ++d) x[d] += normal(rng) * inner / (2.0 * static_cast<double>(dim) * cf.weights()[d]);
    pool.points.push_back(region.contains(x) ? x : x_minus);
  }

  const auto spread = [&](const SampleSet& q) {
    Instance mean = Instance::Zero(dim);
    for (const Instance& x : q.points) mean += x;
    mean /= static_cast<double>(q.size());
    double trace = 0.0;
    for (const Instance& x : q.points) trace += (x - mean).cwiseProduct(cf.weights()).squaredNorm();
    return trace / static_cast<double>(q.size());
  };

  WarmupResult out{region, std::move(pool), 0};
  double previous = spread(out.samples);
  for (int round = 1; round <= params.warmup_rounds; ++round) {
    SampleSet next{{}, out.samples.target_size};
    for (const Instance& x : out.samples.points) {
      next.points.push_back(hit_and_run(out.region, out.samples, x, params.walk_steps, rng, params));
    }
    out.samples = std::move(next);
    out.rounds = round;
    const double current = spread(out.samples);
    if (round >= 2 && std::abs(current - previous) < 0.1 * previous) break;
    previous = current;
  }
  return out;
}

EvasionResult set_search(FeasibleRegion region, SampleSet samples, const CostFunction& cf, double c_minus,
                         double c_plus, double epsilon, const SamplerParams& params, Rng& rng,
                         const SetSearchOptions& options) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw UsageError("set_search: epsilon must be positive");
  if (!(c_plus > 0.0)) throw UsageError("set_search: C+ must be strictly positive");
  const Instance start = region.center();
  const double start_cost = cf.cost(start);
  if (start_cost > c_minus * (1.0 + 1e-9)) throw UsageError("set_search: cost of x_minus exceeds C-");
  c_minus = std::min(c_minus, start_cost);
  if (!(c_plus <= c_minus)) throw UsageError("set_search: require C+ <= cost(x_minus)");

  auto transcript = std::make_shared<QueryTranscript>(cf, options.transcript_mode);
  RecordingOracle recorder(region.oracle(), transcript);
  region.bind(recorder);

  SearchBounds bounds(c_plus, c_minus);
  EvasionResult result{start, bounds, 0, transcript, {}};
  SearchTrace& trace = result.trace;
  trace.bounds.push_back(bounds);
  const auto collect = [&](const IntersectOutcome& o, std::size_t from) {
    const auto& cuts = o.region.cuts();
    trace.cuts.insert(trace.cuts.end(), cuts.begin() + static_cast<std::ptrdiff_t>(from), cuts.end());
    trace.events.insert(trace.events.end(), o.events.begin(), o.events.end());
  };

  const std::size_t cap = static_cast<std::size_t>(steps_required_multiplicative(c_plus, c_minus, epsilon)) + 256;
  std::size_t iterations = 0;
  while (!terminated(bounds, epsilon)) {
    if (++iterations > cap) throw InternalError("set_search: bound updates failed to converge");
    const double level = propose(bounds);
    if (proposal_stalled(bounds, level)) {
      trace.events.emplace_back("stalled-proposal");
      break;
    }
    const std::size_t cuts_before = region.cuts().size();
    IntersectOutcome outcome = intersect_search(region, samples, cf, level, params, rng);
    collect(outcome, cuts_before);
    if (outcome.found) {
      const double found_cost = cf.cost(outcome.point);
      result.witness = std::move(outcome.point);
      if (found_cost < bounds.lower()) {
        // An earlier "no intersection" answer was a false negative.
        trace.events.emplace_back("lower-bound-contradicted");
        bounds = SearchBounds(found_cost, found_cost);
      } else {
        bounds.lower_upper(found_cost);
      }
      region = std::move(outcome.region);
      samples = std::move(outcome.samples);
    } else {
      bounds.raise_lower(level);
    }
    trace.bounds.push_back(bounds);
  }

  result.final_bounds = bounds;
  result.queries_used = transcript->total();
  return result;
}

}  // namespace evasion
