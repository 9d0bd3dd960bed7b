#include "evasion/multiline_search.hpp"

#include "evasion/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace evasion {

DirectionSet::DirectionSet(const CostFunction& cf, std::vector<Vector> directions)
    : directions_(std::move(directions)), active_(directions_.size(), true) {
  if (directions_.empty()) throw UsageError("direction set: at least one direction required");
  for (const Vector& e : directions_) {
    require_dimension(cf, e);
    const double unit = cf.weights().dot(e.cwiseAbs());
    if (std::abs(unit - 1.0) > 1e-9) throw UsageError("direction set: direction is not of unit cost");
  }
}

std::size_t DirectionSet::active_count() const {
  return static_cast<std::size_t>(std::count(active_.begin(), active_.end(), true));
}

std::vector<std::size_t> DirectionSet::active_indices() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < active_.size(); ++i) {
    if (active_[i]) out.push_back(i);
  }
  return out;
}

void DirectionSet::prune(std::size_t i) { active_.at(i) = false; }

DirectionSet default_direction_set(const CostFunction& cf) { return DirectionSet(cf, unit_cost_directions(cf)); }

namespace {

struct SearchStart {
  SearchBounds bounds;
  std::int64_t steps;  // L for the starting bracket
};

SearchStart prepare(MembershipOracle& oracle, const CostFunction& cf, const Instance& x_minus, double c_plus,
                    double c_minus, double epsilon, const LineSearchOptions& options) {
  require_dimension(cf, x_minus);
  if (oracle.dimension() != cf.dimension()) throw UsageError("search: oracle and cost function dimensions differ");
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw UsageError("search: epsilon must be positive");
  if (!(c_plus > 0.0)) throw UsageError("search: C+ must be strictly positive");
  const double start_cost = cf.cost(x_minus);
  if (start_cost > c_minus * (1.0 + 1e-9)) {
    throw UsageError("search: cost of x_minus exceeds the supplied upper bound C-");
  }
  c_minus = std::min(c_minus, start_cost);
  if (!(c_plus <= c_minus)) throw UsageError("search: require C+ <= cost(x_minus)");
  if (options.verify_start && oracle.clone()->query(x_minus) != Label::negative) {
    throw PreconditionViolation("search: x_minus is labeled positive by the oracle");
  }
  return {SearchBounds(c_plus, c_minus), steps_required_multiplicative(c_plus, c_minus, epsilon)};
}

std::size_t iteration_cap(std::int64_t steps, std::size_t directions) {
  return static_cast<std::size_t>(steps) + directions + 64;
}

}  // namespace

EvasionResult multiline_search(MembershipOracle& oracle, const CostFunction& cf, DirectionSet directions,
                               const Instance& x_minus, double c_plus, double c_minus, double epsilon,
                               const LineSearchOptions& options) {
  auto [bounds, steps] = prepare(oracle, cf, x_minus, c_plus, c_minus, epsilon, options);
  auto transcript = std::make_shared<QueryTranscript>(cf, options.transcript_mode);
  RecordingOracle ask(oracle, transcript);

  EvasionResult result{x_minus, bounds, 0, transcript, {}};
  SearchTrace& trace = result.trace;
  trace.bounds.push_back(bounds);

  const std::size_t cap = iteration_cap(steps, directions.size());
  std::size_t iterations = 0;
  std::vector<std::size_t> answered_positive;
  while (!terminated(bounds, epsilon)) {
    if (++iterations > cap) throw InternalError("multiline_search: bound updates failed to converge");
    const double level = propose(bounds);
    if (proposal_stalled(bounds, level)) {
      trace.events.emplace_back("stalled-proposal");
      break;
    }

    answered_positive.clear();
    bool found_negative = false;
    for (std::size_t i : directions.active_indices()) {
      const Instance probe = cf.target() + level * directions.direction(i);
      if (ask.query(probe) == Label::negative) {
        result.witness = probe;
        found_negative = true;
        break;
      }
      answered_positive.push_back(i);
    }

    if (found_negative) {
      for (std::size_t i : answered_positive) {
        directions.prune(i);
        trace.prunes.push_back({i, level});
      }
      bounds.lower_upper(level);
    } else {
      bounds.raise_lower(level);
    }
    trace.bounds.push_back(bounds);
  }

  result.final_bounds = bounds;
  result.queries_used = transcript->total();
  return result;
}

int auto_step_count(double c_plus, double c_minus, double epsilon) {
  const std::int64_t steps = steps_required_multiplicative(c_plus, c_minus, epsilon);
  return std::max(1, static_cast<int>(std::ceil(std::sqrt(static_cast<double>(steps)))));
}

EvasionResult k_step_multiline_search(MembershipOracle& oracle, const CostFunction& cf, DirectionSet directions,
                                      const Instance& x_minus, double c_plus, double c_minus, double epsilon,
                                      std::optional<int> steps, const LineSearchOptions& options) {
  auto [bounds, total_steps] = prepare(oracle, cf, x_minus, c_plus, c_minus, epsilon, options);
  if (steps && *steps < 1) throw UsageError("k_step_multiline_search: K must be at least 1");
  const int k = steps ? *steps : auto_step_count(bounds.lower(), bounds.upper(), epsilon);

  auto transcript = std::make_shared<QueryTranscript>(cf, options.transcript_mode);
  RecordingOracle ask(oracle, transcript);

  EvasionResult result{x_minus, bounds, 0, transcript, {}};
  SearchTrace& trace = result.trace;
  trace.bounds.push_back(bounds);

  // Direction choice: the direction that most recently answered negative while
  // it is still active, otherwise the next active direction in cyclic order.
  std::optional<std::size_t> recent_negative;
  std::size_t cursor = directions.size() - 1;
  const auto choose = [&]() {
    if (recent_negative && directions.is_active(*recent_negative)) return *recent_negative;
    for (std::size_t step = 1; step <= directions.size(); ++step) {
      const std::size_t i = (cursor + step) % directions.size();
      if (directions.is_active(i)) return i;
    }
    throw InternalError("k_step_multiline_search: no active directions left");
  };

  const std::size_t cap = iteration_cap(total_steps, directions.size());
  std::size_t iterations = 0;
  std::vector<std::size_t> answered_positive;
  while (!terminated(bounds, epsilon)) {
    if (++iterations > cap) throw InternalError("k_step_multiline_search: bound updates failed to converge");
    const std::size_t e = choose();
    cursor = e;
    const Vector& dir = directions.direction(e);
    const std::size_t queries_before = transcript->total();

    KStepPhase phase{e, bounds.lower(), bounds.upper(), bounds.lower(), bounds.upper(), k, 0, true, 0};
    SearchBounds candidate = bounds;
    bool e_positive_at_candidate = false;
    for (int step = 0; step < k; ++step) {
      const double level = propose(candidate);
      if (proposal_stalled(candidate, level)) {
        trace.events.emplace_back("stalled-proposal");
        break;
      }
      const Instance probe = cf.target() + level * dir;
      if (ask.query(probe) == Label::positive) {
        candidate.raise_lower(level);
        e_positive_at_candidate = true;
      } else {
        candidate.lower_upper(level);
        result.witness = probe;
        recent_negative = e;
      }
      ++phase.steps_executed;
    }
    phase.candidate_lower = candidate.lower();
    phase.candidate_upper = candidate.upper();

    answered_positive.clear();
    bool found_negative = false;
    Instance sweep_witness;
    for (std::size_t i : directions.active_indices()) {
      if (i == e) continue;
      const Instance probe = cf.target() + candidate.lower() * directions.direction(i);
      if (ask.query(probe) == Label::negative) {
        sweep_witness = probe;
        found_negative = true;
        recent_negative = i;
        break;
      }
      answered_positive.push_back(i);
    }

    bounds.lower_upper(candidate.upper());
    if (!found_negative) {
      bounds.raise_lower(candidate.lower());
    } else {
      phase.verified = false;
      result.witness = sweep_witness;
      bounds.lower_upper(candidate.lower());
      if (e_positive_at_candidate) answered_positive.push_back(e);
      for (std::size_t i : answered_positive) {
        directions.prune(i);
        trace.prunes.push_back({i, candidate.lower()});
      }
    }
    phase.queries = transcript->total() - queries_before;
    trace.phases.push_back(phase);
    trace.bounds.push_back(bounds);
    if (bounds.lower() == phase.start_lower && bounds.upper() == phase.start_upper) {
      trace.events.emplace_back("no-progress");
      break;
    }
  }

  result.final_bounds = bounds;
  result.queries_used = transcript->total();
  return result;
}

}  // namespace evasion
