#include "evasion/errors.hpp"
#include "evasion/harness.hpp"
#include "evasion/multiline_search.hpp"

#include <algorithm>
#include <chrono>

namespace evasion {

bool TrialRecord::failed() const {
  for (const std::string& e : deviation_events) {
    if (e.rfind("error", 0) == 0 || e == "witness-positive") return true;
  }
  return false;
}

namespace {

// Repeated events are folded into "name (count)", in order of first appearance.
std::vector<std::string> fold_events(const std::vector<std::string>& events) {
  std::vector<std::pair<std::string, std::size_t>> counts;
  for (const std::string& e : events) {
    auto it = std::find_if(counts.begin(), counts.end(), [&](const auto& c) { return c.first == e; });
    if (it == counts.end()) {
      counts.emplace_back(e, 1);
    } else {
      ++it->second;
    }
  }
  std::vector<std::string> out;
  for (const auto& [name, n] : counts) out.push_back(n == 1 ? name : name + " (" + std::to_string(n) + ")");
  return out;
}

struct Outcome {
  EvasionResult result;
  std::size_t queries;
  OraclePtr after;  // the raw oracle in its post-run state
};

Outcome run_line_search(const ExperimentConfig& config, Algorithm algorithm) {
  CountedOracle counted = wrap_counting(build_oracle(config.classifier, config.cost), config.cost);
  const double lower = config.lower_bound();
  const double upper = config.upper_bound();
  EvasionResult result =
      algorithm == Algorithm::mls
          ? multiline_search(*counted.oracle, config.cost, default_direction_set(config.cost), config.x_minus, lower,
                             upper, config.epsilon)
          : k_step_multiline_search(*counted.oracle, config.cost, default_direction_set(config.cost), config.x_minus,
                                    lower, upper, config.epsilon, config.k_steps);
  return {std::move(result), counted.transcript->total(), counted.oracle->inner().clone()};
}

Outcome run_set_search(const ExperimentConfig& config, std::uint64_t seed) {
  CountedOracle counted = wrap_counting(build_oracle(config.classifier, config.cost), config.cost,
                                        QueryTranscript::Mode::counts);
  Rng rng(seed);
  WarmupResult warm = rounding_warmup(*counted.oracle, config.cost, config.x_minus, config.sampler, rng);
  EvasionResult result = set_search(std::move(warm.region), std::move(warm.samples), config.cost,
                                    config.upper_bound(), config.lower_bound(), config.epsilon, config.sampler, rng);
  for (const CutRecord& cut : result.trace.cuts) {
    for (const Instance& v : ball_vertices(config.cost, cut.proposal)) {
      if (!cut.halfspace.contains(v)) {
        result.trace.events.emplace_back("cut-excludes-ball-vertex");
        break;
      }
    }
  }
  return {std::move(result), counted.transcript->total(), counted.oracle->inner().clone()};
}

TrialRecord run_one(const ExperimentConfig& config, Algorithm algorithm, std::uint64_t seed,
                    const std::optional<double>& mac) {
  TrialRecord rec;
  rec.seed = seed;
  rec.algorithm = std::string(to_string(algorithm));
  rec.dimension = config.dimension;
  rec.epsilon = config.epsilon;
  rec.analytic_mac = mac;

  const auto started = std::chrono::steady_clock::now();
  try {
    Outcome out = algorithm == Algorithm::setsearch ? run_set_search(config, seed) : run_line_search(config, algorithm);
    rec.queries_used = out.queries;
    rec.deviation_events = fold_events(out.result.trace.events);
    const double cost = config.cost.cost(out.result.witness);
    rec.witness_cost = cost;
    const bool negative = out.after->query(out.result.witness) == Label::negative;
    if (!negative) rec.deviation_events.emplace_back("witness-positive");
    if (mac) {
      rec.optimality_ratio = cost / *mac;
      rec.success = negative && cost <= (1.0 + config.epsilon) * *mac + 1e-9;
    } else {
      rec.success = negative && out.result.converged(config.epsilon);
    }
  } catch (const std::exception& e) {
    rec.success = false;
    rec.deviation_events.push_back(std::string("error: ") + e.what());
  }
  if (config.record_timing) {
    rec.wall_time_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
  }
  return rec;
}

}  // namespace

std::vector<TrialRecord> run_trials(const ExperimentConfig& config) {
  validate_config(config);
  const std::optional<double> mac = analytic_mac(config.classifier, config.cost);
  std::vector<TrialRecord> records;
  for (int t = 0; t < config.trials; ++t) {
    const std::uint64_t seed = derive_seed(config.seed, static_cast<std::uint64_t>(t));
    if (config.algorithm == Algorithm::both) {
      records.push_back(run_one(config, Algorithm::mls, seed, mac));
      records.push_back(run_one(config, Algorithm::kmls, seed, mac));
    } else {
      records.push_back(run_one(config, config.algorithm, seed, mac));
    }
  }
  return records;
}

}  // namespace evasion
