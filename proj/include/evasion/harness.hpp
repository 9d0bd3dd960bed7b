#pragma once

#include "evasion/convex_negative.hpp"
#include "evasion/cost_geometry.hpp"
#include "evasion/oracles.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace evasion {

enum class ClassifierKind { halfspace, l1_ball, covering_defender, binary_defender, l2_ball, box, polytope };

std::string_view to_string(ClassifierKind kind);

/// Parameters for one synthetic classifier. Only the fields relevant to
/// `kind` are meaningful.
struct ClassifierSpec {
  ClassifierKind kind = ClassifierKind::covering_defender;
  // halfspace
  Vector normal;
  double offset = 0.0;
  HalfspaceSide halfspace_positive = HalfspaceSide::below;
  // l1_ball, covering_defender, l2_ball
  double radius = 1.0;
  bool open = true;
  // binary_defender
  double defender_lower = 1.0;
  double defender_upper = 2.0;
  // l2_ball
  Instance center;
  // box
  Instance lo;
  Instance hi;
  // polytope
  std::vector<Halfspace> facets;
  Instance interior;
  // l2_ball, box, polytope
  BodySide body_positive = BodySide::inside;
};

OraclePtr build_oracle(const ClassifierSpec& spec, const CostFunction& cf);
ConvexSide declared_convex_side(const ClassifierSpec& spec);

/// Minimal adversarial cost for the synthetic kinds, or nullopt when no
/// closed form is available (the adaptive defender, very large polytopes).
/// Throws UsageError when the cost target is not positive for the classifier.
std::optional<double> analytic_mac(const ClassifierSpec& spec, const CostFunction& cf);

enum class Algorithm { mls, kmls, setsearch, both };
enum class ReportFormat { jsonl, csv };

std::string_view to_string(Algorithm algorithm);
std::string_view to_string(ReportFormat format);
Algorithm parse_algorithm(std::string_view text);
ReportFormat parse_format(std::string_view text);

struct ExperimentConfig {
  Eigen::Index dimension = 0;
  ClassifierSpec classifier;
  CostFunction cost = CostFunction::uniform(Instance::Zero(1));
  Algorithm algorithm = Algorithm::kmls;
  double epsilon = 0.1;
  Instance x_minus;
  std::optional<double> c_plus;   ///< empty: cost(x_minus) * auto_lower_ratio
  std::optional<double> c_minus;  ///< empty: cost(x_minus)
  double auto_lower_ratio = 1.0 / 1024.0;
  std::optional<int> k_steps;  ///< empty: ceil(sqrt(L))
  int trials = 1;
  std::uint64_t seed = 0;
  SamplerParams sampler;
  std::optional<std::string> output_path;
  ReportFormat format = ReportFormat::jsonl;
  bool record_timing = true;

  double lower_bound() const;
  double upper_bound() const;
};

/// Command-line values that take precedence over the config file.
struct ConfigOverrides {
  std::optional<std::string> algorithm;
  std::optional<Eigen::Index> dimension;
  std::optional<double> epsilon;
  std::optional<int> trials;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> output_path;
  std::optional<std::string> format;
};

/// Parses and validates. Every failure is a ConfigError.
ExperimentConfig parse_config(nlohmann::json doc, const ConfigOverrides& overrides = {});
ExperimentConfig load_config(const std::string& path, const ConfigOverrides& overrides = {});

/// Semantic checks beyond parsing (convexity side vs. algorithm, x_minus
/// labeled negative, bounds ordering). Throws ConfigError.
void validate_config(const ExperimentConfig& config);

struct TrialRecord {
  std::uint64_t seed = 0;
  std::string algorithm;
  Eigen::Index dimension = 0;
  double epsilon = 0.0;
  std::size_t queries_used = 0;
  std::optional<double> witness_cost;
  std::optional<double> analytic_mac;
  std::optional<double> optimality_ratio;
  bool success = false;
  double wall_time_ms = 0.0;
  std::vector<std::string> deviation_events;

  /// True when the trial raised or its witness failed re-validation.
  bool failed() const;
};

/// Per-trial seeds are derive_seed(config.seed, trial index).
std::vector<TrialRecord> run_trials(const ExperimentConfig& config);

struct ReportSummary {
  std::size_t records = 0;
  double median_queries = 0.0;
  double success_rate = 0.0;
  std::optional<double> max_optimality_ratio;
};

ReportSummary summarize(const std::vector<TrialRecord>& records);

/// Floats use 12 significant digits; the success rate uses 3 decimals.
void emit_report(const std::vector<TrialRecord>& records, ReportFormat format, std::ostream& out);
std::string emit_report(const std::vector<TrialRecord>& records, ReportFormat format);
/// Writes to `path`; EnvironmentError when the file cannot be written.
void write_report(const std::vector<TrialRecord>& records, ReportFormat format, const std::string& path);

std::vector<TrialRecord> parse_report(const std::string& text, ReportFormat format);

}  // namespace evasion
