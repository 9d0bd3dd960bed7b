#include "evasion/errors.hpp"
#include "evasion/harness.hpp"
#include "evasion/multiline_search.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace evasion {

using nlohmann::json;

std::string_view to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::mls: return "mls";
    case Algorithm::kmls: return "kmls";
    case Algorithm::setsearch: return "setsearch";
    case Algorithm::both: return "both";
  }
  return "unknown";
}

std::string_view to_string(ReportFormat format) { return format == ReportFormat::csv ? "csv" : "jsonl"; }

Algorithm parse_algorithm(std::string_view text) {
  if (text == "mls") return Algorithm::mls;
  if (text == "kmls") return Algorithm::kmls;
  if (text == "setsearch") return Algorithm::setsearch;
  if (text == "both") return Algorithm::both;
  throw ConfigError("unknown algorithm '" + std::string(text) + "' (expected mls, kmls, setsearch or both)");
}

ReportFormat parse_format(std::string_view text) {
  if (text == "jsonl") return ReportFormat::jsonl;
  if (text == "csv") return ReportFormat::csv;
  throw ConfigError("unknown format '" + std::string(text) + "' (expected jsonl or csv)");
}

double ExperimentConfig::upper_bound() const {
  const double start = cost.cost(x_minus);
  return c_minus ? std::min(*c_minus, start) : start;
}

double ExperimentConfig::lower_bound() const {
  return c_plus ? *c_plus : cost.cost(x_minus) * auto_lower_ratio;
}

namespace {

const json& field(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) throw ConfigError(where + ": missing required key '" + key + "'");
  return obj.at(key);
}

double number(const json& v, const std::string& where) {
  if (!v.is_number()) throw ConfigError(where + ": expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError(where + ": expected a finite number");
  return x;
}

int integer(const json& v, const std::string& where) {
  if (!v.is_number_integer()) throw ConfigError(where + ": expected an integer");
  return v.get<int>();
}

std::string text(const json& v, const std::string& where) {
  if (!v.is_string()) throw ConfigError(where + ": expected a string");
  return v.get<std::string>();
}

// A vector is either an array of length D or a scalar broadcast to D.
Vector vector_of(const json& v, Eigen::Index dim, const std::string& where) {
  if (v.is_number()) return Vector::Constant(dim, number(v, where));
  if (!v.is_array()) throw ConfigError(where + ": expected an array or a number");
  if (static_cast<Eigen::Index>(v.size()) != dim) {
    throw ConfigError(where + ": has " + std::to_string(v.size()) + " entries, dimension is " + std::to_string(dim));
  }
  Vector out(dim);
  for (Eigen::Index d = 0; d < dim; ++d) out[d] = number(v[static_cast<std::size_t>(d)], where);
  return out;
}

BodySide body_side(const json& obj, const std::string& where) {
  const std::string side = obj.contains("positive_side") ? text(obj.at("positive_side"), where) : "inside";
  if (side == "inside") return BodySide::inside;
  if (side == "outside") return BodySide::outside;
  throw ConfigError(where + ".positive_side: expected 'inside' or 'outside'");
}

Eigen::Index infer_dimension(const json& doc) {
  if (doc.contains("dimension")) {
    const int d = integer(doc.at("dimension"), "dimension");
    if (d < 1) throw ConfigError("dimension: must be at least 1");
    return d;
  }
  for (const char* key : {"target", "weights"}) {
    if (doc.contains("cost") && doc.at("cost").contains(key) && doc.at("cost").at(key).is_array()) {
      return static_cast<Eigen::Index>(doc.at("cost").at(key).size());
    }
  }
  if (doc.contains("x_minus") && doc.at("x_minus").is_array()) return static_cast<Eigen::Index>(doc.at("x_minus").size());
  throw ConfigError("dimension: not given and cannot be inferred from any array");
}

ClassifierSpec parse_classifier(const json& obj, Eigen::Index dim) {
  const std::string where = "classifier";
  const std::string kind = text(field(obj, "kind", where), where + ".kind");
  ClassifierSpec spec;
  if (kind == "halfspace") {
    spec.kind = ClassifierKind::halfspace;
    spec.normal = vector_of(field(obj, "normal", where), dim, where + ".normal");
    spec.offset = number(field(obj, "offset", where), where + ".offset");
    const std::string side = obj.contains("positive_side") ? text(obj.at("positive_side"), where) : "below";
    if (side == "below") {
      spec.halfspace_positive = HalfspaceSide::below;
    } else if (side == "above") {
      spec.halfspace_positive = HalfspaceSide::above;
    } else {
      throw ConfigError(where + ".positive_side: expected 'below' or 'above'");
    }
  } else if (kind == "l1_ball" || kind == "covering_defender") {
    spec.kind = kind == "l1_ball" ? ClassifierKind::l1_ball : ClassifierKind::covering_defender;
    spec.radius = number(field(obj, "radius", where), where + ".radius");
    if (obj.contains("open")) {
      if (!obj.at("open").is_boolean()) throw ConfigError(where + ".open: expected a boolean");
      spec.open = obj.at("open").get<bool>();
    }
  } else if (kind == "binary_defender") {
    spec.kind = ClassifierKind::binary_defender;
    spec.defender_lower = number(field(obj, "c_plus", where), where + ".c_plus");
    spec.defender_upper = number(field(obj, "c_minus", where), where + ".c_minus");
  } else if (kind == "l2_ball") {
    spec.kind = ClassifierKind::l2_ball;
    spec.center = vector_of(field(obj, "center", where), dim, where + ".center");
    spec.radius = number(field(obj, "radius", where), where + ".radius");
    spec.body_positive = body_side(obj, where);
  } else if (kind == "box") {
    spec.kind = ClassifierKind::box;
    spec.lo = vector_of(field(obj, "lo", where), dim, where + ".lo");
    spec.hi = vector_of(field(obj, "hi", where), dim, where + ".hi");
    spec.body_positive = body_side(obj, where);
  } else if (kind == "polytope") {
    spec.kind = ClassifierKind::polytope;
    const json& facets = field(obj, "halfspaces", where);
    if (!facets.is_array() || facets.empty()) throw ConfigError(where + ".halfspaces: expected a nonempty array");
    for (std::size_t i = 0; i < facets.size(); ++i) {
      const std::string at = where + ".halfspaces[" + std::to_string(i) + "]";
      try {
        spec.facets.emplace_back(vector_of(field(facets[i], "normal", at), dim, at + ".normal"),
                                 number(field(facets[i], "offset", at), at + ".offset"));
      } catch (const UsageError& e) {
        throw ConfigError(at + ": " + e.what());
      }
    }
    spec.interior = vector_of(field(obj, "interior", where), dim, where + ".interior");
    spec.body_positive = body_side(obj, where);
  } else {
    throw ConfigError(where + ".kind: unknown classifier kind '" + kind + "'");
  }
  return spec;
}

Instance parse_x_minus(const json& v, const CostFunction& cf) {
  if (v.is_object()) {
    // {"axis": d, "cost": a}: the point target + (a / c_d) e_d.
    const int axis = integer(field(v, "axis", "x_minus"), "x_minus.axis");
    const double level = number(field(v, "cost", "x_minus"), "x_minus.cost");
    if (axis < 0 || axis >= cf.dimension()) throw ConfigError("x_minus.axis: out of range");
    Instance x = cf.target();
    x[axis] += level / cf.weights()[axis];
    return x;
  }
  return vector_of(v, cf.dimension(), "x_minus");
}

SamplerParams parse_sampler(const json* obj, Eigen::Index dim) {
  double ratio = 100.0;
  if (obj && obj->contains("radius_ratio")) ratio = number(obj->at("radius_ratio"), "sampler.radius_ratio");
  if (!(ratio > 1.0)) throw ConfigError("sampler.radius_ratio: must exceed 1");
  SamplerParams p = SamplerParams::desk_defaults(dim, ratio);
  if (!obj) return p;
  const auto positive_int = [&](const char* key, int& slot) {
    if (!obj->contains(key)) return;
    slot = integer(obj->at(key), std::string("sampler.") + key);
    if (slot < 1) throw ConfigError(std::string("sampler.") + key + ": must be at least 1");
  };
  positive_int("samples", p.samples);
  p.pool_target = p.samples;
  positive_int("walk_steps", p.walk_steps);
  positive_int("iterations", p.iterations);
  positive_int("warmup_rounds", p.warmup_rounds);
  positive_int("pool_target", p.pool_target);
  if (p.pool_target < 2) throw ConfigError("sampler.pool_target: must be at least 2");
  if (obj->contains("centered")) {
    if (!obj->at("centered").is_boolean()) throw ConfigError("sampler.centered: expected a boolean");
    p.centered = obj->at("centered").get<bool>();
  }
  if (obj->contains("extent_tolerance")) {
    p.extent_tolerance = number(obj->at("extent_tolerance"), "sampler.extent_tolerance");
    if (!(p.extent_tolerance > 0.0)) throw ConfigError("sampler.extent_tolerance: must be positive");
  }
  return p;
}

}  // namespace

ExperimentConfig parse_config(json doc, const ConfigOverrides& overrides) {
  if (!doc.is_object()) throw ConfigError("config: top level must be an object");
  if (overrides.dimension) doc["dimension"] = *overrides.dimension;
  if (overrides.algorithm) doc["algorithm"] = *overrides.algorithm;
  if (overrides.epsilon) doc["epsilon"] = *overrides.epsilon;
  if (overrides.trials) doc["trials"] = *overrides.trials;
  if (overrides.seed) doc["seed"] = *overrides.seed;
  if (overrides.output_path) doc["output"]["path"] = *overrides.output_path;
  if (overrides.format) doc["output"]["format"] = *overrides.format;

  ExperimentConfig cfg;
  cfg.dimension = infer_dimension(doc);
  const Eigen::Index dim = cfg.dimension;

  const json cost = doc.contains("cost") ? doc.at("cost") : json::object();
  try {
    cfg.cost = CostFunction(cost.contains("target") ? vector_of(cost.at("target"), dim, "cost.target") : Vector::Zero(dim),
                            cost.contains("weights") ? vector_of(cost.at("weights"), dim, "cost.weights")
                                                     : Vector::Ones(dim));
    cfg.classifier = parse_classifier(field(doc, "classifier", "config"), dim);
  } catch (const UsageError& e) {
    throw ConfigError(e.what());
  }

  cfg.algorithm = parse_algorithm(doc.contains("algorithm") ? text(doc.at("algorithm"), "algorithm") : "kmls");
  if (doc.contains("epsilon")) cfg.epsilon = number(doc.at("epsilon"), "epsilon");
  if (!(cfg.epsilon > 0.0)) throw ConfigError("epsilon: must be positive");

  cfg.x_minus = parse_x_minus(field(doc, "x_minus", "config"), cfg.cost);

  if (doc.contains("bounds")) {
    const json& b = doc.at("bounds");
    if (b.is_string() && b.get<std::string>() == "auto") {
      // both bounds derived from x_minus
    } else if (b.is_object()) {
      if (b.contains("c_plus")) cfg.c_plus = number(b.at("c_plus"), "bounds.c_plus");
      if (b.contains("c_minus")) cfg.c_minus = number(b.at("c_minus"), "bounds.c_minus");
      if (b.contains("auto_lower_ratio")) cfg.auto_lower_ratio = number(b.at("auto_lower_ratio"), "bounds.auto_lower_ratio");
    } else {
      throw ConfigError("bounds: expected \"auto\" or an object");
    }
  }
  if (!(cfg.auto_lower_ratio > 0.0 && cfg.auto_lower_ratio <= 1.0)) {
    throw ConfigError("bounds.auto_lower_ratio: must lie in (0, 1]");
  }

  if (doc.contains("k")) {
    const json& k = doc.at("k");
    if (!(k.is_string() && k.get<std::string>() == "auto")) {
      cfg.k_steps = integer(k, "k");
      if (*cfg.k_steps < 1) throw ConfigError("k: must be at least 1 or \"auto\"");
    }
  }

  if (doc.contains("trials")) cfg.trials = integer(doc.at("trials"), "trials");
  if (cfg.trials < 1) throw ConfigError("trials: must be at least 1");
  if (doc.contains("seed")) {
    if (!doc.at("seed").is_number_integer()) throw ConfigError("seed: expected an integer");
    cfg.seed = doc.at("seed").get<std::uint64_t>();
  }

  cfg.sampler = parse_sampler(doc.contains("sampler") ? &doc.at("sampler") : nullptr, dim);

  if (doc.contains("output")) {
    const json& out = doc.at("output");
    if (out.contains("path")) cfg.output_path = text(out.at("path"), "output.path");
    if (out.contains("format")) cfg.format = parse_format(text(out.at("format"), "output.format"));
  }
  if (doc.contains("timing")) {
    if (!doc.at("timing").is_boolean()) throw ConfigError("timing: expected a boolean");
    cfg.record_timing = doc.at("timing").get<bool>();
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path, const ConfigOverrides& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json doc;
  try {
    doc = json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ConfigError("config '" + path + "': " + e.what());
  }
  return parse_config(std::move(doc), overrides);
}

void validate_config(const ExperimentConfig& config) {
  const ConvexSide side = declared_convex_side(config.classifier);
  if ((config.algorithm == Algorithm::mls || config.algorithm == Algorithm::kmls || config.algorithm == Algorithm::both) &&
      !positive_is_convex(side)) {
    throw ConfigError(std::string(to_string(config.algorithm)) + " requires a classifier with a convex positive class");
  }
  if (config.algorithm == Algorithm::setsearch && !negative_is_convex(side)) {
    throw ConfigError("setsearch requires a classifier with a convex negative class");
  }

  OraclePtr oracle;
  try {
    oracle = build_oracle(config.classifier, config.cost);
    analytic_mac(config.classifier, config.cost);
  } catch (const UsageError& e) {
    throw ConfigError(e.what());
  }
  if (oracle->query(config.cost.target()) != Label::positive) {
    throw ConfigError("the cost target must be labeled positive");
  }
  if (oracle->query(config.x_minus) != Label::negative) throw ConfigError("x_minus must be labeled negative");

  const double start = config.cost.cost(config.x_minus);
  if (config.c_minus && start > *config.c_minus * (1.0 + 1e-9)) {
    throw ConfigError("bounds.c_minus: smaller than cost(x_minus)");
  }
  const double lower = config.lower_bound();
  if (!(lower > 0.0) || !(lower <= config.upper_bound())) {
    throw ConfigError("bounds: require 0 < C+ <= min(C-, cost(x_minus))");
  }
}

}  // namespace evasion
