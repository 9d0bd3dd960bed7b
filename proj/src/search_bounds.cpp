#include "evasion/search_bounds.hpp"

#include "evasion/errors.hpp"

#include <cmath>

namespace evasion {

SearchBounds::SearchBounds(double lower, double upper, SearchMode mode) : lower_(lower), upper_(upper), mode_(mode) {
  if (!std::isfinite(lower) || !std::isfinite(upper)) throw UsageError("search bounds: non-finite bound");
  if (mode == SearchMode::multiplicative && !(lower > 0.0)) {
    throw UsageError("search bounds: multiplicative search needs a strictly positive lower bound");
  }
  if (!(lower >= 0.0) || !(lower <= upper)) throw UsageError("search bounds: require 0 <= C+ <= C-");
}

void SearchBounds::raise_lower(double value) {
  if (!(value >= lower_) || !(value <= upper_)) throw UsageError("search bounds: lower bound must stay monotone");
  lower_ = value;
}

void SearchBounds::lower_upper(double value) {
  if (!(value <= upper_) || !(value >= lower_)) throw UsageError("search bounds: upper bound must stay monotone");
  upper_ = value;
}

double multiplicative_gap(const SearchBounds& b) { return b.upper() / b.lower(); }

double additive_gap(const SearchBounds& b) { return b.upper() - b.lower(); }

double propose(const SearchBounds& b) {
  if (b.mode() == SearchMode::multiplicative) return std::sqrt(b.lower() * b.upper());
  return 0.5 * (b.lower() + b.upper());
}

bool terminated(const SearchBounds& b, double tol) {
  if (!(tol > 0.0)) throw UsageError("terminated: tolerance must be positive");
  if (b.mode() == SearchMode::multiplicative) return multiplicative_gap(b) <= 1.0 + tol;
  return additive_gap(b) <= tol;
}

bool proposal_stalled(const SearchBounds& b, double proposal) {
  return !(proposal > b.lower()) || !(proposal < b.upper());
}

std::int64_t steps_required_multiplicative(double c_plus, double c_minus, double epsilon) {
  if (!(c_plus > 0.0) || !(c_plus <= c_minus) || !std::isfinite(c_minus)) {
    throw UsageError("steps_required_multiplicative: require 0 < C+ <= C-");
  }
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw UsageError("steps_required_multiplicative: require eps > 0");
  // Extended precision keeps the ceiling exact unless log2(ratio) lies
  // within a few ulps of an integer.
  const long double ratio = (std::log2(static_cast<long double>(c_minus)) - std::log2(static_cast<long double>(c_plus))) /
                            std::log2(1.0L + static_cast<long double>(epsilon));
  if (ratio <= 1.0L) return 0;
  return static_cast<std::int64_t>(std::ceil(std::log2(ratio)));
}

std::int64_t steps_required_additive(double c_plus, double c_minus, double eta) {
  if (!(c_plus <= c_minus) || !std::isfinite(c_plus) || !std::isfinite(c_minus)) {
    throw UsageError("steps_required_additive: require C+ <= C-");
  }
  if (!(eta > 0.0) || !std::isfinite(eta)) throw UsageError("steps_required_additive: require eta > 0");
  const long double ratio = (static_cast<long double>(c_minus) - c_plus) / eta;
  if (ratio <= 1.0L) return 0;
  return static_cast<std::int64_t>(std::ceil(std::log2(ratio)));
}

}  // namespace evasion
