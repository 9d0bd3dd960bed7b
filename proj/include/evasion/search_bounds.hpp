#pragma once

#include <cstdint>

namespace evasion {

enum class SearchMode { additive, multiplicative };

/// Bracket C+ <= MAC <= C- maintained by a binary search.
class SearchBounds {
 public:
  /// Requires 0 < lower <= upper (additive mode allows lower == 0).
  SearchBounds(double lower, double upper, SearchMode mode = SearchMode::multiplicative);

  double lower() const { return lower_; }
  double upper() const { return upper_; }
  SearchMode mode() const { return mode_; }

  /// Bounds only ever tighten; a value outside the current bracket is a usage
  /// error.
  void raise_lower(double value);
  void lower_upper(double value);

 private:
  double lower_;
  double upper_;
  SearchMode mode_;
};

/// C- / C+
double multiplicative_gap(const SearchBounds& b);
/// C- - C+
double additive_gap(const SearchBounds& b);

/// Geometric mean in multiplicative mode, arithmetic mean in additive mode.
double propose(const SearchBounds& b);

/// Multiplicative: gap <= 1 + tol. Additive: gap <= tol.
bool terminated(const SearchBounds& b, double tol);

/// True when `proposal` cannot make progress because rounding pinned it to
/// one of the bounds.
bool proposal_stalled(const SearchBounds& b, double proposal);

/// ceil(log2[ log2(C-/C+) / log2(1+eps) ]), clamped at 0.
std::int64_t steps_required_multiplicative(double c_plus, double c_minus, double epsilon);

/// ceil(log2[ (C- - C+) / eta ]), clamped at 0.
std::int64_t steps_required_additive(double c_plus, double c_minus, double eta);

}  // namespace evasion
