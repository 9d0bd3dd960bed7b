#pragma once

#include "evasion/cost_geometry.hpp"
#include "evasion/evasion_result.hpp"
#include "evasion/oracles.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace evasion {

/// Unit-cost search directions with an active/pruned flag per direction.
/// Pruned directions are never queried again.
class DirectionSet {
 public:
  /// Every direction must satisfy cost(target + e) == 1 (relative 1e-9).
  DirectionSet(const CostFunction& cf, std::vector<Vector> directions);

  std::size_t size() const { return directions_.size(); }
  std::size_t active_count() const;
  bool is_active(std::size_t i) const { return active_.at(i); }
  const Vector& direction(std::size_t i) const { return directions_.at(i); }
  std::vector<std::size_t> active_indices() const;

  void prune(std::size_t i);

 private:
  std::vector<Vector> directions_;
  std::vector<bool> active_;
};

/// The 2D axis directions in the order +e1, -e1, +e2, -e2, ...
DirectionSet default_direction_set(const CostFunction& cf);

struct LineSearchOptions {
  /// Check on a clone of the oracle that the start point is negative; the
  /// check is not charged to the search's query count.
  bool verify_start = true;
  QueryTranscript::Mode transcript_mode = QueryTranscript::Mode::full;
};

/// Breadth-first search over all active directions with lazy querying and
/// pruning. Requires a convex positive class, x_minus negative and
/// 0 < C+ <= MAC <= C-.
EvasionResult multiline_search(MembershipOracle& oracle, const CostFunction& cf, DirectionSet directions,
                               const Instance& x_minus, double c_plus, double c_minus, double epsilon,
                               const LineSearchOptions& options = {});

/// ceil(sqrt(L)) for L = steps_required_multiplicative(C+, C-, eps); at least 1.
int auto_step_count(double c_plus, double c_minus, double epsilon);

/// K-step variant: each phase runs K binary-search steps along one direction,
/// then sweeps the rest at the candidate lower bound. `steps` empty selects
/// K = ceil(sqrt(L)).
EvasionResult k_step_multiline_search(MembershipOracle& oracle, const CostFunction& cf, DirectionSet directions,
                                      const Instance& x_minus, double c_plus, double c_minus, double epsilon,
                                      std::optional<int> steps = std::nullopt,
                                      const LineSearchOptions& options = {});

}  // namespace evasion
