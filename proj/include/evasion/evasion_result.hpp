#pragma once

#include "evasion/cost_geometry.hpp"
#include "evasion/oracles.hpp"
#include "evasion/search_bounds.hpp"

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

namespace evasion {

/// A direction dropped from the active set once `cost_level` became an upper
/// bound while the direction still answered positive there.
struct PruneEvent {
  std::size_t direction;
  double cost_level;
};

/// One phase of the K-step search: K binary-search steps along `direction`
/// followed by a lazy sweep of the other active directions at the candidate
/// lower bound.
struct KStepPhase {
  std::size_t direction;
  double start_lower;
  double start_upper;
  double candidate_lower;
  double candidate_upper;
  int steps_requested;
  int steps_executed;
  bool verified;  ///< every swept direction answered positive
  std::size_t queries;
};

/// A halfspace cut and the proposal cost it was made for. `anchor_cost` is the
/// cost of the point the cut passes through (always > proposal).
struct CutRecord {
  Halfspace halfspace;
  double proposal;
  double anchor_cost;
};

struct SearchTrace {
  std::vector<SearchBounds> bounds;  ///< initial bounds, then one entry per update
  std::vector<PruneEvent> prunes;
  std::vector<KStepPhase> phases;
  std::vector<CutRecord> cuts;  ///< every cut made, including discarded regions
  std::vector<std::string> events;
};

struct EvasionResult {
  Instance witness;
  SearchBounds final_bounds;
  std::size_t queries_used = 0;
  std::shared_ptr<const QueryTranscript> transcript;
  SearchTrace trace;

  bool converged(double epsilon) const { return terminated(final_bounds, epsilon); }
};

/// Non-owning pass-through that records into a transcript. Used by the
/// searches to account for their own queries.
class RecordingOracle final : public MembershipOracle {
 public:
  RecordingOracle(MembershipOracle& inner, std::shared_ptr<QueryTranscript> transcript)
      : inner_(&inner), transcript_(std::move(transcript)) {}

  Label query(const Instance& x) override {
    const Label label = inner_->query(x);
    transcript_->record(x, label);
    return label;
  }
  ConvexSide convex_side() const override { return inner_->convex_side(); }
  Eigen::Index dimension() const override { return inner_->dimension(); }
  OraclePtr clone() const override { return inner_->clone(); }

  const std::shared_ptr<QueryTranscript>& transcript() const { return transcript_; }

 private:
  MembershipOracle* inner_;
  std::shared_ptr<QueryTranscript> transcript_;
};

}  // namespace evasion
