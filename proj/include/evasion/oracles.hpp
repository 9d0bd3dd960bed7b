#pragma once

#include "evasion/cost_geometry.hpp"

#include <cstddef>
#include <memory>
#include <optional>
#include <string_view>
#include <vector>

namespace evasion {

/// positive = '+' (flagged / detected), negative = '-' (passes as normal).
enum class Label { positive, negative };

/// Which induced class the oracle guarantees to be convex.
enum class ConvexSide { positive, negative, both, unknown };

std::string_view to_string(Label label);
std::string_view to_string(ConvexSide side);

/// Query-only classifier contract. Implementations must be deterministic
/// given their current state. Stateful oracles (the binary defender) mutate
/// on query, so `query` is non-const.
class MembershipOracle {
 public:
  virtual ~MembershipOracle() = default;

  virtual Label query(const Instance& x) = 0;
  virtual ConvexSide convex_side() const = 0;
  virtual Eigen::Index dimension() const = 0;

  /// Independent copy of the oracle in its current state. Clones never
  /// share transcripts or adaptive state with the original.
  virtual std::unique_ptr<MembershipOracle> clone() const = 0;
};

using OraclePtr = std::unique_ptr<MembershipOracle>;

inline bool positive_is_convex(ConvexSide s) { return s == ConvexSide::positive || s == ConvexSide::both; }
inline bool negative_is_convex(ConvexSide s) { return s == ConvexSide::negative || s == ConvexSide::both; }

/// Side of a convex body that carries the positive label.
enum class BodySide { inside, outside };

/// Side of the hyperplane w.x = b that carries the positive label. The
/// closed side is always { w.x >= b }.
enum class HalfspaceSide { below, above };

/// Labels x as positive iff (w.x >= b) matches `positive_side == above`.
/// Boundary points belong to the closed side { w.x >= b }.
OraclePtr make_halfspace_oracle(Vector w, double b, HalfspaceSide positive_side);

/// Positive class is the weighted L1 ball of cost `radius` around the
/// cost target; open excludes the boundary from the positive class.
OraclePtr make_l1_ball_oracle(const CostFunction& cf, double radius, bool open);

/// Closed Euclidean ball.
OraclePtr make_l2_ball_oracle(Instance center, double radius, BodySide positive_side);

/// Closed axis-aligned box [lo, hi].
OraclePtr make_box_oracle(Instance lo, Instance hi, BodySide positive_side);

/// Closed polytope given as an intersection of halfspaces; `interior` must be
/// strictly inside every halfspace.
OraclePtr make_polytope_oracle(std::vector<Halfspace> halfspaces, const Instance& interior,
                               BodySide positive_side);

/// Stateless lower-bound defender: positive iff cost(x) < radius.
OraclePtr make_covering_defender(const CostFunction& cf, double radius);

/// Adaptive lower-bound defender. Holds bounds (C+, C-) and answers a probe
/// of cost a in (C+, C-) positive iff a <= sqrt(C+ C-), then moves C+ (or C-)
/// to a. Probes outside the open interval are answered from the committed
/// geometry without updating.
class BinaryDefender final : public MembershipOracle {
 public:
  BinaryDefender(CostFunction cf, double c_plus, double c_minus);

  Label query(const Instance& x) override;
  ConvexSide convex_side() const override { return ConvexSide::positive; }
  Eigen::Index dimension() const override { return cf_.dimension(); }
  OraclePtr clone() const override { return std::make_unique<BinaryDefender>(*this); }

  double lower() const { return c_plus_; }
  double upper() const { return c_minus_; }

 private:
  CostFunction cf_;
  double c_plus_;
  double c_minus_;
};

OraclePtr make_binary_defender(const CostFunction& cf, double c_plus, double c_minus);

struct QueryRecord {
  Instance point;
  Label label;
};

/// Ordered log of the queries that passed through a CountingOracle.
class QueryTranscript {
 public:
  enum class Mode {
    full,    ///< keep every point and track distinct cost levels
    counts,  ///< counters only; for samplers issuing millions of queries
  };

  explicit QueryTranscript(std::optional<CostFunction> cf = std::nullopt, Mode mode = Mode::full);

  void record(const Instance& x, Label label);

  std::size_t total() const { return total_; }
  std::size_t negatives() const { return negatives_; }
  Mode mode() const { return mode_; }
  const std::optional<CostFunction>& cost_function() const { return cf_; }
  const std::vector<QueryRecord>& records() const { return records_; }

  /// Number of distinct cost levels probed (relative tolerance 1e-12);
  /// empty without a registered cost function or in counts mode.
  std::optional<std::size_t> distinct_cost_levels() const;

  /// Re-issues every recorded point against `oracle`, returns true if all
  /// labels match.
  bool replay(MembershipOracle& oracle) const;

 private:
  std::optional<CostFunction> cf_;
  Mode mode_;
  std::size_t total_ = 0;
  std::size_t negatives_ = 0;
  std::vector<QueryRecord> records_;
  std::vector<double> levels_;  // sorted, deduplicated
};

/// Pass-through wrapper appending every query to a shared transcript.
class CountingOracle final : public MembershipOracle {
 public:
  CountingOracle(OraclePtr inner, std::shared_ptr<QueryTranscript> transcript);

  Label query(const Instance& x) override;
  ConvexSide convex_side() const override { return inner_->convex_side(); }
  Eigen::Index dimension() const override { return inner_->dimension(); }
  /// Clones the inner oracle and starts a fresh transcript of the same kind.
  OraclePtr clone() const override;

  const std::shared_ptr<QueryTranscript>& transcript() const { return transcript_; }
  MembershipOracle& inner() { return *inner_; }

 private:
  OraclePtr inner_;
  std::shared_ptr<QueryTranscript> transcript_;
};

struct CountedOracle {
  std::unique_ptr<CountingOracle> oracle;
  std::shared_ptr<QueryTranscript> transcript;
};

CountedOracle wrap_counting(OraclePtr oracle, std::optional<CostFunction> cf = std::nullopt,
                            QueryTranscript::Mode mode = QueryTranscript::Mode::full);

}  // namespace evasion
