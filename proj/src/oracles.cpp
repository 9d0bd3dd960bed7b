#include "evasion/oracles.hpp"

#include "evasion/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace evasion {

std::string_view to_string(Label label) { return label == Label::positive ? "positive" : "negative"; }

std::string_view to_string(ConvexSide side) {
  switch (side) {
    case ConvexSide::positive: return "positive-convex";
    case ConvexSide::negative: return "negative-convex";
    case ConvexSide::both: return "both";
    case ConvexSide::unknown: break;
  }
  return "unknown";
}

namespace {

Label label_for(bool inside_body, BodySide positive_side) {
  const bool positive = inside_body == (positive_side == BodySide::inside);
  return positive ? Label::positive : Label::negative;
}

ConvexSide body_convex_side(BodySide positive_side) {
  return positive_side == BodySide::inside ? ConvexSide::positive : ConvexSide::negative;
}

void require_same_dimension(const Instance& a, const Instance& x) {
  if (a.size() != x.size()) throw UsageError("oracle query: dimension mismatch");
}

class HalfspaceOracle final : public MembershipOracle {
 public:
  HalfspaceOracle(Vector w, double b, HalfspaceSide positive_side)
      : w_(std::move(w)), b_(b), positive_side_(positive_side) {}

  Label query(const Instance& x) override {
    require_same_dimension(w_, x);
    const bool above = w_.dot(x) >= b_;
    return above == (positive_side_ == HalfspaceSide::above) ? Label::positive : Label::negative;
  }
  ConvexSide convex_side() const override { return ConvexSide::both; }
  Eigen::Index dimension() const override { return w_.size(); }
  OraclePtr clone() const override { return std::make_unique<HalfspaceOracle>(*this); }

 private:
  Vector w_;
  double b_;
  HalfspaceSide positive_side_;
};

class L1BallOracle final : public MembershipOracle {
 public:
  L1BallOracle(CostFunction cf, double radius, bool open) : cf_(std::move(cf)), radius_(radius), open_(open) {}

  Label query(const Instance& x) override {
    const double a = cf_.cost(x);
    const bool inside = open_ ? a < radius_ : a <= radius_;
    return inside ? Label::positive : Label::negative;
  }
  ConvexSide convex_side() const override { return ConvexSide::positive; }
  Eigen::Index dimension() const override { return cf_.dimension(); }
  OraclePtr clone() const override { return std::make_unique<L1BallOracle>(*this); }

 private:
  CostFunction cf_;
  double radius_;
  bool open_;
};

class L2BallOracle final : public MembershipOracle {
 public:
  L2BallOracle(Instance center, double radius, BodySide side)
      : center_(std::move(center)), radius_sq_(radius * radius), side_(side) {}

  Label query(const Instance& x) override {
    require_same_dimension(center_, x);
    return label_for((x - center_).squaredNorm() <= radius_sq_, side_);
  }
  ConvexSide convex_side() const override { return body_convex_side(side_); }
  Eigen::Index dimension() const override { return center_.size(); }
  OraclePtr clone() const override { return std::make_unique<L2BallOracle>(*this); }

 private:
  Instance center_;
  double radius_sq_;
  BodySide side_;
};

class BoxOracle final : public MembershipOracle {
 public:
  BoxOracle(Instance lo, Instance hi, BodySide side) : lo_(std::move(lo)), hi_(std::move(hi)), side_(side) {}

  Label query(const Instance& x) override {
    require_same_dimension(lo_, x);
    const bool inside = (x.array() >= lo_.array()).all() && (x.array() <= hi_.array()).all();
    return label_for(inside, side_);
  }
  ConvexSide convex_side() const override { return body_convex_side(side_); }
  Eigen::Index dimension() const override { return lo_.size(); }
  OraclePtr clone() const override { return std::make_unique<BoxOracle>(*this); }

 private:
  Instance lo_;
  Instance hi_;
  BodySide side_;
};

class PolytopeOracle final : public MembershipOracle {
 public:
  PolytopeOracle(std::vector<Halfspace> halfspaces, BodySide side) : halfspaces_(std::move(halfspaces)), side_(side) {}

  Label query(const Instance& x) override {
    require_same_dimension(halfspaces_.front().normal(), x);
    const bool inside =
        std::all_of(halfspaces_.begin(), halfspaces_.end(), [&](const Halfspace& h) { return h.contains(x); });
    return label_for(inside, side_);
  }
  ConvexSide convex_side() const override { return body_convex_side(side_); }
  Eigen::Index dimension() const override { return halfspaces_.front().normal().size(); }
  OraclePtr clone() const override { return std::make_unique<PolytopeOracle>(*this); }

 private:
  std::vector<Halfspace> halfspaces_;
  BodySide side_;
};

}  // namespace

OraclePtr make_halfspace_oracle(Vector w, double b, HalfspaceSide positive_side) {
  if (w.size() == 0 || w.isZero(0.0)) throw UsageError("halfspace oracle: normal must be nonzero");
  if (!w.allFinite() || !std::isfinite(b)) throw UsageError("halfspace oracle: non-finite coefficients");
  return std::make_unique<HalfspaceOracle>(std::move(w), b, positive_side);
}

OraclePtr make_l1_ball_oracle(const CostFunction& cf, double radius, bool open) {
  if (!(radius > 0.0) || !std::isfinite(radius)) throw UsageError("l1 ball oracle: radius must be positive");
  return std::make_unique<L1BallOracle>(cf, radius, open);
}

OraclePtr make_l2_ball_oracle(Instance center, double radius, BodySide positive_side) {
  if (!(radius > 0.0) || !std::isfinite(radius)) throw UsageError("l2 ball oracle: radius must be positive");
  if (center.size() == 0 || !center.allFinite()) throw UsageError("l2 ball oracle: invalid center");
  return std::make_unique<L2BallOracle>(std::move(center), radius, positive_side);
}

OraclePtr make_box_oracle(Instance lo, Instance hi, BodySide positive_side) {
  if (lo.size() == 0 || lo.size() != hi.size()) throw UsageError("box oracle: bounds must have equal nonzero length");
  if (!lo.allFinite() || !hi.allFinite()) throw UsageError("box oracle: non-finite bounds");
  if (!(lo.array() < hi.array()).all()) throw UsageError("box oracle: require lo < hi componentwise");
  return std::make_unique<BoxOracle>(std::move(lo), std::move(hi), positive_side);
}

OraclePtr make_polytope_oracle(std::vector<Halfspace> halfspaces, const Instance& interior, BodySide positive_side) {
  if (halfspaces.empty()) throw UsageError("polytope oracle: at least one halfspace required");
  for (const Halfspace& h : halfspaces) {
    if (h.normal().size() != interior.size()) throw UsageError("polytope oracle: dimension mismatch");
    if (!(h.evaluate(interior) < h.offset())) {
      throw UsageError("polytope oracle: declared interior point is not strictly inside");
    }
  }
  return std::make_unique<PolytopeOracle>(std::move(halfspaces), positive_side);
}

OraclePtr make_covering_defender(const CostFunction& cf, double radius) {
  return make_l1_ball_oracle(cf, radius, /*open=*/true);
}

BinaryDefender::BinaryDefender(CostFunction cf, double c_plus, double c_minus)
    : cf_(std::move(cf)), c_plus_(c_plus), c_minus_(c_minus) {
  if (!(c_plus > 0.0) || !(c_plus < c_minus) || !std::isfinite(c_minus)) {
    throw UsageError("binary defender: require 0 < C+ < C- < inf");
  }
}

Label BinaryDefender::query(const Instance& x) {
  const double a = cf_.cost(x);
  if (a <= c_plus_) return Label::positive;
  if (a >= c_minus_) return Label::negative;
  if (a <= std::sqrt(c_plus_ * c_minus_)) {
    c_plus_ = a;
    return Label::positive;
  }
  c_minus_ = a;
  return Label::negative;
}

OraclePtr make_binary_defender(const CostFunction& cf, double c_plus, double c_minus) {
  return std::make_unique<BinaryDefender>(cf, c_plus, c_minus);
}

QueryTranscript::QueryTranscript(std::optional<CostFunction> cf, Mode mode) : cf_(std::move(cf)), mode_(mode) {}

void QueryTranscript::record(const Instance& x, Label label) {
  ++total_;
  if (label == Label::negative) ++negatives_;
  if (mode_ != Mode::full) return;
  records_.push_back({x, label});
  if (!cf_) return;
  const double level = cf_->cost(x);
  const auto close = [level](double other) {
    return std::abs(other - level) <= 1e-12 * std::max({1.0, std::abs(level), std::abs(other)});
  };
  auto it = std::lower_bound(levels_.begin(), levels_.end(), level);
  if (it != levels_.end() && close(*it)) return;
  if (it != levels_.begin() && close(*std::prev(it))) return;
  levels_.insert(it, level);
}

std::optional<std::size_t> QueryTranscript::distinct_cost_levels() const {
  if (!cf_ || mode_ != Mode::full) return std::nullopt;
  return levels_.size();
}

bool QueryTranscript::replay(MembershipOracle& oracle) const {
  if (mode_ != Mode::full) throw UsageError("transcript replay requires full mode");
  return std::all_of(records_.begin(), records_.end(),
                     [&](const QueryRecord& r) { return oracle.query(r.point) == r.label; });
}

CountingOracle::CountingOracle(OraclePtr inner, std::shared_ptr<QueryTranscript> transcript)
    : inner_(std::move(inner)), transcript_(std::move(transcript)) {
  if (!inner_ || !transcript_) throw UsageError("counting oracle: null inner oracle or transcript");
}

Label CountingOracle::query(const Instance& x) {
  const Label label = inner_->query(x);
  transcript_->record(x, label);
  return label;
}

OraclePtr CountingOracle::clone() const {
  auto fresh = std::make_shared<QueryTranscript>(transcript_->cost_function(), transcript_->mode());
  return std::make_unique<CountingOracle>(inner_->clone(), std::move(fresh));
}

CountedOracle wrap_counting(OraclePtr oracle, std::optional<CostFunction> cf, QueryTranscript::Mode mode) {
  auto transcript = std::make_shared<QueryTranscript>(std::move(cf), mode);
  auto counted = std::make_unique<CountingOracle>(std::move(oracle), transcript);
  return {std::move(counted), std::move(transcript)};
}

}  // namespace evasion
