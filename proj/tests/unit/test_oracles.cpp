#include "evasion/errors.hpp"
#include "evasion/oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace evasion;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

Vector along(Eigen::Index dim, Eigen::Index axis, double value) {
  Vector x = Vector::Zero(dim);
  x[axis] = value;
  return x;
}

// Draws pairs with the given label and checks midpoints keep it.
int midpoint_violations(MembershipOracle& oracle, Label label, double scale, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coord(-scale, scale);
  const Eigen::Index dim = oracle.dimension();
  std::vector<Vector> pool;
  while (pool.size() < 400) {
    Vector x(dim);
    for (Eigen::Index d = 0; d < dim; ++d) x[d] = coord(rng);
    if (oracle.query(x) == label) pool.push_back(x);
  }
  std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
  int bad = 0;
  for (int t = 0; t < 1000; ++t) {
    const Vector mid = 0.5 * (pool[pick(rng)] + pool[pick(rng)]);
    if (oracle.query(mid) != label) ++bad;
  }
  return bad;
}

}  // namespace

TEST_CASE("halfspace oracle") {
  auto o = make_halfspace_oracle(vec({1, 0}), 1.0, HalfspaceSide::below);
  CHECK(o->query(vec({2, 0})) == Label::negative);
  CHECK(o->query(vec({0, 0})) == Label::positive);
  CHECK(o->query(vec({1, 0})) == Label::negative);
  CHECK(o->convex_side() == ConvexSide::both);
  CHECK_THROWS_AS(make_halfspace_oracle(vec({0, 0}), 1.0, HalfspaceSide::below), UsageError);
  CHECK_THROWS_AS(o->query(vec({1, 2, 3})), UsageError);
}

TEST_CASE("l1 ball oracle and covering defender") {
  const CostFunction cf = CostFunction::uniform(Vector::Zero(3));
  auto open = make_l1_ball_oracle(cf, 4.0, true);
  auto closed = make_l1_ball_oracle(cf, 4.0, false);
  auto defender = make_covering_defender(cf, 4.0);
  CHECK(open->query(along(3, 1, 3.9)) == Label::positive);
  CHECK(open->query(along(3, 1, 4.0)) == Label::negative);
  CHECK(closed->query(along(3, 1, 4.0)) == Label::positive);
  CHECK(defender->query(along(3, 2, 4.0)) == Label::negative);
  CHECK(defender->query(vec({1, 1, 1.99})) == Label::positive);
  CHECK(open->convex_side() == ConvexSide::positive);
  CHECK_THROWS_AS(make_l1_ball_oracle(cf, 0.0, true), UsageError);

  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> coord(-6, 6);
  for (int t = 0; t < 1000; ++t) {
    const Vector x = vec({coord(rng), coord(rng), coord(rng)});
    CHECK(open->query(x) == defender->query(x));
  }
}

TEST_CASE("body oracles") {
  auto box = make_box_oracle(vec({0, 0}), vec({1, 1}), BodySide::inside);
  CHECK(box->query(vec({0.5, 0.5})) == Label::positive);
  CHECK(box->query(vec({1.5, 0.5})) == Label::negative);
  CHECK(box->query(vec({1.0, 0.5})) == Label::positive);

  auto ball = make_l2_ball_oracle(vec({0, 0}), 1.0, BodySide::inside);
  CHECK(ball->query(vec({2, 0})) == Label::negative);
  auto ball_out = make_l2_ball_oracle(vec({0, 0}), 1.0, BodySide::outside);
  CHECK(ball_out->query(vec({2, 0})) == Label::positive);
  CHECK(ball_out->convex_side() == ConvexSide::negative);

  const std::vector<Halfspace> simplex{Halfspace(vec({-1, 0}), 0), Halfspace(vec({0, -1}), 0),
                                       Halfspace(vec({1, 1}), 1)};
  auto poly = make_polytope_oracle(simplex, vec({0.25, 0.25}), BodySide::inside);
  CHECK(poly->query(vec({0.2, 0.2})) == Label::positive);
  CHECK(poly->query(vec({0.8, 0.8})) == Label::negative);
  auto poly_out = make_polytope_oracle(simplex, vec({0.25, 0.25}), BodySide::outside);
  CHECK(poly_out->query(vec({0.2, 0.2})) == Label::negative);

  CHECK_THROWS_AS(make_box_oracle(vec({0, 1}), vec({1, 1}), BodySide::inside), UsageError);
  CHECK_THROWS_AS(make_l2_ball_oracle(vec({0, 0}), -1.0, BodySide::inside), UsageError);
  CHECK_THROWS_AS(make_polytope_oracle(simplex, vec({2, 2}), BodySide::inside), UsageError);
  CHECK_THROWS_AS(make_polytope_oracle({}, vec({0, 0}), BodySide::inside), UsageError);
}

TEST_CASE("declared convex class passes a midpoint certificate") {
  const CostFunction cf(vec({0.5, -0.5, 1}), vec({1, 2, 0.5}));
  auto l1 = make_l1_ball_oracle(cf, 3.0, true);
  auto half = make_halfspace_oracle(vec({1, -2, 0.5}), 0.3, HalfspaceSide::below);
  auto box_in = make_box_oracle(vec({-1, -2, 0}), vec({2, 1, 3}), BodySide::inside);
  auto box_out = make_box_oracle(vec({-1, -2, 0}), vec({2, 1, 3}), BodySide::outside);
  auto l2_out = make_l2_ball_oracle(vec({1, 1, 1}), 2.0, BodySide::outside);
  const std::vector<Halfspace> facets{Halfspace(vec({1, 0, 0}), 2), Halfspace(vec({-1, 0, 0}), 2),
                                      Halfspace(vec({0, 1, 1}), 3), Halfspace(vec({0, -1, 1}), 3),
                                      Halfspace(vec({0, 0, -1}), 2)};
  auto poly = make_polytope_oracle(facets, vec({0, 0, 0}), BodySide::inside);

  CHECK(midpoint_violations(*l1, Label::positive, 4, 1) == 0);
  CHECK(midpoint_violations(*half, Label::positive, 4, 2) == 0);
  CHECK(midpoint_violations(*half, Label::negative, 4, 3) == 0);
  CHECK(midpoint_violations(*box_in, Label::positive, 4, 4) == 0);
  CHECK(midpoint_violations(*box_out, Label::negative, 4, 5) == 0);
  CHECK(midpoint_violations(*l2_out, Label::negative, 4, 6) == 0);
  CHECK(midpoint_violations(*poly, Label::positive, 4, 7) == 0);
}

TEST_CASE("oracles are deterministic and clones agree") {
  auto o = make_l2_ball_oracle(vec({1, 2}), 1.5, BodySide::inside);
  auto c = o->clone();
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> coord(-2, 4);
  for (int t = 0; t < 500; ++t) {
    const Vector x = vec({coord(rng), coord(rng)});
    const Label first = o->query(x);
    CHECK(o->query(x) == first);
    CHECK(c->query(x) == first);
  }
}

TEST_CASE("binary defender") {
  const CostFunction cf = CostFunction::uniform(Vector::Zero(2));
  BinaryDefender d(cf, 1.0, 16.0);
  CHECK(d.query(vec({4, 0})) == Label::positive);
  CHECK(d.lower() == 4.0);
  CHECK(d.upper() == 16.0);
  // threshold is now 8
  CHECK(d.query(vec({0, 9})) == Label::negative);
  CHECK(d.upper() == 9.0);
  // committed geometry: no updates outside (C+, C-)
  CHECK(d.query(vec({3, 0})) == Label::positive);
  CHECK(d.query(vec({0, 10})) == Label::negative);
  CHECK(d.lower() == 4.0);
  CHECK(d.upper() == 9.0);

  CHECK_THROWS_AS(BinaryDefender(cf, 2.0, 2.0), UsageError);
  CHECK_THROWS_AS(BinaryDefender(cf, 0.0, 2.0), UsageError);
}

TEST_CASE("binary defender keeps the gap from closing faster than a square root") {
  const CostFunction cf = CostFunction::uniform(Vector::Zero(3));
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int run = 0; run < 20; ++run) {
    BinaryDefender d(cf, 1.0, 1000.0);
    std::vector<double> positives;
    std::vector<double> negatives;
    double gap = d.upper() / d.lower();
    for (int q = 0; q < 40; ++q) {
      // probe anywhere in log-space around the current bracket
      const double level = std::exp(std::log(d.lower() / 2) + u(rng) * std::log(2 * d.upper() / d.lower() * 2));
      const Label label = d.query(along(3, q % 3, level));
      (label == Label::positive ? positives : negatives).push_back(level);
      const double next = d.upper() / d.lower();
      CHECK(next >= std::sqrt(gap) * (1 - 1e-12));
      gap = next;
    }
    // consistency: every positive is cheaper than every negative
    for (double p : positives) {
      for (double n : negatives) CHECK(p < n);
    }
  }
}

TEST_CASE("counting wrapper") {
  const CostFunction cf = CostFunction::uniform(Vector::Zero(2));
  auto counted = wrap_counting(make_covering_defender(cf, 2.0), cf);
  CHECK(counted.transcript->total() == 0);
  CHECK(counted.transcript->distinct_cost_levels() == std::size_t{0});

  const std::vector<Vector> pts{vec({1, 0}), vec({3, 0}), vec({0, -1})};
  for (const auto& p : pts) counted.oracle->query(p);
  CHECK(counted.transcript->total() == 3);
  CHECK(counted.transcript->negatives() == 1);
  REQUIRE(counted.transcript->records().size() == 3);
  for (std::size_t i = 0; i < 3; ++i) CHECK(counted.transcript->records()[i].point == pts[i]);
  CHECK(counted.transcript->distinct_cost_levels() == std::size_t{2});

  auto fresh = make_covering_defender(cf, 2.0);
  CHECK(counted.transcript->replay(*fresh));

  // clones get their own transcript
  auto clone = counted.oracle->clone();
  clone->query(vec({5, 5}));
  CHECK(counted.transcript->total() == 3);

  auto counts = wrap_counting(make_covering_defender(cf, 2.0), cf, QueryTranscript::Mode::counts);
  counts.oracle->query(vec({1, 1}));
  CHECK(counts.transcript->total() == 1);
  CHECK(counts.transcript->records().empty());
  CHECK_FALSE(counts.transcript->distinct_cost_levels().has_value());
  CHECK_THROWS_AS(counts.transcript->replay(*fresh), UsageError);
}

TEST_CASE("counting wrapper is transparent, including for the stateful defender") {
  const CostFunction cf = CostFunction::uniform(Vector::Zero(2));
  auto plain = make_binary_defender(cf, 1.0, 100.0);
  auto counted = wrap_counting(make_binary_defender(cf, 1.0, 100.0), cf);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> coord(-60, 60);
  for (int t = 0; t < 200; ++t) {
    const Vector x = vec({coord(rng), coord(rng)});
    CHECK(plain->query(x) == counted.oracle->query(x));
  }
  auto replay = make_binary_defender(cf, 1.0, 100.0);
  CHECK(counted.transcript->replay(*replay));
}
