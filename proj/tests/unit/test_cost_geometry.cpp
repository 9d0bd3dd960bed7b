#include "evasion/cost_geometry.hpp"
#include "evasion/errors.hpp"

#include <doctest.h>

#include <random>

using namespace evasion;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

CostFunction random_cost(std::mt19937_64& rng, Eigen::Index dim) {
  std::uniform_real_distribution<double> coord(-3.0, 3.0);
  std::uniform_real_distribution<double> weight(0.1, 5.0);
  Vector target(dim);
  Vector weights(dim);
  for (Eigen::Index d = 0; d < dim; ++d) {
    target[d] = coord(rng);
    weights[d] = weight(rng);
  }
  return {target, weights};
}

Vector random_point(std::mt19937_64& rng, Eigen::Index dim, double scale = 5.0) {
  std::uniform_real_distribution<double> coord(-scale, scale);
  Vector x(dim);
  for (Eigen::Index d = 0; d < dim; ++d) x[d] = coord(rng);
  return x;
}

}  // namespace

TEST_CASE("cost evaluates the weighted L1 distance") {
  const CostFunction unit(vec({0, 0}), vec({1, 1}));
  CHECK(unit.cost(vec({0, 0})) == 0.0);
  CHECK(unit.cost(vec({1, 2})) == 3.0);
  const CostFunction skewed(vec({0, 0}), vec({2, 0.5}));
  CHECK(skewed.cost(vec({1, 2})) == 3.0);
  CHECK(skewed(vec({1, 2})) == 3.0);
}

TEST_CASE("cost function rejects bad inputs") {
  CHECK_THROWS_AS(CostFunction(vec({0, 0}), vec({1, 0})), UsageError);
  CHECK_THROWS_AS(CostFunction(vec({0, 0}), vec({1, -2})), UsageError);
  CHECK_THROWS_AS(CostFunction(vec({0, 0}), vec({1, std::numeric_limits<double>::infinity()})), UsageError);
  CHECK_THROWS_AS(CostFunction(vec({0, 0}), vec({1})), UsageError);
  CHECK_THROWS_AS(CostFunction(Vector(0), Vector(0)), UsageError);
  const CostFunction cf = CostFunction::uniform(vec({0, 0}));
  CHECK_THROWS_AS(cf.cost(vec({1, 2, 3})), UsageError);
}

TEST_CASE("ball vertices") {
  const CostFunction cf(vec({0, 0}), vec({1, 2}));
  const auto v = ball_vertices(cf, 4.0);
  REQUIRE(v.size() == 4);
  CHECK(v[0] == vec({4, 0}));
  CHECK(v[1] == vec({-4, 0}));
  CHECK(v[2] == vec({0, 2}));
  CHECK(v[3] == vec({0, -2}));

  const auto one = ball_vertices(CostFunction(vec({5}), vec({1})), 1.0);
  REQUIRE(one.size() == 2);
  CHECK(one[0][0] == 6.0);
  CHECK(one[1][0] == 4.0);

  CHECK_THROWS_AS(ball_vertices(cf, 0.0), UsageError);
  CHECK_THROWS_AS(ball_vertices(cf, -1.0), UsageError);

  std::mt19937_64 rng(11);
  for (int t = 0; t < 50; ++t) {
    const CostFunction r = random_cost(rng, 1 + t % 6);
    const double c = 0.5 + t;
    const auto vs = ball_vertices(r, c);
    CHECK(vs.size() == static_cast<std::size_t>(2 * r.dimension()));
    for (const auto& x : vs) CHECK(r.cost(x) == doctest::Approx(c).epsilon(1e-12));
  }
}

TEST_CASE("unit cost directions") {
  const auto dirs = unit_cost_directions(CostFunction(vec({0, 0}), vec({1, 2})));
  REQUIRE(dirs.size() == 4);
  CHECK(dirs[0] == vec({1, 0}));
  CHECK(dirs[1] == vec({-1, 0}));
  CHECK(dirs[2] == vec({0, 0.5}));
  CHECK(dirs[3] == vec({0, -0.5}));

  const auto uniform = unit_cost_directions(CostFunction::uniform(Vector::Zero(5)));
  for (const Vector& e : uniform) {
    CHECK((e.array() != 0.0).count() == 1);
    CHECK(e.cwiseAbs().sum() == 1.0);
  }

  std::mt19937_64 rng(3);
  const CostFunction cf = random_cost(rng, 4);
  for (const Vector& e : unit_cost_directions(cf)) {
    CHECK(cf.cost(cf.target() + 3.0 * e) == doctest::Approx(3.0).epsilon(1e-12));
  }
}

TEST_CASE("subgradient") {
  CHECK(subgradient(CostFunction(vec({0, 0}), vec({1, 3})), vec({2, -1})) == vec({1, -3}));
  CHECK(subgradient(CostFunction(vec({0, 0}), vec({1, 3})), vec({0, 0})) == vec({0, 0}));
  CHECK(subgradient(CostFunction(vec({1, 1}), vec({2, 2})), vec({3, 1})) == vec({2, 0}));
}

TEST_CASE("separating halfspace") {
  const CostFunction cf(vec({0, 0}), vec({1, 1}));
  const Halfspace h = separating_halfspace(cf, vec({2, 0}), 1.0);
  CHECK(h.normal() == vec({1, 0}));
  CHECK(h.offset() == 2.0);
  CHECK(h.contains(vec({1, 0})));

  CHECK_THROWS_AS(separating_halfspace(cf, vec({1, 0}), 1.0), UsageError);
  CHECK_THROWS_AS(separating_halfspace(cf, vec({0.5, 0}), 1.0), UsageError);

  // y on an axis at C = cost(y)/2: y lies on the boundary.
  const Vector y = vec({0, -6});
  const Halfspace axis = separating_halfspace(cf, y, cf.cost(y) / 2);
  CHECK(axis.evaluate(y) == axis.offset());
}

TEST_CASE("separating halfspace contains every vertex of the cost ball") {
  // A linear function is maximised over the L1 ball at one of its vertices,
  // so checking the 2D vertices covers the whole ball.
  std::mt19937_64 rng(101);
  for (int t = 0; t < 100; ++t) {
    const Eigen::Index dim = 1 + t % 7;
    const CostFunction cf = random_cost(rng, dim);
    Vector y = random_point(rng, dim);
    const double cy = cf.cost(y);
    if (cy <= 1e-6) continue;
    std::uniform_real_distribution<double> frac(0.05, 0.999);
    const double c = frac(rng) * cy;
    const Halfspace h = separating_halfspace(cf, y, c);
    CHECK(h.evaluate(y) == doctest::Approx(h.offset()).epsilon(1e-12));
    for (const Instance& v : ball_vertices(cf, c)) CHECK(h.contains(v));
  }
}

TEST_CASE("halfspace rejects the zero normal") {
  CHECK_THROWS_AS(Halfspace(vec({0, 0}), 1.0), UsageError);
  const Halfspace h(vec({1, -1}), 0.5);
  CHECK(h.contains(vec({0.5, 0})));
  CHECK_FALSE(h.contains(vec({1, 0})));
}

TEST_CASE("symmetry and convexity of cost") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> lambda(0.0, 1.0);
  for (int t = 0; t < 500; ++t) {
    const Eigen::Index dim = 1 + t % 5;
    const CostFunction cf = random_cost(rng, dim);
    const Vector delta = random_point(rng, dim);
    CHECK(cf.cost(cf.target() + delta) == doctest::Approx(cf.cost(cf.target() - delta)).epsilon(1e-12));
    const Vector a = random_point(rng, dim);
    const Vector b = random_point(rng, dim);
    const double l = lambda(rng);
    CHECK(cf.cost(l * a + (1 - l) * b) <= l * cf.cost(a) + (1 - l) * cf.cost(b) + 1e-12);
  }
}

TEST_CASE("vertex extremality against sampling inside the ball") {
  // Independent check: dense random sampling in the ball never beats the
  // best vertex for any linear functional.
  std::mt19937_64 rng(17);
  std::exponential_distribution<double> expo(1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int t = 0; t < 30; ++t) {
    const Eigen::Index dim = 1 + t % 3;
    const CostFunction cf = random_cost(rng, dim);
    const double c = 0.5 + 3.0 * unif(rng);
    const Vector h = random_point(rng, dim, 1.0);
    double best_vertex = -std::numeric_limits<double>::infinity();
    for (const Instance& v : ball_vertices(cf, c)) best_vertex = std::max(best_vertex, h.dot(v));
    double best_sample = -std::numeric_limits<double>::infinity();
    for (int s = 0; s < 4000; ++s) {
      // Uniform point of the unit L1 ball via Dirichlet weights and signs.
      Vector w(dim + 1);
      for (Eigen::Index d = 0; d <= dim; ++d) w[d] = expo(rng);
      w /= w.sum();
      Vector x = cf.target();
      for (Eigen::Index d = 0; d < dim; ++d) {
        x[d] += (unif(rng) < 0.5 ? -1.0 : 1.0) * c * w[d] / cf.weights()[d];
      }
      REQUIRE(cf.cost(x) <= c * (1 + 1e-12));
      best_sample = std::max(best_sample, h.dot(x));
    }
    CHECK(best_sample <= best_vertex + 1e-9);
    CHECK(best_sample >= best_vertex - 0.2 * std::abs(best_vertex) - 0.2);
  }
}
