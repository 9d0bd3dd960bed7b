#include "evasion/errors.hpp"
#include "evasion/search_bounds.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace evasion;

namespace {

constexpr SearchMode mult = SearchMode::multiplicative;
constexpr SearchMode add = SearchMode::additive;

// Plain counting loop, independent of the closed form: how many halvings of
// log2(gap) until the gap is within 1+eps.
std::int64_t halvings(double c_plus, double c_minus, double eps) {
  double log_gap = std::log2(c_minus / c_plus);
  const double goal = std::log2(1.0 + eps);
  std::int64_t n = 0;
  while (log_gap > goal) {
    log_gap /= 2;
    ++n;
  }
  return n;
}

}  // namespace

TEST_CASE("gaps") {
  CHECK(multiplicative_gap(SearchBounds(1, 8)) == 8.0);
  CHECK(multiplicative_gap(SearchBounds(2, 2)) == 1.0);
  CHECK(multiplicative_gap(SearchBounds(0.5, 1.5)) == 3.0);
  CHECK(additive_gap(SearchBounds(1, 9, add)) == 8.0);
  CHECK(additive_gap(SearchBounds(3, 3, add)) == 0.0);
  CHECK(additive_gap(SearchBounds(0.25, 1, add)) == 0.75);
}

TEST_CASE("proposals") {
  CHECK(propose(SearchBounds(1, 16)) == 4.0);
  CHECK(propose(SearchBounds(1, 9, add)) == 5.0);
  CHECK(propose(SearchBounds(4, 4)) == 4.0);
  CHECK(proposal_stalled(SearchBounds(4, 4), 4.0));
  CHECK_FALSE(proposal_stalled(SearchBounds(1, 16), 4.0));
}

TEST_CASE("termination") {
  CHECK(terminated(SearchBounds(1, 1.4), 0.5));
  CHECK_FALSE(terminated(SearchBounds(1, 2), 0.5));
  CHECK(terminated(SearchBounds(1, 2.9, add), 2.0));
  CHECK_THROWS_AS(terminated(SearchBounds(1, 2), 0.0), UsageError);
}

TEST_CASE("bounds validation and monotonicity") {
  CHECK_THROWS_AS(SearchBounds(0, 1, mult), UsageError);
  CHECK_NOTHROW(SearchBounds(0, 1, add));
  CHECK_THROWS_AS(SearchBounds(2, 1), UsageError);
  SearchBounds b(1, 16);
  b.raise_lower(2);
  CHECK(b.lower() == 2.0);
  CHECK_THROWS_AS(b.raise_lower(1.5), UsageError);
  b.lower_upper(8);
  CHECK(b.upper() == 8.0);
  CHECK_THROWS_AS(b.lower_upper(9), UsageError);
  CHECK_THROWS_AS(b.lower_upper(1), UsageError);
}

TEST_CASE("multiplicative step count") {
  CHECK(steps_required_multiplicative(1, 16, 3) == 1);
  CHECK(steps_required_multiplicative(1, 8, 1) == 2);
  CHECK(steps_required_multiplicative(1, 100, 0.05) == 7);
  CHECK(steps_required_multiplicative(1, 1.2, 0.5) == 0);
  CHECK(steps_required_multiplicative(3, 3, 0.5) == 0);
  CHECK_THROWS_AS(steps_required_multiplicative(0, 8, 1), UsageError);
  CHECK_THROWS_AS(steps_required_multiplicative(8, 1, 1), UsageError);
  CHECK_THROWS_AS(steps_required_multiplicative(1, 8, 0), UsageError);

  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 2000; ++t) {
    const double c_plus = std::exp(-5 + 10 * u(rng));
    const double c_minus = c_plus * std::exp(12 * u(rng));
    const double eps = std::exp(-6 + 7 * u(rng));
    CHECK(steps_required_multiplicative(c_plus, c_minus, eps) == halvings(c_plus, c_minus, eps));
  }
}

TEST_CASE("additive step count") {
  CHECK(steps_required_additive(1, 9, 2) == 2);
  CHECK(steps_required_additive(1, 1, 0.3) == 0);
  CHECK(steps_required_additive(0, 1024, 1) == 10);
  CHECK_THROWS_AS(steps_required_additive(2, 1, 1), UsageError);
  CHECK_THROWS_AS(steps_required_additive(1, 2, 0), UsageError);
}

TEST_CASE("simulated multiplicative search brackets the threshold within L proposals") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 500; ++t) {
    const double c_plus = std::exp(-3 + 6 * u(rng));
    const double c_minus = c_plus * std::exp(0.1 + 10 * u(rng));
    const double eps = std::exp(-5 + 5 * u(rng));
    const double theta = c_plus * std::pow(c_minus / c_plus, u(rng));
    SearchBounds b(c_plus, c_minus);
    std::int64_t proposals = 0;
    while (!terminated(b, eps)) {
      const double c = propose(b);
      if (proposal_stalled(b, c)) break;
      const double before = std::log2(multiplicative_gap(b));
      if (c >= theta) {
        b.lower_upper(c);
      } else {
        b.raise_lower(c);
      }
      CHECK(std::log2(multiplicative_gap(b)) == doctest::Approx(before / 2).epsilon(1e-12));
      ++proposals;
    }
    CHECK(proposals <= steps_required_multiplicative(c_plus, c_minus, eps));
    CHECK(b.lower() <= theta);
    CHECK(theta <= b.upper());
  }
}

TEST_CASE("additive search on log bounds reproduces the multiplicative proposals") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 200; ++t) {
    const double c_plus = std::exp(-3 + 6 * u(rng));
    const double c_minus = c_plus * std::exp(0.5 + 8 * u(rng));
    const double eps = std::exp(-4 + 4 * u(rng));
    const double theta = c_plus * std::pow(c_minus / c_plus, u(rng));
    SearchBounds m(c_plus, c_minus);
    // log coordinates relative to C+ so the additive lower bound starts at 0
    const auto to_log = [&](double c) { return std::log2(c / c_plus); };
    SearchBounds a(0.0, to_log(c_minus), add);
    const double eta = std::log2(1 + eps);
    while (!terminated(m, eps)) {
      REQUIRE_FALSE(terminated(a, eta * (1 + 1e-9)));
      const double pm = propose(m);
      const double pa = c_plus * std::exp2(propose(a));
      CHECK(pa == doctest::Approx(pm).epsilon(1e-9));
      if (pm >= theta) {
        m.lower_upper(pm);
        a.lower_upper(std::min(a.upper(), std::max(a.lower(), to_log(pm))));
      } else {
        m.raise_lower(pm);
        a.raise_lower(std::max(a.lower(), std::min(a.upper(), to_log(pm))));
      }
    }
  }
}
