#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "../oracle/brute_force.hpp"
#include "stpete/criteria.hpp"
#include "stpete/error.hpp"

using namespace stpete;

namespace {

// Frozen from tests/oracle/mp_oracle.py.
struct FrozenRoot {
  double wealth;
  double price;
};
constexpr FrozenRoot kBreakEven[] = {
    {10.0, 2.8837618245819008992},
    {100.0, 4.360194029785506665},
    {1000.0, 5.9680173444596994412},
    {10000.0, 7.617581141116640173},
};
constexpr double kStake100 = 4.2048090167218782368;
constexpr double kMengerPrice100 = 63.21205588285576784;

}  // namespace

TEST_CASE("decision reports") {
  SUBCASE("modest price on the original lottery") {
    const auto report = evaluate(PlayerState(100, 2), GambleSpec::bernoulli());
    CHECK(report.naive_expected_payout.diverges_positive());
    CHECK(report.ensemble_growth.diverges_positive());
    CHECK(*report.time_growth.value() > 0.0);
    CHECK(*report.bernoulli_literal.value() > 0.0);
    CHECK(report.recommendation == Recommendation::Buy);
  }
  SUBCASE("expensive ticket is refused although the ensemble average diverges") {
    const auto report = evaluate(PlayerState(100, 10), GambleSpec::bernoulli());
    CHECK(report.ensemble_growth.diverges_positive());
    CHECK(*report.time_growth.value() < 0.0);
    CHECK(report.recommendation == Recommendation::DontBuy);
  }
  SUBCASE("bankrupting price") {
    const auto report = evaluate(PlayerState(1.5, 2.6), GambleSpec::bernoulli());
    CHECK(report.time_growth.undefined());
    CHECK(report.bernoulli_literal.undefined());
    CHECK(report.recommendation == Recommendation::Undefined);
  }
  SUBCASE("menger") {
    const auto report = evaluate(PlayerState(100, 50), GambleSpec::menger());
    CHECK(report.time_growth.diverges_positive());
    CHECK(report.recommendation == Recommendation::BuyAtAnyNonBankruptingPrice);
  }
  SUBCASE("recommendation table") {
    CHECK(recommend({Converged{0.1, 0.0}, 3}) == Recommendation::Buy);
    CHECK(recommend({Converged{0.0, 0.0}, 3}) == Recommendation::DontBuy);
    CHECK(recommend({DivergesNegative{}, 3}) == Recommendation::DontBuy);
    CHECK(recommend({Undefined{UndefinedReason::BankruptcyTerm}, 0}) == Recommendation::Undefined);
    CHECK(to_string(Recommendation::BuyAtAnyNonBankruptingPrice) == "BuyAtAnyNonBankruptingPrice");
  }
}

TEST_CASE("break-even price") {
  const auto spec = GambleSpec::bernoulli();
  const TruncationPolicy policy;
  for (const auto& [w, frozen] : kBreakEven) {
    CAPTURE(w);
    const double c = breakeven_price(w, spec, policy, 1e-10);
    CHECK(std::abs(c - frozen) <= 1e-8);
    CHECK(std::abs(c - static_cast<double>(oracle::breakeven(w))) <= 1e-8);
    CHECK(std::abs(static_cast<double>(oracle::g_bar(w, c))) <= 1e-10);
    CHECK(c < w + 1.0);
    CHECK(c > 1.0);
  }

  // Below wealth 2 the break-even price can fall under the smallest payout.
  const double small = breakeven_price(1.0 + 1e-3, spec, policy, 1e-10);
  CHECK(small > 0.0);
  CHECK(small < 2.001);

  try {
    (void)breakeven_price(5.0, GambleSpec::table({{1.0, 0.0}}), policy, 1e-10);
    FAIL("expected NoSignChange");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NoSignChange);
  }
  CHECK_THROWS_AS((void)breakeven_price(5.0, spec, policy, 0.0), Error);
  CHECK_THROWS_AS((void)breakeven_price(-5.0, spec, policy, 1e-10), Error);
}

TEST_CASE("break-even price on a payout table matches the closed form") {
  // Certain payout m: ln((w − c + m)/w) = 0 exactly at c = m.
  const double c = breakeven_price(10.0, GambleSpec::table({{1.0, 3.5}}), {}, 1e-12);
  CHECK(c == doctest::Approx(3.5).epsilon(1e-11));
}

TEST_CASE("break-even curve") {
  const auto curve = breakeven_curve(1.0, 1e6, 25, GambleSpec::bernoulli(), {}, 1e-10);
  REQUIRE(curve.points.size() == 25u);
  CHECK(curve.points.front().wealth == doctest::Approx(1.0));
  CHECK(curve.points.back().wealth == doctest::Approx(1e6));
  for (std::size_t i = 0; i < curve.points.size(); ++i) {
    const auto& pt = curve.points[i];
    REQUIRE(pt.breakeven_price.has_value());
    CHECK(pt.error.empty());
    if (i > 0) CHECK(*pt.breakeven_price >= *curve.points[i - 1].breakeven_price);
  }
  CHECK(curve.solver_tolerance == 1e-10);

  const auto failing = breakeven_curve(1.0, 10.0, 3, GambleSpec::table({{1.0, 0.0}}), {}, 1e-10);
  for (const auto& pt : failing.points) {
    CHECK_FALSE(pt.breakeven_price.has_value());
    CHECK_FALSE(pt.error.empty());
  }

  CHECK_THROWS_AS((void)breakeven_curve(10.0, 1.0, 5, GambleSpec::bernoulli(), {}, 1e-10), Error);
  CHECK_THROWS_AS((void)breakeven_curve(1.0, 10.0, 1, GambleSpec::bernoulli(), {}, 1e-10), Error);
  CHECK_THROWS_AS((void)breakeven_curve(0.0, 10.0, 5, GambleSpec::bernoulli(), {}, 1e-10), Error);
}

TEST_CASE("bernoulli's stake") {
  const auto result = bernoulli_stake(100.0, GambleSpec::bernoulli(), {}, 1e-12);
  REQUIRE(std::holds_alternative<StakePrice>(result));
  const double c = std::get<StakePrice>(result).price;
  CHECK(std::abs(c - kStake100) <= 1e-9);
  // Gains do not depend on the price, so the root is w·(1 − e^{−G}) with G = ḡ(w, 0).
  const double gains = static_cast<double>(oracle::g_bar(100.0, 0.0));
  CHECK(std::abs(c - 100.0 * -std::expm1(-gains)) <= 1e-9);

  CHECK(std::holds_alternative<NeverZero>(bernoulli_stake(100.0, GambleSpec::menger(), {}, 1e-10)));
}

TEST_CASE("menger partial-sum price") {
  CHECK(std::abs(menger_partial_sum_price(100.0, 1) - kMengerPrice100) <= 1e-12);

  double previous = 0.0;
  for (int n = 1; n <= 60; ++n) {
    const double c = menger_partial_sum_price(100.0, n);
    CHECK(c < 100.0);
    if (n <= 36) CHECK(c > previous);
    previous = c;
  }
  for (int n : {1, 5, 10, 30}) {
    CAPTURE(n);
    const double root = static_cast<double>(oracle::menger_partial_sum_root(100.0L, n));
    CHECK(std::abs(menger_partial_sum_price(100.0, n) - root) <= 1e-10);
  }
  CHECK_THROWS_AS((void)menger_partial_sum_price(100.0, 0), Error);
  CHECK_THROWS_AS((void)menger_partial_sum_price(0.0, 3), Error);
}

TEST_CASE("log-spaced grid") {
  const auto grid = log_spaced_grid(1.0, 1e6, 7);
  REQUIRE(grid.size() == 7u);
  for (int i = 0; i < 7; ++i) CHECK(grid[static_cast<std::size_t>(i)] == std::pow(10.0, i));
  const auto odd = log_spaced_grid(1.001, 1.1, 5);
  CHECK(odd.front() == 1.001);
  CHECK(odd.back() == 1.1);
  CHECK(std::is_sorted(odd.begin(), odd.end()));
  CHECK_THROWS_AS((void)log_spaced_grid(1.0, 1.0, 3), Error);
  CHECK_THROWS_AS((void)log_spaced_grid(1.0, 2.0, 1), Error);
}
