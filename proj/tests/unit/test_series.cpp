#include <doctest.h>

#include <cmath>
#include <random>

#include "../oracle/brute_force.hpp"
#include "stpete/error.hpp"
#include "stpete/series.hpp"

using namespace stpete;

namespace {

// Frozen from tests/oracle/mp_oracle.py (50-digit arithmetic, 200 terms).
constexpr double kGBar100_2 = 0.023483493674154466369;
constexpr double kSqrtChange100_2 = 0.16617398555250193127;

double value_of(const SeriesResult& r) {
  REQUIRE(r.converged());
  return *r.value();
}

double tail_of(const SeriesResult& r) { return std::get<Converged>(r.classification).tail_bound; }

}  // namespace

TEST_CASE("expected payout") {
  SUBCASE("bernoulli diverges") {
    const auto r = expected_payout(GambleSpec::bernoulli(), 100.0);
    CHECK(r.diverges_positive());
    const auto slow = expected_payout(GambleSpec::bernoulli(0.3), 1.0);
    CHECK(slow.diverges_positive());
  }
  SUBCASE("cap at 1e9 yields exactly 15") {
    const auto r = expected_payout(GambleSpec::capped(1e9), 100.0);
    CHECK(value_of(r) == 15.0);
    CHECK(tail_of(r) <= 1e-10);
  }
  SUBCASE("clamped cap keeps paying the cap") {
    const auto r = expected_payout(GambleSpec::capped(1e9, CapMode::Clamp), 100.0);
    // Frozen: 15 + 1e9·2^-30.
    CHECK(std::abs(value_of(r) - 15.931322574615478516) <= tail_of(r));
  }
  SUBCASE("certainty table") {
    CHECK(value_of(expected_payout(GambleSpec::table({{1.0, 5.0}}), 3.0)) == 5.0);
  }
  SUBCASE("fast-decaying probabilities converge") {
    // Σ p·(2q)^(n−1) = p/(1 − 2q) = 1.5 for p = 3/4.
    const auto r = expected_payout(GambleSpec::bernoulli(0.75), 1.0);
    CHECK(value_of(r) == doctest::Approx(1.5).epsilon(1e-10));
  }
  SUBCASE("menger payouts overflow into divergence") {
    CHECK(expected_payout(GambleSpec::menger(), 100.0).diverges_positive());
  }
}

TEST_CASE("bernoulli payout partial sums are N/2") {
  const auto spec = GambleSpec::bernoulli();
  double partial = 0.0;
  for (int n = 1; n <= 200; ++n) {
    partial += probability(spec, n) * payout(spec, n, 1.0);
    CHECK(partial == 0.5 * n);
  }
}

TEST_CASE("time-average growth") {
  const auto spec = GambleSpec::bernoulli();
  SUBCASE("free ticket grows") {
    CHECK(value_of(time_average_growth(PlayerState(100, 0), spec)) > 0.0);
  }
  SUBCASE("bankruptcy region") {
    const auto r = time_average_growth(PlayerState(1.5, 2.6), spec);
    REQUIRE(r.undefined());
    CHECK(std::get<Undefined>(r.classification).reason == UndefinedReason::BankruptcyTerm);
    // Wealth after the worst outcome is exactly zero.
    CHECK(time_average_growth(PlayerState(1.0, 2.0), spec).undefined());
    CHECK(time_average_growth(PlayerState(1.0 + 1e-12, 2.0), spec).converged());
  }
  SUBCASE("matches the arbitrary-precision oracle") {
    const auto r = time_average_growth(PlayerState(100, 2), spec);
    CHECK(std::abs(value_of(r) - kGBar100_2) <= tail_of(r));
    CHECK(std::abs(value_of(r) - static_cast<double>(oracle::g_bar(100, 2))) <= 1e-10);
  }
  SUBCASE("menger diverges") {
    CHECK(time_average_growth(PlayerState(100, 2), GambleSpec::menger()).diverges_positive());
    // With fast-decaying probabilities Menger's log series converges: Σ p q^(n−1) 2^n at c = 0.
    const auto fast = GambleSpec::menger(0.75);
    // The sum is 1.5·Σ 2^-(n−1) = 3.
    const auto r = time_average_growth(PlayerState(3, 0), fast);
    CHECK(std::abs(value_of(r) - 3.0) <= tail_of(r));
  }
  SUBCASE("void cap turns the tail into a loss") {
    // Above the cap only the ticket is lost: ln((w − c)/w) for the remaining mass.
    CHECK(time_average_growth(PlayerState(10, 10), GambleSpec::capped(1e9)).undefined());
    CHECK(time_average_growth(PlayerState(10, 9.99), GambleSpec::capped(1e9)).converged());
  }
  SUBCASE("large wealth is not mistaken for divergence") {
    const auto r = time_average_growth(PlayerState(1e6, 2), spec);
    CHECK(value_of(r) == doctest::Approx(8.9371504867132020128e-6).epsilon(1e-6));
    const auto huge = time_average_growth(PlayerState(1e15, 999), spec);
    CHECK(huge.converged());
  }
}

TEST_CASE("time-average growth near the bankruptcy boundary") {
  // Frozen ḡ(1 + 10^-k, 2) from the arbitrary-precision oracle.
  constexpr double kNear[] = {-0.74463781262743724603, -1.8366374787786185034,
                              -2.9816962737444441222, -4.1323621964778093757};
  for (int k = 1; k <= 4; ++k) {
    const auto r = time_average_growth(PlayerState(1.0 + std::pow(10.0, -k), 2.0),
                                       GambleSpec::bernoulli());
    CHECK(std::abs(value_of(r) - kNear[k - 1]) <= tail_of(r));
  }
}

TEST_CASE("time-average growth is strictly decreasing in price") {
  std::mt19937_64 gen(17);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto spec = GambleSpec::bernoulli();
  for (int i = 0; i < 200; ++i) {
    const double w = std::pow(10.0, 6.0 * unit(gen));
    const double upper = w + 1.0;
    const double c1 = upper * 0.98 * unit(gen);
    const double c2 = c1 + (upper - c1) * 0.5 * unit(gen) + 1e-6;
    const auto a = time_average_growth(PlayerState(w, c1), spec);
    const auto b = time_average_growth(PlayerState(w, c2), spec);
    if (a.converged() && b.converged()) CHECK(*a.value() > *b.value());
  }
}

TEST_CASE("tail bounds are sound") {
  // Summing twice as many terms directly must stay within the reported bound.
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto spec = GambleSpec::bernoulli();
  for (int i = 0; i < 100; ++i) {
    const double w = std::pow(10.0, 5.0 * unit(gen));
    const double c = (w + 1.0) * 0.9 * unit(gen);
    TruncationPolicy loose;
    loose.tolerance = 1e-6;
    const auto r = time_average_growth(PlayerState(w, c), spec, loose);
    REQUIRE(r.converged());
    long double longer = 0.0L;
    for (std::size_t n = 1; n <= 2 * r.terms_used; ++n) {
      const int k = static_cast<int>(n);
      longer += std::ldexp(1.0L, -k) *
                (std::log(static_cast<long double>(w) - c + std::ldexp(1.0L, k - 1)) -
                 std::log(static_cast<long double>(w)));
    }
    CHECK(std::abs(static_cast<double>(longer) - *r.value()) <= tail_of(r) + 1e-14);
  }
}

TEST_CASE("ensemble-average growth") {
  CHECK(ensemble_average_growth(PlayerState(100, 2), GambleSpec::bernoulli()).diverges_positive());
  CHECK(ensemble_average_growth(PlayerState(1.5, 2.6), GambleSpec::bernoulli())
            .diverges_positive());
  CHECK(value_of(ensemble_average_growth(PlayerState(100, 2), GambleSpec::table({{1.0, 2.0}}))) ==
        0.0);
  const auto capped = ensemble_average_growth(PlayerState(100, 2), GambleSpec::capped(1e9));
  CHECK(value_of(capped) == doctest::Approx(std::log1p(0.13)).epsilon(1e-14));

  // Brute-force partial sums of p_n·r_n for the capped rule agree.
  double inner = 0.0;
  const auto spec = GambleSpec::capped(1e9);
  for (int n = 1; n <= 200; ++n) inner += probability(spec, n) * growth_factor(PlayerState(100, 2), spec, n);
  CHECK(value_of(capped) == doctest::Approx(std::log(inner)).epsilon(1e-12));

  const auto negative = ensemble_average_growth(PlayerState(1, 2), GambleSpec::table({{1.0, 0.0}}));
  REQUIRE(negative.undefined());
  CHECK(std::get<Undefined>(negative.classification).reason ==
        UndefinedReason::NonpositiveLogArgument);
}

TEST_CASE("expected utility change") {
  const auto spec = GambleSpec::bernoulli();
  SUBCASE("log utility reproduces the time average") {
    const auto u = expected_utility_change(PlayerState(100, 2), spec, LogUtility{});
    const auto g = time_average_growth(PlayerState(100, 2), spec);
    CHECK(std::abs(value_of(u) - value_of(g)) <= 1e-12);
  }
  SUBCASE("sqrt utility") {
    const auto zero = expected_utility_change(PlayerState(7, 0), GambleSpec::table({{1.0, 0.0}}),
                                              SqrtUtility{});
    CHECK(value_of(zero) == 0.0);
    const auto s = expected_utility_change(PlayerState(100, 2), spec, SqrtUtility{});
    CHECK(std::abs(value_of(s) - kSqrtChange100_2) <= tail_of(s) + 1e-14);
    CHECK(std::abs(value_of(s) - static_cast<double>(oracle::sqrt_change(100, 2))) <= 1e-10);
  }
  SUBCASE("custom utility") {
    const CustomUtility ln{[](double x) { return std::log(x); }};
    for (double w : {2.0, 100.0, 1e6}) {
      const auto custom = expected_utility_change(PlayerState(w, 1.5), spec, ln);
      const auto g = time_average_growth(PlayerState(w, 1.5), spec);
      CHECK(value_of(custom) == doctest::Approx(value_of(g)).epsilon(1e-9));
    }
    // Linear utility on an unbounded payout: the expected payout diverges.
    const CustomUtility linear{[](double x) { return x; }};
    CHECK(expected_utility_change(PlayerState(100, 2), spec, linear).diverges_positive());
    const CustomUtility negative_square{[](double x) { return -x * x; }};
    CHECK(std::holds_alternative<DivergesNegative>(
        expected_utility_change(PlayerState(100, 2), spec, negative_square).classification));
    CHECK_THROWS_AS(expected_utility_change(PlayerState(1, 0), spec, CustomUtility{}), Error);
  }
  SUBCASE("bankruptcy is outside every utility's domain") {
    for (const Utility& u : {Utility{LogUtility{}}, Utility{SqrtUtility{}}}) {
      const auto r = expected_utility_change(PlayerState(1.5, 2.6), spec, u);
      REQUIRE(r.undefined());
      CHECK(std::get<Undefined>(r.classification).reason == UndefinedReason::BankruptcyTerm);
    }
  }
}

TEST_CASE("log-utility identity holds across wealth, price and rule") {
  std::mt19937_64 gen(23);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const GambleSpec specs[] = {GambleSpec::bernoulli(), GambleSpec::bernoulli(0.3),
                              GambleSpec::capped(1e6), GambleSpec::capped(50, CapMode::Clamp),
                              GambleSpec::menger(),
                              GambleSpec::table({{0.2, 0.0}, {0.3, 3.0}, {0.5, 40.0}})};
  for (const auto& spec : specs) {
    for (int i = 0; i < 60; ++i) {
      const double w = std::pow(10.0, -1.0 + 7.0 * unit(gen));
      const double c = 1.3 * w * unit(gen);
      const PlayerState state(w, c);
      const auto u = expected_utility_change(state, spec, LogUtility{});
      const auto g = time_average_growth(state, spec);
      CHECK(u.kind() == g.kind());
      if (u.converged() && g.converged()) CHECK(std::abs(*u.value() - *g.value()) <= 1e-12);
    }
  }
}

TEST_CASE("bernoulli's literal criterion") {
  const auto spec = GambleSpec::bernoulli();
  CHECK(value_of(bernoulli_literal_lhs(PlayerState(100, 0), spec)) > 0.0);
  for (double c : {100.0, 150.0}) {
    const auto r = bernoulli_literal_lhs(PlayerState(100, c), spec);
    REQUIRE(r.undefined());
    CHECK(std::get<Undefined>(r.classification).reason == UndefinedReason::NonpositiveLogArgument);
  }
  CHECK(bernoulli_literal_lhs(PlayerState(100, 2), GambleSpec::menger()).diverges_positive());
  CHECK(bernoulli_literal_lhs(PlayerState(100, 99.999), GambleSpec::menger()).diverges_positive());

  // Price enters only through the purchase loss.
  const double gains = value_of(bernoulli_literal_lhs(PlayerState(100, 0), spec));
  const double with_price = value_of(bernoulli_literal_lhs(PlayerState(100, 30), spec));
  CHECK(with_price == doctest::Approx(gains + std::log(70.0 / 100.0)).epsilon(1e-13));
}

TEST_CASE("menger gain terms are each exactly one") {
  const auto spec = GambleSpec::menger();
  for (double w : {0.01, 1.0, 100.0, 1e9}) {
    double partial = 0.0;
    for (int n = 1; n <= 60; ++n) {
      partial += probability(spec, n) * *log_growth_factor(PlayerState(w, 0), spec, n);
      CHECK(std::abs(partial - n) <= 1e-9);
    }
  }
}

TEST_CASE("truncation policy") {
  TruncationPolicy bad;
  bad.tolerance = 0.0;
  CHECK_THROWS_AS(bad.validate(), Error);
  TruncationPolicy narrow;
  narrow.divergence_window = 1;
  CHECK_THROWS_AS(narrow.validate(), Error);
  TruncationPolicy short_cap;
  short_cap.max_terms = 8;
  short_cap.divergence_window = 16;
  CHECK_THROWS_AS(short_cap.validate(), Error);

  TruncationPolicy tiny;
  tiny.max_terms = 20;
  try {
    (void)time_average_growth(PlayerState(1e6, 2), GambleSpec::bernoulli(), tiny);
    FAIL("expected TruncationInconclusive");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::TruncationInconclusive);
  }
}
