#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "stpete/gamble.hpp"
#include "stpete/series.hpp"

namespace stpete {

enum class Recommendation { Buy, DontBuy, BuyAtAnyNonBankruptingPrice, Undefined };

std::string_view to_string(Recommendation r) noexcept;

struct DecisionReport {
  SeriesResult naive_expected_payout;
  SeriesResult ensemble_growth;
  SeriesResult time_growth;
  SeriesResult bernoulli_literal;
  Recommendation recommendation;
};

/// The decision follows the time-average growth rate alone:
///   Converged > 0      -> Buy
///   Converged ≤ 0      -> DontBuy
///   DivergesPositive   -> BuyAtAnyNonBankruptingPrice
///   DivergesNegative   -> DontBuy
///   Undefined          -> Undefined
Recommendation recommend(const SeriesResult& time_growth) noexcept;

DecisionReport evaluate(const PlayerState& state, const GambleSpec& spec,
                        const TruncationPolicy& policy = {});

/// Price c* at which ḡ(wealth, c*) = 0, by bisection on a bracket found by a
/// geometric scan towards the bankruptcy price.
double breakeven_price(double wealth, const GambleSpec& spec, const TruncationPolicy& policy,
                       double solver_tol);

/// `num_points` logarithmically spaced values from lo to hi, endpoints exact.
std::vector<double> log_spaced_grid(double lo, double hi, int num_points);

struct BreakEvenPoint {
  double wealth;
  std::optional<double> breakeven_price;
  std::string error;  // empty when solved
};

struct BreakEvenCurve {
  std::vector<BreakEvenPoint> points;
  double solver_tolerance;
};

/// Solves breakeven_price on `num_points` log-spaced wealths in [w_min, w_max].
/// Points that fail keep their wealth and carry the error message instead.
BreakEvenCurve breakeven_curve(double w_min, double w_max, int num_points,
                               const GambleSpec& spec, const TruncationPolicy& policy,
                               double solver_tol);

struct StakePrice {
  double price;
};
/// The literal left-hand side diverges positively for every price below wealth.
struct NeverZero {};
struct StakeUndefined {};
using StakeResult = std::variant<StakePrice, NeverZero, StakeUndefined>;

/// Price in (0, wealth) at which the literal two-step log-utility criterion is zero.
StakeResult bernoulli_stake(double wealth, const GambleSpec& spec,
                            const TruncationPolicy& policy, double solver_tol);

/// Price c < w at which the Menger gain series truncated after n_max terms
/// (each term equal to one) balances the purchase loss: c = w·(1 − e^{−n_max}).
/// Once e^{−n_max} drops below double resolution the largest double below w is returned.
double menger_partial_sum_price(double wealth, int n_max);

}  // namespace stpete
