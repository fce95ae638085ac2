#include "stpete/criteria.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "stpete/error.hpp"

namespace stpete {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kMaxBisections = 200;

// Converged values map to themselves; divergence and undefined regions map to
// ±inf so that the solvers can treat them as signs.
double signed_value(const SeriesResult& r) {
  return std::visit(
      [](const auto& c) -> double {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, Converged>) {
          return c.value;
        } else if constexpr (std::is_same_v<T, DivergesPositive>) {
          return kInf;
        } else {
          return -kInf;
        }
      },
      r.classification);
}

// Solver evaluations run with a tail tolerance far below the solver tolerance,
// so truncation does not shift the root.
TruncationPolicy tightened(const TruncationPolicy& policy, double solver_tol) {
  TruncationPolicy tight = policy;
  tight.tolerance = std::max(std::min(policy.tolerance, 1e-6 * solver_tol), 1e-300);
  return tight;
}

// Requires f(lo) > 0 ≥ f(hi). Bisects to the resolution of double.
template <class F>
double bisect(const F& f, double lo, double hi) {
  double f_lo = f(lo);
  double f_hi = f(hi);
  for (int i = 0; i < kMaxBisections; ++i) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    const double f_mid = f(mid);
    if (f_mid == 0.0) return mid;
    if (f_mid > 0.0) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
      f_hi = f_mid;
    }
  }
  return std::abs(f_lo) <= std::abs(f_hi) ? lo : hi;
}

void require_solver_tol(double solver_tol) {
  if (!(solver_tol > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "solver tolerance must be positive");
  }
}

}  // namespace

std::string_view to_string(Recommendation r) noexcept {
  switch (r) {
    case Recommendation::Buy: return "Buy";
    case Recommendation::DontBuy: return "DontBuy";
    case Recommendation::BuyAtAnyNonBankruptingPrice: return "BuyAtAnyNonBankruptingPrice";
    case Recommendation::Undefined: return "Undefined";
  }
  return "Unknown";
}

Recommendation recommend(const SeriesResult& time_growth) noexcept {
  return std::visit(
      [](const auto& c) {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, Converged>) {
          return c.value > 0.0 ? Recommendation::Buy : Recommendation::DontBuy;
        } else if constexpr (std::is_same_v<T, DivergesPositive>) {
          return Recommendation::BuyAtAnyNonBankruptingPrice;
        } else if constexpr (std::is_same_v<T, DivergesNegative>) {
          return Recommendation::DontBuy;
        } else {
          return Recommendation::Undefined;
        }
      },
      time_growth.classification);
}

DecisionReport evaluate(const PlayerState& state, const GambleSpec& spec,
                        const TruncationPolicy& policy) {
  DecisionReport report{
      expected_payout(spec, state.wealth(), policy),
      ensemble_average_growth(state, spec, policy),
      time_average_growth(state, spec, policy),
      bernoulli_literal_lhs(state, spec, policy),
      Recommendation::Undefined,
  };
  report.recommendation = recommend(report.time_growth);
  return report;
}

double breakeven_price(double wealth, const GambleSpec& spec, const TruncationPolicy& policy,
                       double solver_tol) {
  require_solver_tol(solver_tol);
  const PlayerState probe(wealth, 0.0);
  const TruncationPolicy tight = tightened(policy, solver_tol);
  const auto g_bar = [&](double price) {
    return signed_value(time_average_growth(PlayerState(wealth, price), spec, tight));
  };

  if (!(g_bar(0.0) > 0.0)) {
    throw Error(ErrorCode::NoSignChange, "time-average growth is not positive at zero price");
  }

  const double upper = bankruptcy_price(spec, probe.wealth()) - 1e-9;
  double lo = 0.0;
  double hi = -1.0;
  for (double c = wealth * 1e-6; c < upper; c *= 2.0) {
    if (g_bar(c) <= 0.0) {
      hi = c;
      break;
    }
    lo = c;
  }
  if (hi < 0.0) {
    if (!(upper > lo) || g_bar(upper) > 0.0) {
      throw Error(ErrorCode::NoSignChange,
                  "time-average growth stays positive up to the bankruptcy price");
    }
    hi = upper;
  }

  const double root = bisect(g_bar, lo, hi);
  const double residual = g_bar(root);
  if (!(std::abs(residual) <= solver_tol)) {
    throw Error(ErrorCode::SolverFailed,
                "bisection ended with residual " + std::to_string(residual));
  }
  return root;
}

std::vector<double> log_spaced_grid(double lo, double hi, int num_points) {
  if (!(lo > 0.0) || !(hi > lo) || !std::isfinite(hi)) {
    throw Error(ErrorCode::InvalidArgument, "grid needs 0 < lo < hi");
  }
  if (num_points < 2) throw Error(ErrorCode::InvalidArgument, "grid needs at least two points");
  // Base 10 so that decades land exactly on powers of ten.
  const double log_lo = std::log10(lo);
  const double step = (std::log10(hi) - log_lo) / (num_points - 1);
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(num_points));
  for (int i = 0; i < num_points; ++i) grid.push_back(std::pow(10.0, log_lo + i * step));
  grid.front() = lo;
  grid.back() = hi;
  return grid;
}

BreakEvenCurve breakeven_curve(double w_min, double w_max, int num_points,
                               const GambleSpec& spec, const TruncationPolicy& policy,
                               double solver_tol) {
  if (!(w_min > 0.0) || !(w_max > w_min)) {
    throw Error(ErrorCode::InvalidArgument, "breakeven curve needs 0 < w_min < w_max");
  }
  if (num_points < 2) {
    throw Error(ErrorCode::InvalidArgument, "breakeven curve needs at least two points");
  }
  require_solver_tol(solver_tol);

  BreakEvenCurve curve{{}, solver_tol};
  curve.points.reserve(static_cast<std::size_t>(num_points));
  for (double w : log_spaced_grid(w_min, w_max, num_points)) {
    BreakEvenPoint point{w, std::nullopt, {}};
    try {
      point.breakeven_price = breakeven_price(w, spec, policy, solver_tol);
    } catch (const Error& e) {
      point.error = e.what();
    }
    curve.points.push_back(std::move(point));
  }
  return curve;
}

StakeResult bernoulli_stake(double wealth, const GambleSpec& spec,
                            const TruncationPolicy& policy, double solver_tol) {
  require_solver_tol(solver_tol);
  const TruncationPolicy tight = tightened(policy, solver_tol);
  const SeriesResult gains = time_average_growth(PlayerState(wealth, 0.0), spec, tight);
  if (gains.diverges_positive()) return NeverZero{};
  if (!gains.converged()) return StakeUndefined{};
  if (!(*gains.value() > 0.0)) {
    throw Error(ErrorCode::NoSignChange, "expected utility gain at zero price is not positive");
  }

  const auto lhs = [&](double price) {
    return signed_value(bernoulli_literal_lhs(PlayerState(wealth, price), spec, tight));
  };
  // The purchase loss ln w − ln(w − c) grows without bound as c → w.
  double lo = 0.0;
  double hi = -1.0;
  for (int k = 1; k <= 60; ++k) {
    const double c = wealth * -std::expm1(-std::log(2.0) * k);
    if (!(c < wealth)) break;
    if (lhs(c) <= 0.0) {
      hi = c;
      break;
    }
    lo = c;
  }
  if (hi < 0.0) {
    throw Error(ErrorCode::NoSignChange, "literal criterion stays positive below wealth");
  }
  const double root = bisect(lhs, lo, hi);
  if (!(std::abs(lhs(root)) <= solver_tol)) {
    throw Error(ErrorCode::SolverFailed, "bisection on the literal criterion did not converge");
  }
  return StakePrice{root};
}

double menger_partial_sum_price(double wealth, int n_max) {
  if (!(wealth > 0.0) || !std::isfinite(wealth)) {
    throw Error(ErrorCode::InvalidArgument, "wealth must be positive and finite");
  }
  if (n_max < 1) throw Error(ErrorCode::InvalidArgument, "n_max must be >= 1");
  const double price = -wealth * std::expm1(-static_cast<double>(n_max));
  return price < wealth ? price : std::nextafter(wealth, 0.0);
}

}  // namespace stpete
