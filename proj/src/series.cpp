#include "stpete/series.hpp"

#include <cmath>
#include <deque>
#include <limits>
#include <string>

#include "stpete/error.hpp"
#include "summation.hpp"

namespace stpete {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kNever = std::numeric_limits<int>::max();

using TermFn = std::function<std::optional<double>(int n)>;
// Upper bound on |Σ_{n>N} t_n| given the N-th term, or +inf when none is known.
using TailFn = std::function<double(int N, double last_term)>;

struct SeriesPlan {
  TermFn term;
  TailFn tail;
  // First n at which the window tests may look at terms.
  int regime_start = 1;
  // Fall back to a ratio-based tail estimate when `tail` has no certificate.
  bool empirical_tail = false;
  UndefinedReason undefined_reason = UndefinedReason::NonpositiveLogArgument;
};

enum class Functional { Payout, LogGrowth, SqrtUtility, Custom };

bool window_non_decaying(const std::deque<double>& window) {
  const bool positive = window.front() > 0.0;
  for (std::size_t i = 0; i < window.size(); ++i) {
    const double t = window[i];
    if (positive ? !(t > 0.0) : !(t < 0.0)) return false;
    if (i > 0 && std::abs(t) < std::abs(window[i - 1]) * (1.0 - 1e-12)) return false;
  }
  return true;
}

double empirical_tail_estimate(const std::deque<double>& window) {
  double ratio = 0.0;
  for (std::size_t i = 1; i < window.size(); ++i) {
    if (window[i - 1] == 0.0 || (window[i] > 0.0) != (window[i - 1] > 0.0)) return kInf;
    ratio = std::max(ratio, std::abs(window[i] / window[i - 1]));
  }
  if (!(ratio < 1.0)) return kInf;
  return std::abs(window.back()) * ratio / (1.0 - ratio);
}

SeriesResult sum_series(const SeriesPlan& plan, const TruncationPolicy& policy) {
  policy.validate();
  detail::CompensatedSum sum;
  double magnitude = 0.0;  // Σ|term|, scales the rounding allowance
  std::deque<double> window;
  for (std::size_t k = 1; k <= policy.max_terms; ++k) {
    const int n = static_cast<int>(k);
    const auto term = plan.term(n);
    if (!term || std::isnan(*term)) return {Undefined{plan.undefined_reason}, k};
    if (std::isinf(*term)) {
      if (*term > 0.0) return {DivergesPositive{}, k};
      return {DivergesNegative{}, k};
    }
    sum.add(*term);
    magnitude += std::abs(*term);

    if (n >= plan.regime_start) {
      window.push_back(*term);
      if (window.size() > policy.divergence_window) window.pop_front();
    }
    const bool window_full = window.size() == policy.divergence_window;

    const double certified = plan.tail(n, *term);
    double bound = certified;
    if (std::isinf(bound) && plan.empirical_tail && window_full) {
      bound = empirical_tail_estimate(window);
    }
    // The truncation bound decides convergence. The reported bound also covers a
    // few ulps of rounding per term, so it stays valid when the tail is tiny.
    if (bound <= policy.tolerance) {
      const double rounding = 8.0 * std::numeric_limits<double>::epsilon() * magnitude;
      return {Converged{sum.value(), bound + rounding}, k};
    }

    if (std::isinf(bound) && window_full && window_non_decaying(window)) {
      if (window.back() > 0.0) return {DivergesPositive{}, k};
      return {DivergesNegative{}, k};
    }
  }
  throw Error(ErrorCode::TruncationInconclusive,
              "no convergence or divergence decision within " + std::to_string(policy.max_terms) +
                  " terms");
}

// Σ_{k≥N} k·q^k.
double weighted_geometric_tail(double q, int N) {
  const double qN = std::pow(q, N);
  return qN * (N * (1.0 - q) + q) / ((1.0 - q) * (1.0 - q));
}

// Smallest n whose payout reaches w + c, i.e. where payouts dominate the outcome.
// Bounded payouts (tables, caps) always end in a certified tail, so their terms
// never enter the window tests.
int payout_regime_start(const GambleSpec& spec, double w, double c, std::size_t max_terms) {
  if (!spec.is_geometric() || spec.cap_index()) return kNever;
  const int limit = static_cast<int>(std::min<std::size_t>(max_terms, 1100));
  for (int n = 1; n <= limit; ++n) {
    if (payout(spec, n, w) >= w + c) return n;
  }
  return kNever;
}

// Tail certificate for Σ p_n·f(m_n) where f is one of the supported functionals
// evaluated at post-round wealth w − c + m_n, relative to w.
TailFn tail_certificate(const GambleSpec& spec, Functional functional, double w, double c,
                        const TermFn& term) {
  if (auto size = spec.support_size()) {
    const int last = static_cast<int>(*size);
    return [last](int N, double) { return N >= last ? 0.0 : kInf; };
  }
  const double p = spec.geometric_p();
  const double q = 1.0 - p;

  if (auto cap = spec.cap_index()) {
    // Beyond the cap every outcome pays the same, so the tail is a geometric
    // series in the probabilities alone: Σ_{n>N} p_n = q^N.
    const int first_flat = *cap + 1;
    const auto flat_term = term(first_flat);
    const double flat_value =
        flat_term ? std::abs(*flat_term) / probability(spec, first_flat) : kInf;
    return [first_flat, flat_value, q](int N, double) {
      return N + 1 >= first_flat ? flat_value * std::pow(q, N) : kInf;
    };
  }

  if (std::holds_alternative<BernoulliOriginal>(spec.rule())) {
    switch (functional) {
      case Functional::Payout: {
        const double ratio = 2.0 * q;
        if (ratio >= 1.0) return [](int, double) { return kInf; };
        return [ratio](int, double last) { return last * ratio / (1.0 - ratio); };
      }
      case Functional::LogGrowth: {
        // For 2^N ≥ c every later term satisfies 0 ≤ ln r_n ≤ (n−1)·ln 2 + ln(1 + 1/w).
        const double offset = std::log1p(1.0 / w);
        return [p, q, c, offset](int N, double) {
          if (std::ldexp(1.0, N) < c) return kInf;
          return p * (std::log(2.0) * weighted_geometric_tail(q, N) +
                      offset * std::pow(q, N) / (1.0 - q));
        };
      }
      case Functional::SqrtUtility: {
        // 0 ≤ √(w − c + m) − √w ≤ √m once m ≥ c.
        const double ratio = q * std::sqrt(2.0);
        if (ratio >= 1.0) return [](int, double) { return kInf; };
        return [p, c, ratio](int N, double) {
          if (std::ldexp(1.0, N) < c) return kInf;
          return p * std::pow(ratio, N) / (1.0 - ratio);
        };
      }
      case Functional::Custom:
        return [](int, double) { return kInf; };
    }
  }

  if (spec.is_menger() && functional == Functional::LogGrowth && 2.0 * q < 1.0) {
    // 0 ≤ ln r_n ≤ 2^n once m_n ≥ c.
    return [&spec, p, q, w, c](int N, double) {
      if (payout(spec, N + 1, w) < c) return kInf;
      const double ratio = 2.0 * q;
      return 2.0 * p * std::pow(ratio, N) / (1.0 - ratio);
    };
  }
  return [](int, double) { return kInf; };
}

bool bankrupting(const PlayerState& state, const GambleSpec& spec) {
  return state.ticket_price() >= bankruptcy_price(spec, state.wealth());
}

SeriesResult utility_series(const PlayerState& state, const GambleSpec& spec,
                            Functional functional, std::function<double(double)> u,
                            const TruncationPolicy& policy) {
  if (bankrupting(state, spec)) return {Undefined{UndefinedReason::BankruptcyTerm}, 0};
  const double w = state.wealth();
  const double c = state.ticket_price();
  const double base = u(w);
  SeriesPlan plan;
  plan.undefined_reason = UndefinedReason::BankruptcyTerm;
  plan.term = [&spec, w, c, base, u](int n) -> std::optional<double> {
    const double after = w - c + payout(spec, n, w);
    if (after <= 0.0) return std::nullopt;
    return probability(spec, n) * (u(after) - base);
  };
  plan.tail = tail_certificate(spec, functional, w, c, plan.term);
  plan.regime_start = payout_regime_start(spec, w, c, policy.max_terms);
  plan.empirical_tail = functional == Functional::Custom;
  return sum_series(plan, policy);
}

}  // namespace

std::string_view to_string(UndefinedReason reason) noexcept {
  switch (reason) {
    case UndefinedReason::BankruptcyTerm: return "BankruptcyTerm";
    case UndefinedReason::NonpositiveLogArgument: return "NonpositiveLogArgument";
  }
  return "Unknown";
}

std::optional<double> SeriesResult::value() const noexcept {
  if (const auto* c = std::get_if<Converged>(&classification)) return c->value;
  return std::nullopt;
}

std::string_view SeriesResult::kind() const noexcept {
  switch (classification.index()) {
    case 0: return "Converged";
    case 1: return "DivergesPositive";
    case 2: return "DivergesNegative";
    default: return "Undefined";
  }
}

void TruncationPolicy::validate() const {
  if (!(tolerance > 0.0)) throw Error(ErrorCode::InvalidArgument, "tolerance must be > 0");
  if (divergence_window < 2 || max_terms < divergence_window) {
    throw Error(ErrorCode::InvalidArgument,
                "truncation policy requires max_terms >= divergence_window >= 2");
  }
}

SeriesResult expected_payout(const GambleSpec& spec, double wealth,
                             const TruncationPolicy& policy) {
  if (!(wealth > 0.0)) throw Error(ErrorCode::InvalidArgument, "wealth must be positive");
  SeriesPlan plan;
  plan.term = [&spec, wealth](int n) -> std::optional<double> {
    return probability(spec, n) * payout(spec, n, wealth);
  };
  plan.tail = tail_certificate(spec, Functional::Payout, wealth, 0.0, plan.term);
  plan.regime_start = payout_regime_start(spec, wealth, 0.0, policy.max_terms);
  return sum_series(plan, policy);
}

SeriesResult time_average_growth(const PlayerState& state, const GambleSpec& spec,
                                 const TruncationPolicy& policy) {
  if (bankrupting(state, spec)) return {Undefined{UndefinedReason::BankruptcyTerm}, 0};
  SeriesPlan plan;
  plan.undefined_reason = UndefinedReason::BankruptcyTerm;
  plan.term = [&state, &spec](int n) -> std::optional<double> {
    const auto log_r = log_growth_factor(state, spec, n);
    if (!log_r) return std::nullopt;
    return probability(spec, n) * *log_r;
  };
  plan.tail = tail_certificate(spec, Functional::LogGrowth, state.wealth(),
                               state.ticket_price(), plan.term);
  plan.regime_start =
      payout_regime_start(spec, state.wealth(), state.ticket_price(), policy.max_terms);
  return sum_series(plan, policy);
}

SeriesResult ensemble_average_growth(const PlayerState& state, const GambleSpec& spec,
                                     const TruncationPolicy& policy) {
  const double w = state.wealth();
  const double c = state.ticket_price();
  double total_probability = 1.0;
  if (const auto* table = std::get_if<Table>(&spec.rule())) {
    detail::CompensatedSum s;
    for (const auto& e : table->entries) s.add(e.probability);
    total_probability = s.value();
  }

  // Σ p_n·r_n = ((w − c)·Σ p_n + Σ p_n·m_n)/w.
  TruncationPolicy inner_policy = policy;
  for (int attempt = 0; attempt < 2; ++attempt) {
    const SeriesResult payout_sum = expected_payout(spec, w, inner_policy);
    const auto* converged = std::get_if<Converged>(&payout_sum.classification);
    if (converged == nullptr) return payout_sum;

    const double excess = ((w - c) * total_probability - w + converged->value) / w;
    const double inner = 1.0 + excess;
    if (inner <= 0.0) {
      return {Undefined{UndefinedReason::NonpositiveLogArgument}, payout_sum.terms_used};
    }
    const double inner_tail = converged->tail_bound / w;
    const double tail = inner_tail < inner ? inner_tail / (inner - inner_tail) : kInf;
    if (tail <= policy.tolerance) {
      return {Converged{std::log1p(excess), tail}, payout_sum.terms_used};
    }
    inner_policy.tolerance = 0.5 * policy.tolerance * inner * w;
  }
  throw Error(ErrorCode::TruncationInconclusive,
              "ensemble-average growth tail could not be brought below tolerance");
}

SeriesResult expected_utility_change(const PlayerState& state, const GambleSpec& spec,
                                     const Utility& utility, const TruncationPolicy& policy) {
  if (std::holds_alternative<LogUtility>(utility)) {
    return utility_series(state, spec, Functional::LogGrowth,
                          [](double x) { return std::log(x); }, policy);
  }
  if (std::holds_alternative<SqrtUtility>(utility)) {
    return utility_series(state, spec, Functional::SqrtUtility,
                          [](double x) { return std::sqrt(x); }, policy);
  }
  const auto& custom = std::get<CustomUtility>(utility);
  if (!custom.u) throw Error(ErrorCode::InvalidArgument, "custom utility has no function");
  return utility_series(state, spec, Functional::Custom, custom.u, policy);
}

SeriesResult bernoulli_literal_lhs(const PlayerState& state, const GambleSpec& spec,
                                   const TruncationPolicy& policy) {
  const double w = state.wealth();
  const double c = state.ticket_price();
  if (c >= w) return {Undefined{UndefinedReason::NonpositiveLogArgument}, 0};

  // Gains are evaluated at zero price; the purchase loss is ln w − ln(w − c).
  SeriesResult gains = time_average_growth(PlayerState(w, 0.0), spec, policy);
  if (auto* converged = std::get_if<Converged>(&gains.classification)) {
    converged->value += std::log1p(-c / w);
  }
  return gains;
}

}  // namespace stpete
