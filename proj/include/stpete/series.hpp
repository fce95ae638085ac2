#pragma once

// Truncated evaluation of the lottery's infinite series with an explicit
// value-or-divergence classification.
//
// A sum is reported Converged only when a rigorous bound on the neglected tail
// is at most the requested tolerance. Divergence is declared when no such bound
// exists and the last `divergence_window` terms are of one sign and
// non-decaying in magnitude (the ratio test fails across the window).

#include <cstddef>
#include <functional>
#include <optional>
#include <string_view>
#include <variant>

#include "stpete/gamble.hpp"

namespace stpete {

enum class UndefinedReason { BankruptcyTerm, NonpositiveLogArgument };

std::string_view to_string(UndefinedReason reason) noexcept;

struct Converged {
  double value;
  double tail_bound;
};
struct DivergesPositive {};
struct DivergesNegative {};
struct Undefined {
  UndefinedReason reason;
};

using Classification = std::variant<Converged, DivergesPositive, DivergesNegative, Undefined>;

struct SeriesResult {
  Classification classification;
  std::size_t terms_used = 0;

  bool converged() const noexcept {
    return std::holds_alternative<Converged>(classification);
  }
  bool undefined() const noexcept {
    return std::holds_alternative<Undefined>(classification);
  }
  bool diverges_positive() const noexcept {
    return std::holds_alternative<DivergesPositive>(classification);
  }
  /// The converged value, if any.
  std::optional<double> value() const noexcept;
  std::string_view kind() const noexcept;
};

struct TruncationPolicy {
  double tolerance = 1e-10;
  std::size_t max_terms = 10'000;
  std::size_t divergence_window = 16;

  /// Throws InvalidArgument unless tolerance > 0 and max_terms ≥ divergence_window ≥ 2.
  void validate() const;
};

/// Σ p_n·m_n. Throws TruncationInconclusive if neither test fires within max_terms.
SeriesResult expected_payout(const GambleSpec& spec, double wealth,
                             const TruncationPolicy& policy = {});

/// ḡ = Σ p_n·ln r_n, the time-average exponential growth rate.
SeriesResult time_average_growth(const PlayerState& state, const GambleSpec& spec,
                                 const TruncationPolicy& policy = {});

/// ⟨g⟩ = ln Σ p_n·r_n, the ensemble-average exponential growth rate.
SeriesResult ensemble_average_growth(const PlayerState& state, const GambleSpec& spec,
                                     const TruncationPolicy& policy = {});

struct LogUtility {};
struct SqrtUtility {};
/// A utility defined on (0, ∞). The tail of a custom utility's series is
/// estimated from the observed term ratios rather than bounded analytically.
struct CustomUtility {
  std::function<double(double)> u;
};
using Utility = std::variant<LogUtility, SqrtUtility, CustomUtility>;

/// Σ p_n·(u(w − c + m_n) − u(w)). Outcomes with w − c + m_n ≤ 0 fall outside the
/// utility's domain and make the result Undefined(BankruptcyTerm).
SeriesResult expected_utility_change(const PlayerState& state, const GambleSpec& spec,
                                     const Utility& utility,
                                     const TruncationPolicy& policy = {});

/// Σ p_n·(ln(w + m_n) − ln w) − [ln w − ln(w − c)]: the ticket price is charged
/// once, up front, and never enters the payout terms. Undefined when c ≥ w.
SeriesResult bernoulli_literal_lhs(const PlayerState& state, const GambleSpec& spec,
                                   const TruncationPolicy& policy = {});

}  // namespace stpete
