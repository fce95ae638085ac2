#pragma once

// One round of a St. Petersburg-type lottery: a coin is tossed until the
// first tails, the number of tosses n (the waiting time) is geometrically
// distributed, and the house pays m_n. Tables generalize this to any finite
// discrete distribution of payouts, indexed 1..size.

#include <cstddef>
#include <optional>
#include <variant>
#include <vector>

namespace stpete {

/// m_n = 2^(n-1).
struct BernoulliOriginal {};

/// m_n = w·exp(2^n) − w, defined relative to the wealth the round is played at.
struct Menger {};

enum class CapMode {
  /// Payouts above the cap are not honoured; the round pays nothing.
  Void,
  /// Payouts above the cap are paid at the cap: m_n = min(2^(n-1), cap).
  Clamp,
};

/// Bernoulli payouts limited to max_payout.
struct Capped {
  double max_payout;
  CapMode mode = CapMode::Void;
};

struct TableEntry {
  double probability;
  double payout;
};

struct Table {
  std::vector<TableEntry> entries;
};

using PayoutRule = std::variant<BernoulliOriginal, Menger, Capped, Table>;

class GambleSpec {
 public:
  static constexpr double kDefaultGeometricP = 0.5;
  static constexpr double kDefaultTableTolerance = 1e-9;

  static GambleSpec bernoulli(double geometric_p = kDefaultGeometricP);
  static GambleSpec menger(double geometric_p = kDefaultGeometricP);
  static GambleSpec capped(double max_payout, CapMode mode = CapMode::Void,
                           double geometric_p = kDefaultGeometricP);
  /// Probabilities must be strictly positive and sum to one within `tolerance`.
  static GambleSpec table(std::vector<TableEntry> entries,
                          double tolerance = kDefaultTableTolerance);

  const PayoutRule& rule() const noexcept { return rule_; }
  double geometric_p() const noexcept { return geometric_p_; }
  bool is_geometric() const noexcept { return !std::holds_alternative<Table>(rule_); }
  bool is_menger() const noexcept { return std::holds_alternative<Menger>(rule_); }

  /// Number of outcomes for tables; nullopt for the geometric rules.
  std::optional<std::size_t> support_size() const noexcept;

  /// For Capped rules, the largest n whose uncapped payout 2^(n-1) is within the cap
  /// (0 if even the first payout exceeds it).
  std::optional<int> cap_index() const noexcept;

 private:
  GambleSpec(PayoutRule rule, double geometric_p);

  PayoutRule rule_;
  double geometric_p_;
};

class PlayerState {
 public:
  /// Throws InvalidArgument unless wealth > 0 and price ≥ 0, both finite.
  PlayerState(double wealth, double ticket_price);

  double wealth() const noexcept { return wealth_; }
  double ticket_price() const noexcept { return ticket_price_; }

 private:
  double wealth_;
  double ticket_price_;
};

double payout(const GambleSpec& spec, int n, double wealth);

double probability(const GambleSpec& spec, int n);

/// r_n = (w − c + m_n)/w. Zero or negative factors are returned as-is.
double growth_factor(const PlayerState& state, const GambleSpec& spec, int n);

/// ln r_n, computed without forming r_n where that would lose precision or
/// overflow (Menger). nullopt when r_n ≤ 0.
std::optional<double> log_growth_factor(const PlayerState& state, const GambleSpec& spec,
                                        int n);

/// Smallest payout with nonzero probability.
double worst_payout(const GambleSpec& spec, double wealth);

/// Ticket price at and above which some outcome leaves the player with w − c + m_n ≤ 0.
double bankruptcy_price(const GambleSpec& spec, double wealth);

}  // namespace stpete
