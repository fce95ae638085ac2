#include "stpete/gamble.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "stpete/error.hpp"

namespace stpete {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require_geometric_p(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw Error(ErrorCode::InvalidArgument,
                "geometric parameter must lie in (0, 1), got " + std::to_string(p));
  }
}

void require_positive_n(int n) {
  if (n < 1) {
    throw Error(ErrorCode::InvalidArgument, "waiting time must be >= 1, got " + std::to_string(n));
  }
}

const TableEntry& table_entry(const Table& table, int n) {
  if (static_cast<std::size_t>(n) > table.entries.size()) {
    throw Error(ErrorCode::OutOfSupport, "waiting time " + std::to_string(n) +
                                             " beyond table of size " +
                                             std::to_string(table.entries.size()));
  }
  return table.entries[static_cast<std::size_t>(n) - 1];
}

double bernoulli_payout(int n) { return std::ldexp(1.0, n - 1); }

}  // namespace

GambleSpec::GambleSpec(PayoutRule rule, double geometric_p)
    : rule_(std::move(rule)), geometric_p_(geometric_p) {}

GambleSpec GambleSpec::bernoulli(double geometric_p) {
  require_geometric_p(geometric_p);
  return GambleSpec(BernoulliOriginal{}, geometric_p);
}

GambleSpec GambleSpec::menger(double geometric_p) {
  require_geometric_p(geometric_p);
  return GambleSpec(Menger{}, geometric_p);
}

GambleSpec GambleSpec::capped(double max_payout, CapMode mode, double geometric_p) {
  require_geometric_p(geometric_p);
  if (!(max_payout > 0.0) || !std::isfinite(max_payout)) {
    throw Error(ErrorCode::InvalidArgument, "payout cap must be a positive finite number");
  }
  return GambleSpec(Capped{max_payout, mode}, geometric_p);
}

GambleSpec GambleSpec::table(std::vector<TableEntry> entries, double tolerance) {
  if (entries.empty()) {
    throw Error(ErrorCode::InvalidArgument, "payout table is empty");
  }
  double total = 0.0;
  for (const auto& e : entries) {
    if (!(e.probability > 0.0) || !std::isfinite(e.probability)) {
      throw Error(ErrorCode::InvalidArgument, "table probabilities must be strictly positive");
    }
    if (!std::isfinite(e.payout) || e.payout < 0.0) {
      throw Error(ErrorCode::InvalidArgument, "table payouts must be finite and nonnegative");
    }
    total += e.probability;
  }
  if (std::abs(total - 1.0) > tolerance) {
    throw Error(ErrorCode::InvalidArgument,
                "table probabilities sum to " + std::to_string(total) + ", expected 1");
  }
  return GambleSpec(Table{std::move(entries)}, kDefaultGeometricP);
}

std::optional<std::size_t> GambleSpec::support_size() const noexcept {
  if (const auto* t = std::get_if<Table>(&rule_)) return t->entries.size();
  return std::nullopt;
}

std::optional<int> GambleSpec::cap_index() const noexcept {
  const auto* cap = std::get_if<Capped>(&rule_);
  if (cap == nullptr) return std::nullopt;
  int n = 0;
  while (n < 1100 && bernoulli_payout(n + 1) <= cap->max_payout) ++n;
  return n;
}

PlayerState::PlayerState(double wealth, double ticket_price)
    : wealth_(wealth), ticket_price_(ticket_price) {
  if (!(wealth > 0.0) || !std::isfinite(wealth)) {
    throw Error(ErrorCode::InvalidArgument, "wealth must be positive and finite");
  }
  if (!(ticket_price >= 0.0) || !std::isfinite(ticket_price)) {
    throw Error(ErrorCode::InvalidArgument, "ticket price must be nonnegative and finite");
  }
}

double payout(const GambleSpec& spec, int n, double wealth) {
  require_positive_n(n);
  return std::visit(
      Overloaded{
          [n](const BernoulliOriginal&) { return bernoulli_payout(n); },
          [n, wealth](const Menger&) { return wealth * std::expm1(std::ldexp(1.0, n)); },
          [n, &spec](const Capped& cap) {
            if (n <= *spec.cap_index()) return bernoulli_payout(n);
            return cap.mode == CapMode::Clamp ? cap.max_payout : 0.0;
          },
          [n](const Table& table) { return table_entry(table, n).payout; },
      },
      spec.rule());
}

double probability(const GambleSpec& spec, int n) {
  require_positive_n(n);
  if (const auto* table = std::get_if<Table>(&spec.rule())) {
    return table_entry(*table, n).probability;
  }
  const double p = spec.geometric_p();
  return p * std::pow(1.0 - p, n - 1);
}

double growth_factor(const PlayerState& state, const GambleSpec& spec, int n) {
  const double w = state.wealth();
  return (w + (payout(spec, n, w) - state.ticket_price())) / w;
}

std::optional<double> log_growth_factor(const PlayerState& state, const GambleSpec& spec,
                                        int n) {
  const double w = state.wealth();
  const double c = state.ticket_price();
  if (spec.is_menger()) {
    require_positive_n(n);
    // r_n = exp(2^n) − c/w, so ln r_n = 2^n + ln(1 − (c/w)·exp(−2^n)).
    const double exponent = std::ldexp(1.0, n);
    const double shortfall = (c / w) * std::exp(-exponent);
    if (shortfall >= 1.0) return std::nullopt;
    return exponent + std::log1p(-shortfall);
  }
  const double m = payout(spec, n, w);
  const double after = (w - c) + m;
  if (after <= 0.0) return std::nullopt;
  // log1p is only well conditioned for small relative changes; near bankruptcy
  // w − c is exact and the difference of logs is the accurate form.
  const double x = (m - c) / w;
  if (std::abs(x) < 0.5) return std::log1p(x);
  return std::log(after) - std::log(w);
}

double worst_payout(const GambleSpec& spec, double wealth) {
  return std::visit(
      Overloaded{
          [](const BernoulliOriginal&) { return 1.0; },
          [wealth](const Menger&) { return wealth * std::expm1(2.0); },
          [&spec](const Capped& cap) {
            if (cap.mode == CapMode::Void) return 0.0;
            return *spec.cap_index() >= 1 ? 1.0 : cap.max_payout;
          },
          [](const Table& table) {
            double lowest = std::numeric_limits<double>::infinity();
            for (const auto& e : table.entries) lowest = std::min(lowest, e.payout);
            return lowest;
          },
      },
      spec.rule());
}

double bankruptcy_price(const GambleSpec& spec, double wealth) {
  return wealth + worst_payout(spec, wealth);
}

}  // namespace stpete
