#pragma once

// Seeded simulation of repeated and parallel rounds.
//
// Growth factors are i.i.d.: every round applies r_n evaluated at the
// player's reference (initial) wealth, so w(T) = w·Π r_i. Menger payouts are
// the exception, see MengerWealthBasis. Wealth is tracked in logarithms since
// w(T) overflows a double within a few thousand rounds.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "stpete/gamble.hpp"
#include "stpete/rng.hpp"

namespace stpete {

// Stream indices reserved for each estimator under one seed.
inline constexpr std::uint64_t kTimeStream = 0;
inline constexpr std::uint64_t kEnsembleStream = 1;
inline constexpr std::uint64_t kSubintervalStream = 2;

struct SimulationConfig {
  std::uint64_t seed = 0;
  std::size_t rounds = 1;
  std::size_t samples = 1;
  std::size_t subintervals = 1;
  std::size_t workers = 1;

  void validate() const;
};

/// Which wealth Menger's f_M(n) = w·exp(2^n) − w refers to in round t.
enum class MengerWealthBasis {
  CurrentRound,  // wealth at the start of round t
  GameStart,     // wealth before round 1
};

struct SampleStats {
  std::map<int, std::uint64_t> frequencies;  // k_n
  int max_n = 0;
  std::uint64_t total = 0;
  double estimate = 0.0;
  double standard_error = 0.0;
  // False when the population variance is infinite or too few draws were made.
  bool standard_error_reliable = true;
};

struct Trajectory {
  double initial_wealth = 0.0;
  std::vector<double> log_wealth;   // ln w_t, t = 0..T (shorter after bankruptcy)
  std::vector<double> log_returns;  // ln r_t for the completed rounds
  std::map<int, std::uint64_t> frequencies;
  std::optional<std::size_t> bankrupt_at;  // 1-based round whose outcome left wealth ≤ 0

  std::size_t rounds() const noexcept { return log_returns.size(); }
  /// w_0·exp(ln w_t − ln w_0); entries may be +inf once wealth exceeds double range.
  std::vector<double> wealth_path() const;
};

/// Waiting time with P(n) = (1 − p)^(n−1)·p by inversion of the CDF.
int draw_waiting_time(Substream& rng, double geometric_p = 0.5);

/// Outcome index for any spec: geometric waiting time or a table row (1-based).
int draw_outcome(const GambleSpec& spec, Substream& rng);

Trajectory simulate_trajectory(const PlayerState& state, const GambleSpec& spec,
                               std::size_t rounds, std::uint64_t seed,
                               MengerWealthBasis basis = MengerWealthBasis::CurrentRound);

/// (ln w_T − ln w_0)/T with standard error sd(ln r_i)/√T.
/// Throws BankruptTrajectory when the trajectory ended in bankruptcy.
SampleStats time_average_estimate(const Trajectory& trajectory);

/// ⟨r⟩_N over N independent single rounds.
SampleStats ensemble_average_estimate(const PlayerState& state, const GambleSpec& spec,
                                      std::size_t samples, std::uint64_t seed,
                                      std::size_t workers = 1);

/// ⟨r⟩_N for explicitly given outcomes.
SampleStats ensemble_average_from_draws(const PlayerState& state, const GambleSpec& spec,
                                        std::span<const int> outcomes);

/// ĝ_q = Σ_j (r_j^{1/q} − 1) over q independent draws.
/// Throws NonpositiveReturn if a drawn growth factor is ≤ 0.
SampleStats subinterval_estimate(const PlayerState& state, const GambleSpec& spec,
                                 std::size_t subintervals, std::uint64_t seed,
                                 std::size_t workers = 1);

/// ĝ_q with q = outcomes.size() for explicitly given outcomes.
SampleStats subinterval_estimate_from_draws(const PlayerState& state, const GambleSpec& spec,
                                            std::span<const int> outcomes);

}  // namespace stpete
