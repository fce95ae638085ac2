#include "stpete/montecarlo.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <string>
#include <thread>

#include "stpete/error.hpp"
#include "summation.hpp"

namespace stpete {
namespace {

using Counts = std::map<int, std::uint64_t>;

void require_count(std::size_t value, const char* name) {
  if (value < 1) throw Error(ErrorCode::InvalidArgument, std::string(name) + " must be >= 1");
}

int geometric_from_uniform(double u, double geometric_p) {
  const double n = std::ceil(std::log(u) / std::log1p(-geometric_p));
  if (!(n >= 1.0)) return 1;
  return n >= static_cast<double>(INT_MAX) ? INT_MAX : static_cast<int>(n);
}

int outcome_from_uniform(const GambleSpec& spec, double u) {
  if (spec.is_geometric()) return geometric_from_uniform(u, spec.geometric_p());
  const auto& entries = std::get<Table>(spec.rule()).entries;
  double total = 0.0;
  for (const auto& e : entries) total += e.probability;
  const double target = u * total;
  double cumulative = 0.0;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    cumulative += entries[i].probability;
    if (target <= cumulative) return static_cast<int>(i + 1);
  }
  return static_cast<int>(entries.size());
}

// Tallies outcomes for draws [0, count) of one stream. Threads own disjoint
// counter ranges and the integer tallies are merged afterwards, so the result
// does not depend on the worker count.
Counts count_outcomes(const GambleSpec& spec, std::uint64_t seed, std::uint64_t stream,
                      std::size_t count, std::size_t workers) {
  const CounterRng rng(seed, stream);
  workers = std::max<std::size_t>(1, std::min(workers, count));
  std::vector<Counts> partial(workers);
  const auto run = [&](std::size_t w) {
    const std::size_t begin = count * w / workers;
    const std::size_t end = count * (w + 1) / workers;
    // Dense tally for the common small waiting times.
    std::vector<std::uint64_t> dense(64, 0);
    for (std::size_t i = begin; i < end; ++i) {
      const int n = outcome_from_uniform(spec, rng.uniform(i));
      if (n < 64) {
        ++dense[static_cast<std::size_t>(n)];
      } else {
        ++partial[w][n];
      }
    }
    for (int n = 1; n < 64; ++n) {
      if (dense[static_cast<std::size_t>(n)] > 0) partial[w][n] += dense[static_cast<std::size_t>(n)];
    }
  };
  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::jthread> threads;
    threads.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) threads.emplace_back(run, w);
  }
  Counts merged;
  for (const auto& p : partial) {
    for (const auto& [n, k] : p) merged[n] += k;
  }
  return merged;
}

Counts tally(std::span<const int> outcomes) {
  Counts counts;
  for (int n : outcomes) {
    if (n < 1) throw Error(ErrorCode::InvalidArgument, "outcomes must be >= 1");
    ++counts[n];
  }
  return counts;
}

struct Moments {
  double mean;
  double sample_variance;  // NaN for fewer than two draws
};

// Mean and variance of x_n weighted by k_n, summed in increasing n.
template <class F>
Moments weighted_moments(const Counts& counts, std::uint64_t total, const F& value_of) {
  detail::CompensatedSum sum;
  for (const auto& [n, k] : counts) sum.add(static_cast<double>(k) * value_of(n));
  const double mean = sum.value() / static_cast<double>(total);
  if (total < 2) return {mean, std::nan("")};
  detail::CompensatedSum squares;
  for (const auto& [n, k] : counts) {
    const double d = value_of(n) - mean;
    squares.add(static_cast<double>(k) * d * d);
  }
  return {mean, squares.value() / static_cast<double>(total - 1)};
}

bool finite_return_variance(const GambleSpec& spec) {
  if (spec.is_menger()) return false;
  if (std::holds_alternative<BernoulliOriginal>(spec.rule())) {
    return 4.0 * (1.0 - spec.geometric_p()) < 1.0;
  }
  return true;
}

SampleStats ensemble_from_counts(const PlayerState& state, const GambleSpec& spec,
                                 Counts counts, std::uint64_t total) {
  SampleStats stats;
  stats.total = total;
  stats.max_n = counts.rbegin()->first;
  const auto m = weighted_moments(counts, total,
                                  [&](int n) { return growth_factor(state, spec, n); });
  stats.estimate = m.mean;
  stats.standard_error =
      total < 2 ? 0.0 : std::sqrt(m.sample_variance / static_cast<double>(total));
  stats.standard_error_reliable = total >= 2 && finite_return_variance(spec);
  stats.frequencies = std::move(counts);
  return stats;
}

SampleStats subinterval_from_counts(const PlayerState& state, const GambleSpec& spec,
                                    Counts counts, std::uint64_t q) {
  std::map<int, double> increments;
  for (const auto& [n, k] : counts) {
    const auto log_r = log_growth_factor(state, spec, n);
    if (!log_r) {
      throw Error(ErrorCode::NonpositiveReturn,
                  "growth factor for outcome " + std::to_string(n) + " is not positive");
    }
    // With a single sub-interval the return acts for the whole time unit.
    increments[n] = q == 1 ? growth_factor(state, spec, n) - 1.0
                           : std::expm1(*log_r / static_cast<double>(q));
  }
  SampleStats stats;
  stats.total = q;
  stats.max_n = counts.rbegin()->first;
  const auto m = weighted_moments(counts, q, [&](int n) { return increments.at(n); });
  stats.estimate = m.mean * static_cast<double>(q);
  stats.standard_error =
      q < 2 ? 0.0 : std::sqrt(m.sample_variance * static_cast<double>(q));
  stats.standard_error_reliable = q >= 2;
  stats.frequencies = std::move(counts);
  return stats;
}

}  // namespace

void SimulationConfig::validate() const {
  require_count(rounds, "rounds");
  require_count(samples, "samples");
  require_count(subintervals, "subintervals");
  require_count(workers, "workers");
}

std::vector<double> Trajectory::wealth_path() const {
  std::vector<double> path;
  path.reserve(log_wealth.size());
  for (double lw : log_wealth) path.push_back(initial_wealth * std::exp(lw - log_wealth.front()));
  return path;
}

int draw_waiting_time(Substream& rng, double geometric_p) {
  if (!(geometric_p > 0.0 && geometric_p < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "geometric parameter must lie in (0, 1)");
  }
  return geometric_from_uniform(rng.uniform(), geometric_p);
}

int draw_outcome(const GambleSpec& spec, Substream& rng) {
  return outcome_from_uniform(spec, rng.uniform());
}

Trajectory simulate_trajectory(const PlayerState& state, const GambleSpec& spec,
                               std::size_t rounds, std::uint64_t seed,
                               MengerWealthBasis basis) {
  require_count(rounds, "rounds");
  Trajectory traj;
  traj.initial_wealth = state.wealth();
  traj.log_wealth.reserve(rounds + 1);
  traj.log_returns.reserve(rounds);

  const double log_w0 = std::log(state.wealth());
  const bool rebase_menger = spec.is_menger() && basis == MengerWealthBasis::CurrentRound;
  Substream rng(seed, kTimeStream);
  detail::CompensatedSum log_wealth;
  log_wealth.add(log_w0);
  traj.log_wealth.push_back(log_w0);

  for (std::size_t t = 0; t < rounds; ++t) {
    const int n = draw_outcome(spec, rng);
    std::optional<double> log_r;
    if (rebase_menger) {
      const double exponent = std::ldexp(1.0, n);
      const double price_share = state.ticket_price() * std::exp(-traj.log_wealth.back());
      const double shortfall = price_share * std::exp(-exponent);
      if (shortfall < 1.0) log_r = exponent + std::log1p(-shortfall);
    } else {
      log_r = log_growth_factor(state, spec, n);
    }
    ++traj.frequencies[n];
    if (!log_r) {
      traj.bankrupt_at = t + 1;
      break;
    }
    traj.log_returns.push_back(*log_r);
    log_wealth.add(*log_r);
    traj.log_wealth.push_back(log_wealth.value());
  }
  return traj;
}

SampleStats time_average_estimate(const Trajectory& trajectory) {
  if (trajectory.bankrupt_at) {
    throw Error(ErrorCode::BankruptTrajectory,
                "trajectory went bankrupt in round " + std::to_string(*trajectory.bankrupt_at));
  }
  const std::size_t rounds = trajectory.rounds();
  if (rounds == 0) throw Error(ErrorCode::InvalidArgument, "trajectory has no rounds");

  SampleStats stats;
  stats.frequencies = trajectory.frequencies;
  stats.max_n = stats.frequencies.empty() ? 0 : stats.frequencies.rbegin()->first;
  stats.total = rounds;
  const double T = static_cast<double>(rounds);
  stats.estimate = (trajectory.log_wealth.back() - trajectory.log_wealth.front()) / T;

  if (rounds < 2) {
    stats.standard_error = 0.0;
    stats.standard_error_reliable = false;
    return stats;
  }
  // Welford.
  double mean = 0.0;
  double m2 = 0.0;
  std::size_t k = 0;
  for (double x : trajectory.log_returns) {
    ++k;
    const double delta = x - mean;
    mean += delta / static_cast<double>(k);
    m2 += delta * (x - mean);
  }
  stats.standard_error = std::sqrt(m2 / (T - 1.0) / T);
  return stats;
}

SampleStats ensemble_average_estimate(const PlayerState& state, const GambleSpec& spec,
                                      std::size_t samples, std::uint64_t seed,
                                      std::size_t workers) {
  require_count(samples, "samples");
  require_count(workers, "workers");
  return ensemble_from_counts(state, spec,
                              count_outcomes(spec, seed, kEnsembleStream, samples, workers),
                              samples);
}

SampleStats ensemble_average_from_draws(const PlayerState& state, const GambleSpec& spec,
                                        std::span<const int> outcomes) {
  if (outcomes.empty()) throw Error(ErrorCode::InvalidArgument, "no outcomes given");
  return ensemble_from_counts(state, spec, tally(outcomes), outcomes.size());
}

SampleStats subinterval_estimate(const PlayerState& state, const GambleSpec& spec,
                                 std::size_t subintervals, std::uint64_t seed,
                                 std::size_t workers) {
  require_count(subintervals, "subintervals");
  require_count(workers, "workers");
  return subinterval_from_counts(
      state, spec, count_outcomes(spec, seed, kSubintervalStream, subintervals, workers),
      subintervals);
}

SampleStats subinterval_estimate_from_draws(const PlayerState& state, const GambleSpec& spec,
                                            std::span<const int> outcomes) {
  if (outcomes.empty()) throw Error(ErrorCode::InvalidArgument, "no outcomes given");
  return subinterval_from_counts(state, spec, tally(outcomes), outcomes.size());
}

}  // namespace stpete
