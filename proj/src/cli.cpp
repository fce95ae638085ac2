#include "stpete/cli.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <string_view>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "stpete/criteria.hpp"
#include "stpete/error.hpp"
#include "stpete/montecarlo.hpp"
#include "stpete/serialize.hpp"
#include "stpete/series.hpp"
#include "stpete/table_io.hpp"

#ifndef STPETE_VERSION
#define STPETE_VERSION "0.0.0"
#endif

namespace stpete::cli {
namespace {

struct SharedOptions {
  std::string payout = "bernoulli";
  double geom_p = GambleSpec::kDefaultGeometricP;
  double tol = 1e-10;
  std::size_t max_terms = 10'000;
  std::string format = "json";
  std::uint64_t seed = 0;

  TruncationPolicy policy() const {
    TruncationPolicy p;
    p.tolerance = tol;
    p.max_terms = max_terms;
    p.validate();
    return p;
  }

  json to_parameters() const {
    return json{{"payout", payout}, {"geom_p", geom_p}, {"tol", tol}, {"max_terms", max_terms}};
  }
};

void add_shared(CLI::App& cmd, SharedOptions& o) {
  cmd.add_option("--payout", o.payout,
                 "bernoulli | menger | capped:<X> | clamped:<X> | table:<path>")
      ->capture_default_str();
  cmd.add_option("--geom-p", o.geom_p, "geometric parameter of the waiting time")
      ->capture_default_str();
  cmd.add_option("--tol", o.tol, "tail-bound tolerance for series")->capture_default_str();
  cmd.add_option("--max-terms", o.max_terms, "hard cap on series terms")->capture_default_str();
  cmd.add_option("--format", o.format, "output format")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  cmd.add_option("--seed", o.seed, "random seed")->capture_default_str();
}

double parse_real(std::string_view text, std::string_view what) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
    throw Error(ErrorCode::InvalidArgument,
                fmt::format("cannot parse '{}' as {}", text, what));
  }
  return value;
}

GambleSpec make_spec(const SharedOptions& o) {
  const std::string_view p = o.payout;
  if (p == "bernoulli") return GambleSpec::bernoulli(o.geom_p);
  if (p == "menger") return GambleSpec::menger(o.geom_p);
  if (p.starts_with("capped:")) {
    return GambleSpec::capped(parse_real(p.substr(7), "a payout cap"), CapMode::Void, o.geom_p);
  }
  if (p.starts_with("clamped:")) {
    return GambleSpec::capped(parse_real(p.substr(8), "a payout cap"), CapMode::Clamp,
                              o.geom_p);
  }
  if (p.starts_with("table:")) return load_table_csv(std::string(p.substr(6)));
  throw Error(ErrorCode::InvalidArgument, fmt::format("unknown payout rule '{}'", p));
}

OutputEnvelope envelope(std::string command, json parameters, json results) {
  return OutputEnvelope{std::move(command), std::move(parameters), std::move(results),
                        STPETE_VERSION};
}

void print_json(std::ostream& out, const OutputEnvelope& e) {
  out << json(e).dump(2) << '\n';
}

std::string csv_cell(const std::optional<double>& x) { return x ? format_number(*x) : ""; }

void print_series_row(std::ostream& out, std::string_view name, const SeriesResult& r) {
  std::optional<double> value;
  std::optional<double> tail;
  std::string reason;
  if (const auto* c = std::get_if<Converged>(&r.classification)) {
    value = c->value;
    tail = c->tail_bound;
  } else if (const auto* u = std::get_if<Undefined>(&r.classification)) {
    reason = to_string(u->reason);
  }
  out << name << ',' << r.kind() << ',' << csv_cell(value) << ',' << csv_cell(tail) << ','
      << r.terms_used << ',' << reason << '\n';
}

// ---------------------------------------------------------------------------
// evaluate

struct EvaluateOptions {
  SharedOptions shared;
  double wealth = 0.0;
  double price = 0.0;
};

int cmd_evaluate(const EvaluateOptions& o, std::ostream& out) {
  const PlayerState state(o.wealth, o.price);
  const GambleSpec spec = make_spec(o.shared);
  const DecisionReport report = evaluate(state, spec, o.shared.policy());

  if (o.shared.format == "csv") {
    out << "criterion,classification,value,tail_bound,terms_used,reason\n";
    print_series_row(out, "naive_expected_payout", report.naive_expected_payout);
    print_series_row(out, "ensemble_growth", report.ensemble_growth);
    print_series_row(out, "time_growth", report.time_growth);
    print_series_row(out, "bernoulli_literal", report.bernoulli_literal);
    out << "recommendation," << to_string(report.recommendation) << ",,,,\n";
  } else {
    json params = o.shared.to_parameters();
    params["wealth"] = o.wealth;
    params["price"] = o.price;
    print_json(out, envelope("evaluate", std::move(params), to_json(report)));
  }
  return report.recommendation == Recommendation::Undefined ? kExitUndefined : kExitOk;
}

// ---------------------------------------------------------------------------
// breakeven

struct BreakevenOptions {
  SharedOptions shared;
  double w_min = 1.0;
  double w_max = 1e6;
  int points = 50;
  double solver_tol = 1e-10;
  bool inset = false;
  double price = 2.0;
};

int cmd_breakeven(const BreakevenOptions& o, std::ostream& out, std::ostream& err) {
  const GambleSpec spec = make_spec(o.shared);
  const TruncationPolicy policy = o.shared.policy();
  json params = o.shared.to_parameters();
  params["wmin"] = o.w_min;
  params["wmax"] = o.w_max;
  params["points"] = o.points;
  params["solver_tol"] = o.solver_tol;
  params["inset"] = o.inset;

  std::size_t failures = 0;
  if (o.inset) {
    params["price"] = o.price;
    if (!(o.price >= 0.0)) throw Error(ErrorCode::InvalidArgument, "--price must be >= 0");
    // Same grid as the main panel.
    const auto grid = log_spaced_grid(o.w_min, o.w_max, o.points);
    json rows = json::array();
    if (o.shared.format == "csv") out << "wealth,g_bar\n";
    for (double w : grid) {
      const SeriesResult g = time_average_growth(PlayerState(w, o.price), spec, policy);
      const auto value = g.value();
      if (!value) ++failures;
      if (o.shared.format == "csv") {
        out << format_number(w) << ',' << csv_cell(value) << '\n';
      } else {
        rows.push_back(json{{"wealth", w},
                            {"g_bar", value ? json(*value) : json(nullptr)},
                            {"time_growth", to_json(g)}});
      }
    }
    if (o.shared.format == "json") {
      print_json(out, envelope("breakeven", std::move(params),
                               json{{"inset", std::move(rows)}, {"failures", failures}}));
    }
  } else {
    const BreakEvenCurve curve =
        breakeven_curve(o.w_min, o.w_max, o.points, spec, policy, o.solver_tol);
    for (const auto& p : curve.points) failures += p.breakeven_price ? 0 : 1;
    if (o.shared.format == "csv") {
      out << "wealth,breakeven_price\n";
      for (const auto& p : curve.points) {
        out << format_number(p.wealth) << ',' << csv_cell(p.breakeven_price) << '\n';
      }
    } else {
      print_json(out, envelope("breakeven", std::move(params), to_json(curve)));
    }
  }
  if (failures > 0) {
    err << "warning: " << failures << " of " << o.points << " points have no value\n";
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateOptions {
  SharedOptions shared;
  std::string mode;
  double wealth = 100.0;
  double price = 2.0;
  std::size_t rounds = 1000;
  std::size_t samples = 1000;
  std::size_t subintervals = 1000;
  std::size_t workers = 1;
  std::string path_csv;
  std::string menger_wealth = "round";
};

void print_stats_csv(std::ostream& out, const SampleStats& s) {
  out << "field,value\n";
  out << "estimate," << format_number(s.estimate) << '\n';
  out << "standard_error," << format_number(s.standard_error) << '\n';
  out << "standard_error_reliable," << (s.standard_error_reliable ? "true" : "false") << '\n';
  out << "total," << s.total << '\n';
  out << "max_n," << s.max_n << '\n';
  for (const auto& [n, k] : s.frequencies) out << "k_" << n << ',' << k << '\n';
}

// Simulation stopped on a domain error: report it in the requested format.
int print_simulation_error(std::ostream& out, const SharedOptions& shared, json params,
                           json results) {
  if (shared.format == "csv") {
    out << "field,value\n";
    for (const auto& [key, value] : results.items()) {
      if (key == "mode") continue;
      out << key << ',' << (value.is_string() ? value.get<std::string>() : value.dump()) << '\n';
    }
  } else {
    print_json(out, envelope("simulate", std::move(params), std::move(results)));
  }
  return kExitUndefined;
}

int cmd_simulate(const SimulateOptions& o, std::ostream& out) {
  const PlayerState state(o.wealth, o.price);
  const GambleSpec spec = make_spec(o.shared);
  const TruncationPolicy policy = o.shared.policy();
  SimulationConfig config{o.shared.seed, o.rounds, o.samples, o.subintervals, o.workers};
  config.validate();

  // The worker count is deliberately absent: output must not depend on it.
  json params = o.shared.to_parameters();
  params["mode"] = o.mode;
  params["wealth"] = o.wealth;
  params["price"] = o.price;
  params["seed"] = o.shared.seed;

  json results{{"mode", o.mode}};
  SampleStats stats;
  try {
    if (o.mode == "time") {
      params["rounds"] = o.rounds;
      params["menger_wealth"] = o.menger_wealth;
      const auto basis = o.menger_wealth == "initial" ? MengerWealthBasis::GameStart
                                                      : MengerWealthBasis::CurrentRound;
      const Trajectory traj = simulate_trajectory(state, spec, o.rounds, o.shared.seed, basis);
      if (!o.path_csv.empty()) {
        std::ofstream path(o.path_csv);
        if (!path) throw Error(ErrorCode::ParseError, "cannot write " + o.path_csv);
        path << "round,wealth\n";
        const auto wealth = traj.wealth_path();
        for (std::size_t t = 0; t < wealth.size(); ++t) {
          path << t << ',' << format_number(wealth[t]) << '\n';
        }
      }
      if (traj.bankrupt_at) {
        results["error"] = "BankruptTrajectory";
        results["bankrupt_at"] = *traj.bankrupt_at;
        return print_simulation_error(out, o.shared, std::move(params), std::move(results));
      }
      stats = time_average_estimate(traj);
      results["analytic"] = to_json(time_average_growth(state, spec, policy));
    } else if (o.mode == "ensemble") {
      params["samples"] = o.samples;
      stats = ensemble_average_estimate(state, spec, o.samples, o.shared.seed, o.workers);
      const SeriesResult g = ensemble_average_growth(state, spec, policy);
      results["analytic"] = to_json(g);
    } else {
      params["subintervals"] = o.subintervals;
      stats = subinterval_estimate(state, spec, o.subintervals, o.shared.seed, o.workers);
      results["analytic"] = to_json(time_average_growth(state, spec, policy));
    }
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NonpositiveReturn) throw;
    results["error"] = "NonpositiveReturn";
    results["message"] = e.what();
    return print_simulation_error(out, o.shared, std::move(params), std::move(results));
  }

  if (o.shared.format == "csv") {
    print_stats_csv(out, stats);
  } else {
    results["stats"] = to_json(stats);
    print_json(out, envelope("simulate", std::move(params), std::move(results)));
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// menger

struct MengerOptions {
  SharedOptions shared;
  double wealth = 100.0;
  int n_max = 1;
  std::vector<double> prices;
};

int cmd_menger(const MengerOptions& o, std::ostream& out) {
  SharedOptions shared = o.shared;
  shared.payout = "menger";
  const GambleSpec spec = make_spec(shared);
  const TruncationPolicy policy = shared.policy();
  const double w = o.wealth;
  if (!(w > 0.0) || !std::isfinite(w)) {
    throw Error(ErrorCode::InvalidArgument, "--wealth must be positive");
  }

  std::vector<double> prices = o.prices;
  if (prices.empty()) {
    for (double f : {0.0, 0.5, 0.9, 0.999, 1.0, 1.5}) prices.push_back(f * w);
  }
  const double partial_price = menger_partial_sum_price(w, o.n_max);
  // Σ_{n≤n_max} (1/2)^n·2^n − [ln w − ln(w − c)] at the closed-form price.
  const double residual = o.n_max + std::log1p(-partial_price / w);

  struct Row {
    std::string item;
    double price;
    SeriesResult literal;
    SeriesResult time;
  };
  std::vector<Row> rows;
  const auto add_row = [&](std::string item, double c) {
    const PlayerState state(w, c);
    rows.push_back({std::move(item), c, bernoulli_literal_lhs(state, spec, policy),
                    time_average_growth(state, spec, policy)});
  };
  for (double c : prices) add_row("grid", c);
  add_row(fmt::format("partial_sum_nmax_{}", o.n_max), partial_price);

  if (shared.format == "csv") {
    out << "item,price,bernoulli_literal,time_growth,recommendation\n";
    for (const auto& r : rows) {
      out << r.item << ',' << format_number(r.price) << ',' << r.literal.kind() << ','
          << r.time.kind() << ',' << to_string(recommend(r.time)) << '\n';
    }
    return kExitOk;
  }

  json grid = json::array();
  for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
    grid.push_back(json{{"price", rows[i].price},
                        {"bernoulli_literal", to_json(rows[i].literal)},
                        {"time_growth", to_json(rows[i].time)},
                        {"recommendation", to_string(recommend(rows[i].time))}});
  }
  json params = shared.to_parameters();
  params["wealth"] = w;
  params["nmax"] = o.n_max;
  json results{
      {"price_grid", std::move(grid)},
      {"time_criterion", {{"bankruptcy_price", bankruptcy_price(spec, w)},
                          {"below_bankruptcy_price", "BuyAtAnyNonBankruptingPrice"}}},
      {"partial_sum_price",
       {{"n_max", o.n_max},
        {"price", partial_price},
        {"residual", residual},
        {"bernoulli_literal", to_json(rows.back().literal)}}},
  };
  print_json(out, envelope("menger", std::move(params), std::move(results)));
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"St. Petersburg lottery: ensemble, time-average and utility criteria"};
  app.require_subcommand(1);
  app.set_version_flag("--version", STPETE_VERSION);

  EvaluateOptions ev;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "evaluate all decision criteria");
  add_shared(*evaluate_cmd, ev.shared);
  evaluate_cmd->add_option("--wealth", ev.wealth, "player wealth w")->required();
  evaluate_cmd->add_option("--price", ev.price, "ticket price c")->required();

  BreakevenOptions be;
  auto* breakeven_cmd = app.add_subcommand("breakeven", "break-even price curve");
  add_shared(*breakeven_cmd, be.shared);
  breakeven_cmd->add_option("--wmin", be.w_min)->capture_default_str();
  breakeven_cmd->add_option("--wmax", be.w_max)->capture_default_str();
  breakeven_cmd->add_option("--points", be.points)->capture_default_str();
  breakeven_cmd->add_option("--solver-tol", be.solver_tol)->capture_default_str();
  breakeven_cmd->add_flag("--inset", be.inset, "emit g_bar(w, c=--price) instead");
  breakeven_cmd->add_option("--price", be.price, "ticket price for --inset")
      ->capture_default_str();

  SimulateOptions sim;
  auto* simulate_cmd = app.add_subcommand("simulate", "Monte Carlo estimators");
  add_shared(*simulate_cmd, sim.shared);
  simulate_cmd->add_option("--mode", sim.mode)
      ->required()
      ->check(CLI::IsMember({"time", "ensemble", "subinterval"}));
  simulate_cmd->add_option("--wealth", sim.wealth)->capture_default_str();
  simulate_cmd->add_option("--price", sim.price)->capture_default_str();
  simulate_cmd->add_option("--rounds", sim.rounds)->capture_default_str();
  simulate_cmd->add_option("--samples", sim.samples)->capture_default_str();
  simulate_cmd->add_option("--subintervals", sim.subintervals)->capture_default_str();
  simulate_cmd->add_option("--workers", sim.workers)->capture_default_str();
  simulate_cmd->add_option("--path-csv", sim.path_csv, "write round,wealth for time mode");
  simulate_cmd->add_option("--menger-wealth", sim.menger_wealth)
      ->check(CLI::IsMember({"round", "initial"}))
      ->capture_default_str();

  MengerOptions mg;
  auto* menger_cmd = app.add_subcommand("menger", "Menger payouts under both criteria");
  add_shared(*menger_cmd, mg.shared);
  menger_cmd->add_option("--wealth", mg.wealth)->required();
  menger_cmd->add_option("--nmax", mg.n_max)->capture_default_str();
  menger_cmd->add_option("--prices", mg.prices, "price grid")->delimiter(',');

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (evaluate_cmd->parsed()) return cmd_evaluate(ev, out);
    if (breakeven_cmd->parsed()) return cmd_breakeven(be, out, err);
    if (simulate_cmd->parsed()) return cmd_simulate(sim, out);
    return cmd_menger(mg, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.code() == ErrorCode::BankruptTrajectory ? kExitUndefined : kExitUsage;
  }
}

}  // namespace stpete::cli
