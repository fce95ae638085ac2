#include "stpete/serialize.hpp"

#include <cmath>

#include <fmt/format.h>

namespace stpete {

void to_json(json& j, const OutputEnvelope& e) {
  j = json{{"command", e.command},
           {"parameters", e.parameters},
           {"results", e.results},
           {"version", e.version}};
}

void from_json(const json& j, OutputEnvelope& e) {
  j.at("command").get_to(e.command);
  e.parameters = j.at("parameters");
  e.results = j.at("results");
  j.at("version").get_to(e.version);
}

json number_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return fmt::format("{:.17g}", x);
}

json to_json(const SeriesResult& r) {
  json j{{"classification", r.kind()}, {"terms_used", r.terms_used}};
  if (const auto* c = std::get_if<Converged>(&r.classification)) {
    j["value"] = number_or_null(c->value);
    j["tail_bound"] = number_or_null(c->tail_bound);
  } else if (const auto* u = std::get_if<Undefined>(&r.classification)) {
    j["reason"] = to_string(u->reason);
  }
  return j;
}

json to_json(const DecisionReport& report) {
  return json{{"naive_expected_payout", to_json(report.naive_expected_payout)},
              {"ensemble_growth", to_json(report.ensemble_growth)},
              {"time_growth", to_json(report.time_growth)},
              {"bernoulli_literal", to_json(report.bernoulli_literal)},
              {"recommendation", to_string(report.recommendation)}};
}

json to_json(const BreakEvenCurve& curve) {
  json points = json::array();
  std::size_t failures = 0;
  for (const auto& p : curve.points) {
    json row{{"wealth", p.wealth}};
    if (p.breakeven_price) {
      row["breakeven_price"] = *p.breakeven_price;
    } else {
      row["breakeven_price"] = nullptr;
      row["error"] = p.error;
      ++failures;
    }
    points.push_back(std::move(row));
  }
  return json{{"points", std::move(points)},
              {"solver_tolerance", curve.solver_tolerance},
              {"failures", failures}};
}

json to_json(const SampleStats& stats) {
  json frequencies = json::object();
  for (const auto& [n, k] : stats.frequencies) frequencies[std::to_string(n)] = k;
  return json{{"frequencies", std::move(frequencies)},
              {"max_n", stats.max_n},
              {"total", stats.total},
              {"estimate", number_or_null(stats.estimate)},
              {"standard_error", number_or_null(stats.standard_error)},
              {"standard_error_reliable", stats.standard_error_reliable}};
}

}  // namespace stpete
