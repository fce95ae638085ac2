#pragma once

#include <string>

#include <json.hpp>

#include "stpete/criteria.hpp"
#include "stpete/montecarlo.hpp"
#include "stpete/series.hpp"

namespace stpete {

using nlohmann::json;

/// What every CLI command prints in JSON mode.
struct OutputEnvelope {
  std::string command;
  json parameters = json::object();
  json results = json::object();
  std::string version;

  bool operator==(const OutputEnvelope&) const = default;
};

void to_json(json& j, const OutputEnvelope& e);
void from_json(const json& j, OutputEnvelope& e);

json to_json(const SeriesResult& r);
json to_json(const DecisionReport& report);
json to_json(const BreakEvenCurve& curve);
json to_json(const SampleStats& stats);

/// Non-finite doubles have no JSON representation and become null.
json number_or_null(double x);

/// Locale-independent, round-trip-safe text for CSV cells (17 significant digits).
std::string format_number(double x);

}  // namespace stpete
