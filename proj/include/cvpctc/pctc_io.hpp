#pragma once

// File formats consumed and produced around the computation schemes.
//
// Transition table (JSON):
//   { "n": 3, "table": [[0, 1], [1, 2], [2, 2]], "halting": [2] }
// "table" lists every state 0..n-1 exactly once as [state, successor].
//
// Interval scheme (JSON):
//   { "x0": 0.0, "L": 16.0, "n": 16 }

#include <filesystem>

#include <json.hpp>

#include "cvpctc/encode.hpp"
#include "cvpctc/gaussian.hpp"
#include "cvpctc/pctc.hpp"
#include "cvpctc/teleport.hpp"

namespace cvpctc {

// Both parsers throw std::invalid_argument with a description of the first
// problem found.
TransitionFunction parse_transition_table(const nlohmann::json& doc);
TransitionFunction load_transition_table(const std::filesystem::path& path);
nlohmann::json to_json(const TransitionFunction& f);

IntervalScheme parse_interval_scheme(const nlohmann::json& doc);
IntervalScheme load_interval_scheme(const std::filesystem::path& path);
nlohmann::json to_json(const IntervalScheme& scheme);

nlohmann::json to_json(const GaussianState& state);
nlohmann::json to_json(const MeasurementRecord& rec);
nlohmann::json to_json(const TeleportResult& result);
nlohmann::json to_json(const PctcRunReport& report, bool include_shots = true);

}  // namespace cvpctc
