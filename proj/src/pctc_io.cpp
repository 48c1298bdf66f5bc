#include "cvpctc/pctc_io.hpp"

#include <fstream>
#include <stdexcept>
#include <string>

namespace cvpctc {

using nlohmann::json;

namespace {

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(path.string() + ": " + e.what());
  }
}

std::size_t as_index(const json& v, const char* what) {
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw std::invalid_argument(std::string(what) + ": expected a non-negative integer");
  }
  return v.get<std::size_t>();
}

template <typename T>
json optional_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

}  // namespace

TransitionFunction parse_transition_table(const json& doc) {
  if (!doc.is_object()) throw std::invalid_argument("transition table: expected a JSON object");
  if (!doc.contains("n") || !doc.contains("table")) {
    throw std::invalid_argument("transition table: fields \"n\" and \"table\" are required");
  }
  const std::size_t n = as_index(doc.at("n"), "transition table n");
  if (n == 0) throw std::invalid_argument("transition table: n must be at least 1");
  const json& table = doc.at("table");
  if (!table.is_array() || table.size() != n) {
    throw std::invalid_argument("transition table: \"table\" must list exactly n pairs");
  }
  std::vector<std::size_t> next(n, 0);
  std::vector<bool> seen(n, false);
  for (const auto& pair : table) {
    if (!pair.is_array() || pair.size() != 2) {
      throw std::invalid_argument("transition table: each entry must be [state, successor]");
    }
    const auto from = as_index(pair[0], "transition table state");
    const auto to = as_index(pair[1], "transition table successor");
    if (from >= n || to >= n) {
      throw std::invalid_argument("transition table: index " + std::to_string(std::max(from, to)) +
                                  " outside 0.." + std::to_string(n - 1));
    }
    if (seen[from]) {
      throw std::invalid_argument("transition table: state " + std::to_string(from) + " listed twice");
    }
    seen[from] = true;
    next[from] = to;
  }
  std::vector<std::size_t> halting;
  if (doc.contains("halting")) {
    const json& h = doc.at("halting");
    if (!h.is_array()) throw std::invalid_argument("transition table: \"halting\" must be an array");
    for (const auto& v : h) halting.push_back(as_index(v, "halting state"));
  }
  return TransitionFunction(std::move(next), std::move(halting));
}

TransitionFunction load_transition_table(const std::filesystem::path& path) {
  return parse_transition_table(read_json_file(path));
}

json to_json(const TransitionFunction& f) {
  json table = json::array();
  for (std::size_t k = 0; k < f.size(); ++k) table.push_back({k, f.next(k)});
  return {{"n", f.size()}, {"table", table}, {"halting", f.halting()}};
}

IntervalScheme parse_interval_scheme(const json& doc) {
  if (!doc.is_object() || !doc.contains("x0") || !doc.contains("L") || !doc.contains("n")) {
    throw std::invalid_argument("interval scheme: fields \"x0\", \"L\" and \"n\" are required");
  }
  if (!doc.at("x0").is_number() || !doc.at("L").is_number()) {
    throw std::invalid_argument("interval scheme: x0 and L must be numbers");
  }
  return IntervalScheme(doc.at("x0").get<double>(), doc.at("L").get<double>(),
                        as_index(doc.at("n"), "interval scheme n"));
}

IntervalScheme load_interval_scheme(const std::filesystem::path& path) {
  return parse_interval_scheme(read_json_file(path));
}

json to_json(const IntervalScheme& scheme) {
  return {{"x0", scheme.x0()}, {"L", scheme.end()}, {"n", scheme.n()}, {"alpha", scheme.alpha()}};
}

json to_json(const GaussianState& state) {
  json mean = json::array();
  for (Eigen::Index i = 0; i < state.mean().size(); ++i) mean.push_back(state.mean()(i));
  json cov = json::array();
  for (Eigen::Index i = 0; i < state.cov().rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < state.cov().cols(); ++j) row.push_back(state.cov()(i, j));
    cov.push_back(row);
  }
  return {{"n_modes", state.n_modes()}, {"mean", mean}, {"cov", cov}};
}

json to_json(const MeasurementRecord& rec) {
  return {{"mode", rec.mode},
          {"quadrature", to_string(rec.quadrature)},
          {"outcome", rec.outcome},
          {"density", rec.density},
          {"marginal_mean", rec.marginal_mean},
          {"marginal_variance", rec.marginal_variance},
          {"forced", rec.forced},
          {"near_zero_density", rec.near_zero_density},
          {"seed", optional_json(rec.seed)}};
}

json to_json(const TeleportResult& result) {
  const auto& c = result.config;
  return {{"output", to_json(result.output)},
          {"x_u", to_json(result.x_u)},
          {"p_v", to_json(result.p_v)},
          {"joint_density", result.joint_density},
          {"config",
           {{"r", c.r},
            {"g_x", c.g_x},
            {"g_p", c.g_p},
            {"postselect", c.postselect},
            {"forced_x_u", c.forced_x_u},
            {"forced_p_v", c.forced_p_v},
            {"alice_x_shift", c.alice_x_shift}}}};
}

namespace {

json loop_json(const LoopReadout& l) {
  return {{"alice_encoding", to_string(l.alice)},
          {"x_peak", optional_json(l.x_peak)},
          {"decoded", optional_json(l.decoded)},
          {"p_mean", l.p_mean},
          {"bob_x_mean", l.bob_x_mean},
          {"bob_x_variance", l.bob_x_variance},
          {"joint_density", l.joint_density},
          {"error", l.error.empty() ? json(nullptr) : json(l.error)}};
}

}  // namespace

json to_json(const PctcRunReport& report, bool include_shots) {
  json out = {{"scheme", to_string(report.scheme)},
              {"initial_index", report.initial_index},
              {"final_index", report.final_index},
              {"iterations", report.iterations},
              {"max_iter", report.max_iter},
              {"trajectory", report.trajectory},
              {"decoded_index", optional_json(report.decoded_index)},
              {"consistent", report.consistent},
              {"r", report.r},
              {"gain", optional_json(report.gain)},
              {"shots", report.shots},
              {"seed", report.seed},
              {"note", report.note}};
  if (report.loop) out["loop"] = loop_json(*report.loop);
  if (report.loop_comparison) out["loop_comparison"] = loop_json(*report.loop_comparison);
  if (report.qnd) {
    const auto& q = *report.qnd;
    json qnd = {{"x_in_midpoint", q.x_in_midpoint},
                {"x_out_midpoint", q.x_out_midpoint},
                {"expected_delta", q.expected_delta},
                {"predicted_delta_variance", q.predicted_delta_variance},
                {"mean_delta", q.mean_delta},
                {"delta_variance", q.delta_variance},
                {"success_rate", q.success_rate},
                {"failed_shots", q.failed_shots},
                {"majority_index", optional_json(q.majority_index)},
                {"predicted_success", q.predicted_success},
                {"noise_limited", q.noise_limited}};
    if (include_shots) {
      json shots = json::array();
      for (const auto& s : q.shots) {
        shots.push_back({{"x_sq_out1", s.readout.x_sq_out1},
                         {"x_sq_out2", s.readout.x_sq_out2},
                         {"delta", s.readout.delta},
                         {"inferred_length", s.readout.inferred_length},
                         {"decoded", optional_json(s.decoded)},
                         {"seed", s.seed}});
      }
      qnd["per_shot"] = std::move(shots);
    }
    out["qnd"] = std::move(qnd);
  }
  return out;
}

}  // namespace cvpctc
