#include "cli.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "cvpctc/encode.hpp"
#include "cvpctc/errors.hpp"
#include "cvpctc/gaussian.hpp"
#include "cvpctc/pctc.hpp"
#include "cvpctc/pctc_io.hpp"
#include "cvpctc/rng.hpp"
#include "cvpctc/teleport.hpp"

namespace cvpctc::cli {

using nlohmann::json;

namespace {

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

std::uint64_t default_seed() {
  if (const char* env = std::getenv(kSeedEnv)) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw UsageError(std::string(kSeedEnv) + " is not an unsigned integer");
    }
  }
  return 1;
}

json tool_json() { return {{"name", kToolName}, {"version", kToolVersion}}; }

// Writes to `path` via a temporary sibling and a rename, or to `out` when
// no path is given.
void emit(const std::string& path, const std::string& content, std::ostream& out) {
  if (path.empty()) {
    out << content;
    return;
  }
  const std::filesystem::path target(path);
  std::filesystem::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw UsageError("cannot write " + tmp.string());
    f << content;
    if (!f) throw UsageError("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, target);
}

std::string csv_preamble(const json& config) {
  return fmt::format("# tool: {} {}\n# config: {}\n", kToolName, kToolVersion, config.dump());
}

std::string json_document(const json& config, json result) {
  json doc = {{"tool", tool_json()}, {"config", config}, {"result", std::move(result)}};
  return doc.dump(2) + "\n";
}

std::vector<double> parse_numbers(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError("not a number in state spec: '" + item + "'");
    }
  }
  return values;
}

// vacuum | coherent:x,p | squeezed:r[,x,p] | teleported:r,x,p | postselected:r,x,p
GaussianState parse_state_spec(const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  const std::vector<double> args =
      colon == std::string::npos ? std::vector<double>{} : parse_numbers(spec.substr(colon + 1));
  auto need = [&](std::size_t lo, std::size_t hi) {
    if (args.size() < lo || args.size() > hi) throw UsageError("wrong argument count in state spec '" + spec + "'");
  };
  if (kind == "vacuum") {
    need(0, 0);
    return vacuum(1);
  }
  if (kind == "coherent") {
    need(2, 2);
    return coherent(args[0], args[1]);
  }
  if (kind == "squeezed") {
    if (args.size() != 1) need(3, 3);
    GaussianState s = apply(vacuum(1), squeeze_op(0, args[0], Quadrature::X));
    if (args.size() == 3) s = displace_p(displace_x(s, 0, args[1]), 0, args[2]);
    return s;
  }
  if (kind == "teleported" || kind == "postselected") {
    need(3, 3);
    if (args[0] < 0.0) throw UsageError("squeezing r must be >= 0");
    const GaussianState in = coherent(args[1], args[2]);
    return kind == "teleported" ? teleport_ensemble(in, args[0], 1.0, 1.0)
                                : teleport_postselected(in, args[0]).output;
  }
  throw UsageError("unknown state spec '" + spec + "'");
}

// ---------------------------------------------------------------- fidelity

struct FidelityArgs {
  double r_min = 0.0;
  double r_max = 3.0;
  std::size_t steps = 7;
  double gain = 1.0;
  double x = 0.0;
  double p = 0.0;
  std::size_t shots = 1000;
  std::uint64_t seed = 1;
  std::string format = "csv";
  std::string out;
};

int cmd_fidelity(const FidelityArgs& a, std::ostream& out) {
  if (a.steps < 1) throw UsageError("--steps must be at least 1");
  if (!(a.r_min >= 0.0) || !(a.r_max >= a.r_min)) throw UsageError("empty or negative squeezing range");
  if (a.shots < 1) throw UsageError("--shots must be at least 1");

  std::vector<double> rs;
  for (std::size_t i = 0; i < a.steps; ++i) {
    rs.push_back(a.steps == 1 ? a.r_min
                              : a.r_min + (a.r_max - a.r_min) * static_cast<double>(i) /
                                              static_cast<double>(a.steps - 1));
  }
  const GaussianState input = coherent(a.x, a.p);
  const auto analytic = fidelity_sweep(rs, a.gain, input);

  json config = {{"command", "fidelity"}, {"r_min", a.r_min}, {"r_max", a.r_max},
                 {"steps", a.steps},      {"gain", a.gain},   {"input_mean", {a.x, a.p}},
                 {"shots", a.shots},      {"seed", a.seed}};
  json rows = json::array();
  std::string csv = csv_preamble(config) + "r,F_analytic,F_shot_estimate,stderr\n";
  for (std::size_t row = 0; row < rs.size(); ++row) {
    TeleportConfig cfg;
    cfg.r = rs[row];
    cfg.g_x = a.gain;
    cfg.g_p = a.gain;
    double sum = 0.0;
    double sum_sq = 0.0;
    for (std::size_t s = 0; s < a.shots; ++s) {
      Rng rng(derive_seed(derive_seed(a.seed, row), s));
      const double f = fidelity_pure(input, teleport(input, cfg, rng).output);
      sum += f;
      sum_sq += f * f;
    }
    const double n = static_cast<double>(a.shots);
    const double mean = sum / n;
    const double var = a.shots > 1 ? std::max(0.0, (sum_sq - sum * sum / n) / (n - 1.0)) : 0.0;
    const double stderr_ = std::sqrt(var / n);
    rows.push_back({{"r", rs[row]}, {"F_analytic", analytic[row].fidelity},
                    {"F_shot_estimate", mean}, {"stderr", stderr_}});
    csv += fmt::format("{},{},{},{}\n", rs[row], analytic[row].fidelity, mean, stderr_);
  }
  emit(a.out, a.format == "json" ? json_document(config, rows) : csv, out);
  return kOk;
}

// -------------------------------------------------------------- postselect

struct PostselectArgs {
  double r = 6.0;
  double x = 1.0;
  double p = -0.5;
  std::uint64_t seed = 1;
  std::string out;
};

int cmd_postselect(const PostselectArgs& a, std::ostream& out) {
  if (!(a.r >= 0.0) || !std::isfinite(a.r)) throw UsageError("--r must be finite and >= 0");
  const GaussianState input = coherent(a.x, a.p);
  const TeleportResult tr = teleport_postselected(input, a.r);
  const double f = fidelity_pure(input, tr.output);

  json config = {{"command", "postselect"}, {"r", a.r}, {"input_mean", {a.x, a.p}}, {"seed", a.seed}};
  json result = to_json(tr);
  result["fidelity"] = f;
  // Coherent inputs cannot beat F = 1/2 without entanglement.
  result["above_classical_limit"] = f > 0.5;
  result["flag"] = f > 0.5 ? json(nullptr) : json("fidelity at or below the classical limit 1/2");
  emit(a.out, json_document(config, result), out);
  return kOk;
}

// --------------------------------------------------------------------- run

struct RunArgs {
  std::string scheme_file;
  std::optional<double> x0;
  std::optional<double> L;
  std::optional<std::size_t> n;
  std::string transition_file;
  std::string word;
  double r = 6.0;
  double gain = 1.0;
  std::size_t shots = 1000;
  std::string mode = "loop";
  std::string alice = "input-only";
  std::optional<std::size_t> max_iter;
  bool summary_only = false;
  std::uint64_t seed = 1;
  std::string out;
};

int cmd_run(const RunArgs& a, std::ostream& out, std::ostream& err) {
  std::optional<IntervalScheme> scheme;
  try {
    if (!a.scheme_file.empty()) {
      scheme = load_interval_scheme(a.scheme_file);
    } else if (a.x0 && a.L && a.n) {
      scheme = IntervalScheme(*a.x0, *a.L, *a.n);
    } else {
      throw UsageError("give --scheme-file or all of --x0, --L, --n");
    }
  } catch (const UsageError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  TransitionFunction f = [&] {
    try {
      return load_transition_table(a.transition_file);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }();
  const InputWord word = [&] {
    try {
      return InputWord::parse(a.word);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }();
  if (!(a.r >= 0.0) || !std::isfinite(a.r)) throw UsageError("--r must be finite and >= 0");
  if (a.mode == "qnd" && a.gain == 0.0) throw UsageError("--G must be nonzero");
  if (a.max_iter && *a.max_iter == 0) throw UsageError("--max-iter must be at least 1");

  json config = {{"command", "run"},
                 {"mode", a.mode},
                 {"scheme", to_json(*scheme)},
                 {"transition", to_json(f)},
                 {"word", word.to_string()},
                 {"r", a.r},
                 {"seed", a.seed}};
  if (a.mode == "qnd") {
    config["G"] = a.gain;
    config["shots"] = a.shots;
  } else {
    config["alice_encoding"] = a.alice;
  }
  if (a.max_iter) config["max_iter"] = *a.max_iter;

  PctcRunReport report;
  try {
    if (a.mode == "loop") {
      LoopOptions opts;
      opts.max_iter = a.max_iter;
      opts.alice = a.alice == "input-and-alice" ? AliceEncoding::InputAndAlice : AliceEncoding::InputOnly;
      report = run_loop_scheme(*scheme, f, word, a.r, a.seed, opts);
    } else {
      if (a.shots < 1) throw UsageError("--shots must be at least 1");
      report = run_qnd_scheme(*scheme, f, word, a.r, a.gain, a.shots, a.seed, a.max_iter);
    }
  } catch (const NonHalting& e) {
    json result = {{"error", "non-halting"}, {"message", e.what()}, {"trajectory", e.trajectory()}};
    emit(a.out, json_document(config, result), out);
    err << "non-halting: " << e.what() << "\n";
    return kNonHalting;
  } catch (const std::out_of_range& e) {
    throw UsageError(e.what());
  }

  json result = to_json(report, !a.summary_only);
  const bool expected_inconsistent = report.qnd && report.qnd->noise_limited && !report.consistent;
  result["expected_inconsistent"] = expected_inconsistent;
  emit(a.out, json_document(config, result), out);
  if (report.consistent || expected_inconsistent) return kOk;
  err << "inconsistent decode: classical q_f = " << report.final_index << ", quantum readout = "
      << (report.decoded_index ? std::to_string(*report.decoded_index) : std::string("none")) << "\n";
  return kInconsistent;
}

// ------------------------------------------------------------------ wigner

struct WignerArgs {
  std::string state = "vacuum";
  double x_min = -3.0;
  double x_max = 3.0;
  double p_min = -3.0;
  double p_max = 3.0;
  double resolution = 0.05;
  std::uint64_t seed = 1;
  std::string out;
};

int cmd_wigner(const WignerArgs& a, std::ostream& out) {
  if (!(a.resolution > 0.0) || !std::isfinite(a.resolution)) throw UsageError("--resolution must be positive");
  if (!(a.x_max > a.x_min) || !(a.p_max > a.p_min)) throw UsageError("empty phase-space window");
  const GaussianState state = parse_state_spec(a.state);

  const auto nx = static_cast<std::size_t>(std::floor((a.x_max - a.x_min) / a.resolution + 1e-9)) + 1;
  const auto np = static_cast<std::size_t>(std::floor((a.p_max - a.p_min) / a.resolution + 1e-9)) + 1;
  std::vector<PhasePoint> grid;
  grid.reserve(nx * np);
  for (std::size_t i = 0; i < nx; ++i) {
    for (std::size_t j = 0; j < np; ++j) {
      grid.push_back({a.x_min + static_cast<double>(i) * a.resolution,
                      a.p_min + static_cast<double>(j) * a.resolution});
    }
  }
  const auto w = wigner(state, 0, grid);

  json config = {{"command", "wigner"},   {"state", a.state},     {"x_window", {a.x_min, a.x_max}},
                 {"p_window", {a.p_min, a.p_max}}, {"resolution", a.resolution}, {"seed", a.seed}};
  std::string csv = csv_preamble(config) + "x,p,W\n";
  for (std::size_t i = 0; i < grid.size(); ++i) {
    csv += fmt::format("{},{},{}\n", grid[i].x, grid[i].p, w[i]);
  }
  emit(a.out, csv, out);
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Gaussian CV teleportation and interval-encoded computation simulator", kToolName};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  std::uint64_t seed = 1;
  try {
    seed = default_seed();
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }

  FidelityArgs fa;
  fa.seed = seed;
  auto* fid = app.add_subcommand("fidelity", "Teleportation fidelity versus squeezing (CSV/JSON table)");
  fid->add_option("--r-min", fa.r_min, "Smallest squeezing parameter")->capture_default_str();
  fid->add_option("--r-max", fa.r_max, "Largest squeezing parameter")->capture_default_str();
  fid->add_option("--steps", fa.steps, "Number of r values")->capture_default_str();
  fid->add_option("--gain", fa.gain, "Classical channel gain g_x = g_p")->capture_default_str();
  fid->add_option("--x", fa.x, "Coherent input x-mean")->capture_default_str();
  fid->add_option("--p", fa.p, "Coherent input p-mean")->capture_default_str();
  fid->add_option("--shots", fa.shots, "Shots per row for the sampled estimate")->capture_default_str();
  fid->add_option("--seed", fa.seed, "RNG seed");
  fid->add_option("--format", fa.format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  fid->add_option("--out", fa.out, "Output file (default stdout)");

  PostselectArgs pa;
  pa.seed = seed;
  auto* ps = app.add_subcommand("postselect", "Post-selected teleportation of a coherent state (JSON)");
  ps->add_option("--r", pa.r, "Squeezing parameter")->capture_default_str();
  ps->add_option("--x", pa.x, "Input x-mean")->capture_default_str();
  ps->add_option("--p", pa.p, "Input p-mean")->capture_default_str();
  ps->add_option("--seed", pa.seed, "Recorded for provenance; the run is deterministic");
  ps->add_option("--out", pa.out, "Output file (default stdout)");

  RunArgs ra;
  ra.seed = seed;
  auto* rn = app.add_subcommand("run", "Run a computation scheme end to end (JSON report)");
  rn->add_option("--scheme-file", ra.scheme_file, "Interval scheme JSON {x0, L, n}");
  rn->add_option("--x0", ra.x0, "Segment start");
  rn->add_option("--L", ra.L, "Segment end");
  rn->add_option("--n", ra.n, "Interval count");
  rn->add_option("--transition-file", ra.transition_file, "Transition table JSON")->required();
  rn->add_option("--word", ra.word, "Input word: bits '1100' or matrix rows '100;001;000'")->required();
  rn->add_option("--r", ra.r, "Squeezing parameter")->capture_default_str();
  rn->add_option("--G", ra.gain, "QND gain")->capture_default_str();
  rn->add_option("--shots", ra.shots, "QND shots")->capture_default_str();
  rn->add_option("--mode", ra.mode, "loop or qnd")->check(CLI::IsMember({"loop", "qnd"}))->capture_default_str();
  rn->add_option("--alice", ra.alice, "Loop scheme: input-only or input-and-alice")
      ->check(CLI::IsMember({"input-only", "input-and-alice"}))
      ->capture_default_str();
  rn->add_option("--max-iter", ra.max_iter, "Iteration bound (default: interval count)");
  rn->add_flag("--summary-only", ra.summary_only, "Omit per-shot QND records");
  rn->add_option("--seed", ra.seed, "RNG seed");
  rn->add_option("--out", ra.out, "Output file (default stdout)");

  WignerArgs wa;
  wa.seed = seed;
  auto* wg = app.add_subcommand("wigner", "Wigner function on a phase-space grid (CSV x,p,W)");
  wg->add_option("--state", wa.state,
                 "vacuum | coherent:x,p | squeezed:r[,x,p] | teleported:r,x,p | postselected:r,x,p")
      ->capture_default_str();
  wg->add_option("--x-min", wa.x_min)->capture_default_str();
  wg->add_option("--x-max", wa.x_max)->capture_default_str();
  wg->add_option("--p-min", wa.p_min)->capture_default_str();
  wg->add_option("--p-max", wa.p_max)->capture_default_str();
  wg->add_option("--resolution", wa.resolution, "Grid spacing")->capture_default_str();
  wg->add_option("--seed", wa.seed, "Recorded for provenance; the grid is deterministic");
  wg->add_option("--out", wa.out, "Output file (default stdout)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*fid) return cmd_fidelity(fa, out);
    if (*ps) return cmd_postselect(pa, out);
    if (*rn) return cmd_run(ra, out, err);
    if (*wg) return cmd_wigner(wa, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}

}  // namespace cvpctc::cli
