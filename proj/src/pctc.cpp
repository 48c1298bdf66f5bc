#include "cvpctc/pctc.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "cvpctc/errors.hpp"
#include "cvpctc/rng.hpp"
#include "cvpctc/teleport.hpp"

namespace cvpctc {

namespace {

constexpr const char* kLoopNote =
    "loop scheme: the fixed point q_f is found by bounded classical iteration, a surrogate for the "
    "instantaneous time loop; the quantum part loads q_f, teleports it with post-selection and "
    "checks the Wigner readout against the classical result";

constexpr const char* kQndNote =
    "qnd scheme: ancillas are identically prepared but independent squeezed modes, so the "
    "difference readout keeps their residual noise; measurements run in causal order";

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

void check_scheme_fits(const IntervalScheme& scheme, const TransitionFunction& f,
                       std::uint64_t start, const char* what) {
  if (f.size() != scheme.n()) {
    std::ostringstream os;
    os << what << ": transition table covers " << f.size() << " states but the scheme has "
       << scheme.n() << " intervals";
    throw std::invalid_argument(os.str());
  }
  if (start >= scheme.n()) {
    std::ostringstream os;
    os << what << ": input word selects interval " << start << " outside 0.." << scheme.n() - 1;
    throw std::out_of_range(os.str());
  }
}

}  // namespace

TransitionFunction::TransitionFunction(std::vector<std::size_t> table, std::vector<std::size_t> halting)
    : table_(std::move(table)), halting_(std::move(halting)) {
  if (table_.empty()) throw std::invalid_argument("TransitionFunction: empty table");
  for (std::size_t k = 0; k < table_.size(); ++k) {
    if (table_[k] >= table_.size()) {
      std::ostringstream os;
      os << "TransitionFunction: successor of " << k << " is " << table_[k] << ", outside 0.."
         << table_.size() - 1;
      throw std::invalid_argument(os.str());
    }
  }
  std::sort(halting_.begin(), halting_.end());
  halting_.erase(std::unique(halting_.begin(), halting_.end()), halting_.end());
  for (auto h : halting_) {
    if (h >= table_.size() || table_[h] != h) {
      throw std::invalid_argument("TransitionFunction: halting state " + std::to_string(h) +
                                  " is not a fixed point");
    }
  }
}

std::size_t TransitionFunction::next(std::size_t k) const {
  if (k >= table_.size()) throw std::out_of_range("TransitionFunction: state out of range");
  return table_[k];
}

bool TransitionFunction::halts(std::size_t k) const {
  return std::binary_search(halting_.begin(), halting_.end(), k) || next(k) == k;
}

FixedPointRun iterate_to_fixed_point(const TransitionFunction& f, std::size_t start,
                                     std::size_t max_iter) {
  FixedPointRun run;
  std::size_t k = start;
  run.trajectory.push_back(k);
  while (!f.halts(k)) {
    if (run.iterations == max_iter) {
      std::ostringstream os;
      os << "no fixed point reached from state " << start << " within " << max_iter
         << " iterations";
      throw NonHalting(os.str(), run.trajectory);
    }
    k = f.next(k);
    ++run.iterations;
    run.trajectory.push_back(k);
  }
  run.final_index = k;
  return run;
}

const char* to_string(PctcScheme s) noexcept { return s == PctcScheme::Loop ? "loop" : "qnd"; }

const char* to_string(AliceEncoding a) noexcept {
  return a == AliceEncoding::InputOnly ? "input-only" : "input-and-alice";
}

QndReadout delta_readout(const MeasurementRecord& rec1, const MeasurementRecord& rec2, double gain) {
  if (gain == 0.0 || !std::isfinite(gain)) {
    throw std::invalid_argument("delta_readout: gain must be finite and nonzero");
  }
  if (rec1.quadrature != Quadrature::X || rec2.quadrature != Quadrature::X) {
    throw std::invalid_argument("delta_readout: both records must be X-quadrature readouts");
  }
  QndReadout out;
  out.x_sq_out1 = rec1.outcome;
  out.x_sq_out2 = rec2.outcome;
  out.delta = rec1.outcome - rec2.outcome;
  out.inferred_length = out.delta / gain;
  return out;
}

LoopReadout loop_readout(const IntervalScheme& scheme, std::size_t k, double r, AliceEncoding alice,
                         double resolution_fraction) {
  const GaussianState input = encode_index_onto(vacuum(1), 0, scheme, k);
  TeleportConfig cfg;
  cfg.r = r;
  cfg.g_x = 0.0;
  cfg.g_p = 0.0;
  cfg.postselect = true;
  if (alice == AliceEncoding::InputAndAlice) cfg.alice_x_shift = scheme.midpoint(k);
  Rng unused(0);
  const TeleportResult tr = teleport(input, cfg, unused);

  LoopReadout out;
  out.alice = alice;
  out.joint_density = tr.joint_density;
  out.p_mean = tr.output.mode_mean(0)(1);
  out.bob_x_mean = tr.output.mode_mean(0)(0);
  out.bob_x_variance = tr.output.mode_cov(0)(0, 0);
  try {
    const double x = peak_x(tr.output, 0, Window{scheme.x0(), scheme.end()},
                            resolution_fraction * scheme.alpha());
    out.x_peak = x;
    out.decoded = decode(scheme, x).index;
  } catch (const OutOfWindow& e) {
    out.x_peak = e.peak();
    out.error = e.what();
  } catch (const OutOfSegment& e) {
    out.error = e.what();
  }
  return out;
}

PctcRunReport run_loop_scheme(const IntervalScheme& scheme, const TransitionFunction& f,
                              const InputWord& word, double r, std::uint64_t seed,
                              const LoopOptions& options) {
  const auto start = index_of(word);
  check_scheme_fits(scheme, f, start, "run_loop_scheme");
  const std::size_t max_iter = options.max_iter.value_or(scheme.n());
  if (max_iter == 0) throw std::invalid_argument("run_loop_scheme: max_iter must be at least 1");

  const FixedPointRun fp = iterate_to_fixed_point(f, static_cast<std::size_t>(start), max_iter);

  PctcRunReport report;
  report.scheme = PctcScheme::Loop;
  report.initial_index = static_cast<std::size_t>(start);
  report.final_index = fp.final_index;
  report.iterations = fp.iterations;
  report.max_iter = max_iter;
  report.trajectory = fp.trajectory;
  report.r = r;
  report.seed = seed;
  report.note = kLoopNote;

  report.loop = loop_readout(scheme, fp.final_index, r, options.alice, options.resolution_fraction);
  const auto other = options.alice == AliceEncoding::InputOnly ? AliceEncoding::InputAndAlice
                                                               : AliceEncoding::InputOnly;
  report.loop_comparison = loop_readout(scheme, fp.final_index, r, other, options.resolution_fraction);

  report.decoded_index = report.loop->decoded;
  report.consistent = report.decoded_index.has_value() && *report.decoded_index == report.final_index;
  return report;
}

GaussianState qnd_circuit_state(const IntervalScheme& scheme, std::size_t k_in, std::size_t k_out,
                                double r, double gain) {
  GaussianState modes = identical_squeezed_pair(r);
  modes = encode_index_onto(modes, 0, scheme, k_in);
  modes = encode_index_onto(modes, 1, scheme, k_out);
  GaussianState s = tensor(modes, identical_squeezed_pair(r));
  s = apply(s, qnd_op(0, 2, gain));
  return apply(s, qnd_op(1, 3, gain));
}

PctcRunReport run_qnd_scheme(const IntervalScheme& scheme, const TransitionFunction& f,
                             const InputWord& word, double r, double gain, std::size_t shots,
                             std::uint64_t seed, std::optional<std::size_t> max_iter) {
  if (gain == 0.0 || !std::isfinite(gain)) {
    throw std::invalid_argument("run_qnd_scheme: gain G must be finite and nonzero");
  }
  if (shots == 0) throw std::invalid_argument("run_qnd_scheme: shots must be at least 1");
  const auto start = index_of(word);
  check_scheme_fits(scheme, f, start, "run_qnd_scheme");
  const std::size_t bound = max_iter.value_or(scheme.n());
  const FixedPointRun fp = iterate_to_fixed_point(f, static_cast<std::size_t>(start), bound);

  PctcRunReport report;
  report.scheme = PctcScheme::Qnd;
  report.initial_index = static_cast<std::size_t>(start);
  report.final_index = fp.final_index;
  report.iterations = fp.iterations;
  report.max_iter = bound;
  report.trajectory = fp.trajectory;
  report.r = r;
  report.gain = gain;
  report.shots = shots;
  report.seed = seed;
  report.note = kQndNote;

  const GaussianState circuit = qnd_circuit_state(scheme, report.initial_index, fp.final_index, r, gain);

  QndSummary summary;
  summary.x_in_midpoint = scheme.midpoint(report.initial_index);
  summary.x_out_midpoint = scheme.midpoint(fp.final_index);
  // Ancilla quadratures sit at indices 4 (x_anc1) and 6 (x_anc2).
  summary.expected_delta = circuit.mean()(4) - circuit.mean()(6);
  const auto& c = circuit.cov();
  summary.predicted_delta_variance = c(4, 4) + c(6, 6) - 2.0 * c(4, 6);

  const double mu = summary.x_in_midpoint - summary.expected_delta / gain;
  const double sd = std::sqrt(summary.predicted_delta_variance) / std::abs(gain);
  const double lo = scheme.x0() + static_cast<double>(fp.final_index) * scheme.alpha();
  const double hi = lo + scheme.alpha();
  summary.predicted_success = normal_cdf((hi - mu) / sd) - normal_cdf((lo - mu) / sd);
  summary.noise_limited = summary.predicted_success < 0.99;

  summary.shots.reserve(shots);
  std::map<std::size_t, std::size_t> votes;
  std::size_t hits = 0;
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::size_t i = 0; i < shots; ++i) {
    QndShot shot;
    shot.seed = derive_seed(seed, i);
    Rng rng(shot.seed);
    auto h1 = homodyne(circuit, 2, Quadrature::X, std::nullopt, rng);
    // Ancilla 2 moves from index 3 to 2 once ancilla 1 is removed.
    auto h2 = homodyne(*h1.remaining, 2, Quadrature::X, std::nullopt, rng);
    shot.readout = delta_readout(h1.record, h2.record, gain);
    const double d = shot.readout.delta - summary.expected_delta;
    sum += d;
    sum_sq += d * d;
    try {
      shot.decoded = decode(scheme, summary.x_in_midpoint - shot.readout.inferred_length).index;
      ++votes[*shot.decoded];
      if (*shot.decoded == fp.final_index) ++hits;
    } catch (const OutOfSegment&) {
      ++summary.failed_shots;
    }
    summary.shots.push_back(shot);
  }
  const double n = static_cast<double>(shots);
  summary.mean_delta = summary.expected_delta + sum / n;
  summary.delta_variance = shots > 1 ? (sum_sq - sum * sum / n) / (n - 1.0) : 0.0;
  summary.success_rate = static_cast<double>(hits) / n;
  std::size_t best_votes = 0;
  for (const auto& [index, count] : votes) {
    if (count > best_votes) {
      best_votes = count;
      summary.majority_index = index;
    }
  }

  report.decoded_index = summary.majority_index;
  report.consistent = report.decoded_index.has_value() && *report.decoded_index == report.final_index;
  report.qnd = std::move(summary);
  return report;
}

}  // namespace cvpctc
