#pragma once

// The two computation schemes built on post-selected teleportation.
//
// Loop scheme: the classical fixed point q_f of a transition function is
// found by bounded iteration (standing in for the instantaneous time loop,
// which has no simulable dynamics), loaded onto a qumode, sent through
// post-selected teleportation and read back from Bob's Wigner marginal.
//
// QND scheme: input and output qumodes (carrying q_0 and q_f) are each
// coupled to an identically prepared squeezed ancilla by a QND gate; the
// difference of the two ancilla x-readouts, divided by the gain, is the
// distance x_in - x_out, from which q_f is located.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cvpctc/encode.hpp"
#include "cvpctc/gaussian.hpp"

namespace cvpctc {

class TransitionFunction {
 public:
  // `table[k]` is the successor of state k. Every entry must lie in
  // 0..n-1 and every halting state must be a fixed point.
  TransitionFunction(std::vector<std::size_t> table, std::vector<std::size_t> halting);

  std::size_t size() const noexcept { return table_.size(); }
  std::size_t next(std::size_t k) const;
  bool halts(std::size_t k) const;
  const std::vector<std::size_t>& table() const noexcept { return table_; }
  const std::vector<std::size_t>& halting() const noexcept { return halting_; }

 private:
  std::vector<std::size_t> table_;
  std::vector<std::size_t> halting_;
};

struct FixedPointRun {
  std::size_t final_index = 0;
  std::size_t iterations = 0;
  std::vector<std::size_t> trajectory;
};

// Applies f from `start` until a halting state or fixed point. Throws
// NonHalting (carrying the trajectory) after `max_iter` applications.
FixedPointRun iterate_to_fixed_point(const TransitionFunction& f, std::size_t start,
                                     std::size_t max_iter);

enum class PctcScheme { Loop, Qnd };
const char* to_string(PctcScheme s) noexcept;

// Whether the loop scheme also displaces Alice's EPR half onto the encoded
// position before the post-selected measurement.
enum class AliceEncoding { InputOnly, InputAndAlice };
const char* to_string(AliceEncoding a) noexcept;

struct QndReadout {
  double x_sq_out1 = 0.0;
  double x_sq_out2 = 0.0;
  double delta = 0.0;
  double inferred_length = 0.0;
};

// delta = outcome1 - outcome2, inferred_length = delta / G.
QndReadout delta_readout(const MeasurementRecord& rec1, const MeasurementRecord& rec2, double gain);

struct LoopReadout {
  AliceEncoding alice = AliceEncoding::InputOnly;
  std::optional<double> x_peak;
  std::optional<std::size_t> decoded;
  double p_mean = 0.0;
  double joint_density = 0.0;
  double bob_x_mean = 0.0;
  double bob_x_variance = 0.0;
  std::string error;
};

struct QndShot {
  QndReadout readout;
  std::optional<std::size_t> decoded;
  std::uint64_t seed = 0;
};

struct QndSummary {
  double x_in_midpoint = 0.0;
  double x_out_midpoint = 0.0;
  double expected_delta = 0.0;
  double predicted_delta_variance = 0.0;
  double mean_delta = 0.0;
  double delta_variance = 0.0;
  double success_rate = 0.0;
  std::size_t failed_shots = 0;
  std::optional<std::size_t> majority_index;
  double predicted_success = 0.0;
  // Set when the ancilla/mode noise is too large for reliable per-shot decoding.
  bool noise_limited = false;
  std::vector<QndShot> shots;
};

struct PctcRunReport {
  PctcScheme scheme = PctcScheme::Loop;
  std::size_t initial_index = 0;
  std::size_t final_index = 0;
  std::size_t iterations = 0;
  std::size_t max_iter = 0;
  std::vector<std::size_t> trajectory;
  std::optional<std::size_t> decoded_index;
  bool consistent = false;
  double r = 0.0;
  std::optional<double> gain;
  std::size_t shots = 0;
  std::uint64_t seed = 0;
  std::string note;

  std::optional<LoopReadout> loop;
  // The other Alice-encoding variant, run for comparison only.
  std::optional<LoopReadout> loop_comparison;
  std::optional<QndSummary> qnd;
};

struct LoopOptions {
  // Defaults to the interval count.
  std::optional<std::size_t> max_iter;
  AliceEncoding alice = AliceEncoding::InputOnly;
  // Wigner scan step as a fraction of the interval width.
  double resolution_fraction = 1e-3;
};

PctcRunReport run_loop_scheme(const IntervalScheme& scheme, const TransitionFunction& f,
                              const InputWord& word, double r, std::uint64_t seed,
                              const LoopOptions& options = {});

// Post-selected readout of a single loaded index; exposed for tests and the CLI.
LoopReadout loop_readout(const IntervalScheme& scheme, std::size_t k, double r, AliceEncoding alice,
                         double resolution_fraction = 1e-3);

// Four-mode state (input, output, ancilla 1, ancilla 2) after both QND gates,
// with input at midpoint(k_in) and output at midpoint(k_out).
GaussianState qnd_circuit_state(const IntervalScheme& scheme, std::size_t k_in, std::size_t k_out,
                                double r, double gain);

PctcRunReport run_qnd_scheme(const IntervalScheme& scheme, const TransitionFunction& f,
                             const InputWord& word, double r, double gain, std::size_t shots,
                             std::uint64_t seed, std::optional<std::size_t> max_iter = std::nullopt);

}  // namespace cvpctc
