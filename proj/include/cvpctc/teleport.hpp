#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cvpctc/gaussian.hpp"

namespace cvpctc {

// Two-mode EPR resource: mode 0 is Alice's half, mode 1 is Bob's.
// Built from a p-squeezed vacuum (A) and an x-squeezed vacuum (B) on a
// balanced beam splitter, so Var(x_A - x_B) = Var(p_A + p_B) = 2 e^{-2r} / 4.
GaussianState make_epr(double r);

// Two x-squeezed single-mode states with identical moments, generated by a
// parametric amplifier followed by a balanced beam splitter. The output that
// leaves the splitter p-squeezed is turned by a quarter-wave phase shift.
GaussianState identical_squeezed_pair(double r);

struct TeleportConfig {
  double r = 0.0;
  double g_x = 1.0;
  double g_p = 1.0;
  bool postselect = false;
  double forced_x_u = 0.0;
  double forced_p_v = 0.0;
  // Position displacement applied to Alice's EPR half before her measurement.
  double alice_x_shift = 0.0;

  // Throws std::invalid_argument on negative/non-finite squeezing or gains.
  void validate() const;
};

struct TeleportResult {
  GaussianState output;
  MeasurementRecord x_u;
  MeasurementRecord p_v;
  double joint_density = 0.0;
  TeleportConfig config;
};

// Standard CV teleportation: Alice mixes input and her EPR half on a balanced
// beam splitter, measures x_u = (x_in - x_A)/sqrt2 and p_v = (p_in + p_A)/sqrt2,
// and Bob displaces by (sqrt2 g_x x_u, sqrt2 g_p p_v). With cfg.postselect the
// outcomes are fixed to (forced_x_u, forced_p_v) instead of sampled.
TeleportResult teleport(const GaussianState& input, const TeleportConfig& cfg, Rng& rng);
TeleportResult teleport(const GaussianState& input, const TeleportConfig& cfg, std::uint64_t seed);

// Post-selected variant: conditions on x_u = p_v = 0 and applies no
// displacement on Bob's side.
TeleportResult teleport_postselected(const GaussianState& input, double r);

// Outcome-averaged output of the feed-forward protocol (no sampling).
// At unit gain: mean_out = mean_in, cov_out = cov_in + 2 e^{-2r}/4 I.
GaussianState teleport_ensemble(const GaussianState& input, double r, double g_x, double g_p);

struct FidelityPoint {
  double r = 0.0;
  double fidelity = 0.0;
};

std::vector<FidelityPoint> fidelity_sweep(std::span<const double> r_values, double gain,
                                          const GaussianState& input);

}  // namespace cvpctc
