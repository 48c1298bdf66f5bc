#include "cvpctc/teleport.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace cvpctc {

namespace {

constexpr std::size_t kInput = 0;
constexpr std::size_t kAlice = 1;
constexpr std::size_t kBob = 2;

void check_squeezing(double r, const char* what) {
  if (!(r >= 0.0) || !std::isfinite(r)) {
    throw std::invalid_argument(std::string(what) + ": squeezing r must be finite and >= 0");
  }
}

void check_single_mode(const GaussianState& input, const char* what) {
  if (input.n_modes() != 1) {
    throw std::invalid_argument(std::string(what) + ": input must be a single-mode state");
  }
}

}  // namespace

GaussianState make_epr(double r) {
  check_squeezing(r, "make_epr");
  GaussianState s = vacuum(2);
  s = apply(s, squeeze_op(0, r, Quadrature::P));
  s = apply(s, squeeze_op(1, r, Quadrature::X));
  return apply(s, beam_splitter_op(1, 0, 0.5));
}

GaussianState identical_squeezed_pair(double r) {
  check_squeezing(r, "identical_squeezed_pair");
  GaussianState s = vacuum(2);
  s = apply(s, two_mode_squeeze_op(0, 1, r));
  // Mode 0 leaves p-squeezed, mode 1 x-squeezed; the local-oscillator
  // pickoffs are ideal so nothing else touches the beams.
  s = apply(s, beam_splitter_op(0, 1, 0.5));
  return apply(s, phase_rotation_op(0, std::numbers::pi / 2.0));
}

void TeleportConfig::validate() const {
  check_squeezing(r, "TeleportConfig");
  if (!std::isfinite(g_x) || !std::isfinite(g_p)) {
    throw std::invalid_argument("TeleportConfig: gains must be finite");
  }
  if (!std::isfinite(forced_x_u) || !std::isfinite(forced_p_v) || !std::isfinite(alice_x_shift)) {
    throw std::invalid_argument("TeleportConfig: forced outcomes and shifts must be finite");
  }
}

TeleportResult teleport(const GaussianState& input, const TeleportConfig& cfg, Rng& rng) {
  cfg.validate();
  check_single_mode(input, "teleport");

  GaussianState joint = tensor(input, make_epr(cfg.r));
  if (cfg.alice_x_shift != 0.0) joint = displace_x(joint, kAlice, cfg.alice_x_shift);

  // After this splitter mode 0 carries (in - A)/sqrt2 and mode 1 (in + A)/sqrt2.
  joint = apply(joint, beam_splitter_op(kAlice, kInput, 0.5));

  const auto forced_x = cfg.postselect ? std::optional<double>(cfg.forced_x_u) : std::nullopt;
  const auto forced_p = cfg.postselect ? std::optional<double>(cfg.forced_p_v) : std::nullopt;

  auto hx = homodyne(joint, kInput, Quadrature::X, forced_x, rng);
  // Modes renumber after removal: Alice's port is now 0, Bob is 1.
  auto hp = homodyne(*hx.remaining, kAlice - 1, Quadrature::P, forced_p, rng);
  hp.record.mode = kAlice;

  GaussianState bob = *hp.remaining;
  const double x_u = hx.record.outcome;
  const double p_v = hp.record.outcome;
  bob = displace_x(bob, 0, std::numbers::sqrt2 * cfg.g_x * x_u);
  bob = displace_p(bob, 0, std::numbers::sqrt2 * cfg.g_p * p_v);

  const double joint_density = hx.record.density * hp.record.density;
  return TeleportResult{std::move(bob), hx.record, hp.record, joint_density, cfg};
}

TeleportResult teleport(const GaussianState& input, const TeleportConfig& cfg, std::uint64_t seed) {
  Rng rng(seed);
  auto result = teleport(input, cfg, rng);
  if (!cfg.postselect) {
    result.x_u.seed = seed;
    result.p_v.seed = seed;
  }
  return result;
}

TeleportResult teleport_postselected(const GaussianState& input, double r) {
  TeleportConfig cfg;
  cfg.r = r;
  cfg.g_x = 0.0;
  cfg.g_p = 0.0;
  cfg.postselect = true;
  Rng unused(0);
  return teleport(input, cfg, unused);
}

GaussianState teleport_ensemble(const GaussianState& input, double r, double g_x, double g_p) {
  check_single_mode(input, "teleport_ensemble");
  check_squeezing(r, "teleport_ensemble");
  const GaussianState joint = tensor(input, make_epr(r));
  // x_out = x_B + g_x (x_in - x_A),  p_out = p_B + g_p (p_in + p_A).
  Matrix map = Matrix::Zero(2, 6);
  map(0, 2 * kInput) = g_x;
  map(0, 2 * kAlice) = -g_x;
  map(0, 2 * kBob) = 1.0;
  map(1, 2 * kInput + 1) = g_p;
  map(1, 2 * kAlice + 1) = g_p;
  map(1, 2 * kBob + 1) = 1.0;
  return GaussianState(map * joint.mean(), map * joint.cov() * map.transpose());
}

std::vector<FidelityPoint> fidelity_sweep(std::span<const double> r_values, double gain,
                                          const GaussianState& input) {
  if (r_values.empty()) throw std::invalid_argument("fidelity_sweep: no squeezing values");
  std::vector<FidelityPoint> table;
  table.reserve(r_values.size());
  for (double r : r_values) {
    table.push_back({r, fidelity_pure(input, teleport_ensemble(input, r, gain, gain))});
  }
  return table;
}

}  // namespace cvpctc
