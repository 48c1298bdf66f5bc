#pragma once

// Gaussian states over n qumodes and the phase-space primitives acting on them.
//
// Conventions used throughout the library:
//   - hbar = 1/2, so [x, p] = i/2 and the vacuum variance per quadrature is 1/4.
//   - Quadratures are interleaved: (x_1, p_1, x_2, p_2, ..., x_n, p_n).
//   - The symplectic form is Omega = diag(J, ..., J) with J = [[0, 1], [-1, 0]].

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "cvpctc/rng.hpp"

namespace cvpctc {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline constexpr double kVacuumVariance = 0.25;
inline constexpr double kSymmetryTolerance = 1e-10;
inline constexpr double kUncertaintyTolerance = 1e-9;
inline constexpr double kSymplecticTolerance = 1e-10;
// Measured-quadrature variances below this are treated as zero (pseudo-inverse cutoff).
inline constexpr double kPinvCutoff = 1e-12;
inline constexpr double kNearZeroDensity = 1e-12;

enum class Quadrature { X, P };

const char* to_string(Quadrature q) noexcept;

struct HomodyneResult;

// Standard symplectic form for `n_modes` modes in interleaved ordering.
Matrix symplectic_form(std::size_t n_modes);

class GaussianState {
 public:
  // Validates dimensions, symmetry and the uncertainty principle; the stored
  // covariance is re-symmetrized. Throws InvalidState on failure.
  GaussianState(Vector mean, Matrix cov);

  std::size_t n_modes() const noexcept { return static_cast<std::size_t>(mean_.size() / 2); }
  const Vector& mean() const noexcept { return mean_; }
  const Matrix& cov() const noexcept { return cov_; }

  Eigen::Vector2d mode_mean(std::size_t mode) const;
  Eigen::Matrix2d mode_cov(std::size_t mode) const;

  // Single-mode marginal (partial trace over every other mode).
  GaussianState reduced(std::size_t mode) const;

  // Williamson spectrum, ascending, one value per mode.
  std::vector<double> symplectic_eigenvalues() const;

  // Tr(rho^2) = (1/4)^n / sqrt(det cov).
  double purity() const;

 private:
  struct Trusted {};
  GaussianState(Vector mean, Matrix cov, Trusted);

  friend GaussianState tensor(const GaussianState&, const GaussianState&);
  friend GaussianState displace_x(const GaussianState&, std::size_t, double);
  friend GaussianState displace_p(const GaussianState&, std::size_t, double);
  friend class SymplecticOp;
  friend HomodyneResult homodyne(const GaussianState&, std::size_t, Quadrature,
                                 std::optional<double>, Rng&);

  Vector mean_;
  Matrix cov_;
};

GaussianState vacuum(std::size_t n_modes);

// Coherent state with the given quadrature means.
GaussianState coherent(double x, double p);

// Joint state of two independent subsystems; modes of `a` come first.
GaussianState tensor(const GaussianState& a, const GaussianState& b);

// Linear phase-space map acting on an ordered subset of modes:
//   r -> matrix * r + shift   on the quadratures of `modes`.
// Mode indices are interpreted against the state it is applied to.
class SymplecticOp {
 public:
  // Throws InvalidOp if `matrix` is not symplectic, std::invalid_argument on
  // shape mismatch or repeated modes.
  SymplecticOp(std::vector<std::size_t> modes, Matrix matrix, Vector shift);
  SymplecticOp(std::vector<std::size_t> modes, Matrix matrix);

  const std::vector<std::size_t>& modes() const noexcept { return modes_; }
  const Matrix& matrix() const noexcept { return matrix_; }
  const Vector& shift() const noexcept { return shift_; }

  SymplecticOp inverse() const;

  // Embeds the local action into a full 2n x 2n matrix and 2n shift.
  Matrix full_matrix(std::size_t n_modes) const;
  Vector full_shift(std::size_t n_modes) const;

  GaussianState apply_to(const GaussianState& state) const;

 private:
  std::vector<std::size_t> modes_;
  Matrix matrix_;
  Vector shift_;
};

// mean' = S mean + shift, cov' = S cov S^T (re-symmetrized).
GaussianState apply(const GaussianState& state, const SymplecticOp& op);

// Largest entry of |S Omega S^T - Omega|.
double symplectic_residual(const Matrix& s);

// axis = X: x -> e^{-r} x, p -> e^{r} p. axis = P swaps the roles.
SymplecticOp squeeze_op(std::size_t mode, double r, Quadrature axis);

// x -> cos(theta) x + sin(theta) p, p -> -sin(theta) x + cos(theta) p.
SymplecticOp phase_rotation_op(std::size_t mode, double theta);

// (q_a, q_b) -> (sqrt(t) q_a + sqrt(1-t) q_b, -sqrt(1-t) q_a + sqrt(t) q_b)
// for q in {x, p}. t = 1/2 is the balanced ("half") beam splitter.
SymplecticOp beam_splitter_op(std::size_t mode_a, std::size_t mode_b, double transmissivity);

// Non-degenerate parametric amplifier:
//   x_a -> cosh r x_a + sinh r x_b,  p_a -> cosh r p_a - sinh r p_b  (and a <-> b).
SymplecticOp two_mode_squeeze_op(std::size_t mode_a, std::size_t mode_b, double r);

// QND coupling generated by x_1 p_2 with gain G:
//   x_1 -> x_1,  x_2 -> x_2 + G x_1,  p_1 -> p_1 - G p_2,  p_2 -> p_2.
SymplecticOp qnd_op(std::size_t mode_1, std::size_t mode_2, double gain);

// Position displacement X(s): shifts the x-mean of `mode` by s.
GaussianState displace_x(const GaussianState& state, std::size_t mode, double s);

// Momentum displacement Z(p0): shifts the p-mean of `mode` by p0.
GaussianState displace_p(const GaussianState& state, std::size_t mode, double p0);

struct MeasurementRecord {
  std::size_t mode = 0;
  Quadrature quadrature = Quadrature::X;
  double outcome = 0.0;
  // Marginal normal density of the measured quadrature at `outcome`.
  double density = 0.0;
  double marginal_mean = 0.0;
  double marginal_variance = 0.0;
  bool forced = false;
  bool near_zero_density = false;
  std::optional<std::uint64_t> seed;
};

struct HomodyneResult {
  // Empty when the measured mode was the only one.
  std::optional<GaussianState> remaining;
  MeasurementRecord record;
};

// Ideal homodyne detection of one quadrature. Without `forced_outcome` the
// outcome is drawn from the Gaussian marginal; either way the other modes are
// conditioned on it (Schur complement) and the measured mode is removed.
HomodyneResult homodyne(const GaussianState& state, std::size_t mode, Quadrature quadrature,
                        std::optional<double> forced_outcome, Rng& rng);

HomodyneResult homodyne(const GaussianState& state, std::size_t mode, Quadrature quadrature,
                        std::optional<double> forced_outcome = std::nullopt,
                        std::optional<std::uint64_t> rng_seed = std::nullopt);

// Overlap <psi_in| rho_out |psi_in> of a pure single-mode Gaussian input with
// an arbitrary single-mode Gaussian output.
double fidelity_pure(const GaussianState& input, const GaussianState& output);

struct PhasePoint {
  double x = 0.0;
  double p = 0.0;
};

// Wigner function of the reduced state of `mode` at each grid point.
std::vector<double> wigner(const GaussianState& state, std::size_t mode,
                           std::span<const PhasePoint> grid);

struct Window {
  double lo = 0.0;
  double hi = 0.0;
};

// Scans the x-marginal of the Wigner function of `mode` on lo, lo+res, ...
// and returns the maximizing x. Throws OutOfWindow if the maximum sits on
// either end of the scan.
double peak_x(const GaussianState& state, std::size_t mode, Window window, double resolution);

}  // namespace cvpctc
