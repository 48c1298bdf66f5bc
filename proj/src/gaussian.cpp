#include "cvpctc/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>

#include "cvpctc/errors.hpp"

namespace cvpctc {

namespace {

void symmetrize(Matrix& m) { m = 0.5 * (m + m.transpose()).eval(); }

std::size_t quad_index(std::size_t mode, Quadrature q) {
  return 2 * mode + (q == Quadrature::P ? 1 : 0);
}

void check_mode(std::size_t mode, std::size_t n_modes, const char* what) {
  if (mode >= n_modes) {
    std::ostringstream os;
    os << what << ": mode " << mode << " out of range for " << n_modes << "-mode state";
    throw std::invalid_argument(os.str());
  }
}

double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

// Williamson spectrum via the Cholesky factor: L^T Omega L is antisymmetric
// and similar to Omega cov, so its eigenvalues are +-i nu_k.
std::vector<double> williamson(const Matrix& cov) {
  const auto n = static_cast<std::size_t>(cov.rows() / 2);
  Eigen::LLT<Matrix> llt(cov);
  if (llt.info() != Eigen::Success) {
    throw InvalidState("covariance matrix is not positive definite");
  }
  const Matrix l = llt.matrixL();
  const Matrix k = l.transpose() * symplectic_form(n) * l;
  const Eigen::MatrixXcd h = std::complex<double>(0.0, 1.0) * k.cast<std::complex<double>>();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h, Eigen::EigenvaluesOnly);
  const Vector& ev = solver.eigenvalues();
  std::vector<double> nu(n);
  for (std::size_t i = 0; i < n; ++i) nu[i] = ev(static_cast<Eigen::Index>(n + i));
  return nu;
}

double normal_density(double x, double mean, double variance) {
  const double d = x - mean;
  return std::exp(-0.5 * d * d / variance) / std::sqrt(2.0 * std::numbers::pi * variance);
}

}  // namespace

const char* to_string(Quadrature q) noexcept { return q == Quadrature::X ? "X" : "P"; }

Matrix symplectic_form(std::size_t n_modes) {
  const auto dim = static_cast<Eigen::Index>(2 * n_modes);
  Matrix omega = Matrix::Zero(dim, dim);
  for (Eigen::Index i = 0; i < dim; i += 2) {
    omega(i, i + 1) = 1.0;
    omega(i + 1, i) = -1.0;
  }
  return omega;
}

GaussianState::GaussianState(Vector mean, Matrix cov) : mean_(std::move(mean)), cov_(std::move(cov)) {
  if (mean_.size() == 0 || mean_.size() % 2 != 0) {
    throw InvalidState("mean vector must have positive even length 2n");
  }
  if (cov_.rows() != mean_.size() || cov_.cols() != mean_.size()) {
    throw InvalidState("covariance dimensions do not match the mean vector");
  }
  if (!mean_.allFinite() || !cov_.allFinite()) {
    throw InvalidState("state contains non-finite entries");
  }
  const double scale = std::max(1.0, max_abs(cov_));
  if (max_abs(cov_ - cov_.transpose()) > kSymmetryTolerance * scale) {
    throw InvalidState("covariance matrix is not symmetric");
  }
  symmetrize(cov_);
  const auto nu = williamson(cov_);
  if (nu.front() < kVacuumVariance - kUncertaintyTolerance) {
    std::ostringstream os;
    os << "covariance violates the uncertainty principle (min symplectic eigenvalue "
       << nu.front() << " < 1/4)";
    throw InvalidState(os.str());
  }
}

GaussianState::GaussianState(Vector mean, Matrix cov, Trusted)
    : mean_(std::move(mean)), cov_(std::move(cov)) {
  symmetrize(cov_);
}

Eigen::Vector2d GaussianState::mode_mean(std::size_t mode) const {
  check_mode(mode, n_modes(), "mode_mean");
  return mean_.segment<2>(static_cast<Eigen::Index>(2 * mode));
}

Eigen::Matrix2d GaussianState::mode_cov(std::size_t mode) const {
  check_mode(mode, n_modes(), "mode_cov");
  const auto i = static_cast<Eigen::Index>(2 * mode);
  return cov_.block<2, 2>(i, i);
}

GaussianState GaussianState::reduced(std::size_t mode) const {
  return GaussianState(Vector(mode_mean(mode)), Matrix(mode_cov(mode)), Trusted{});
}

std::vector<double> GaussianState::symplectic_eigenvalues() const { return williamson(cov_); }

double GaussianState::purity() const {
  return std::pow(kVacuumVariance, static_cast<double>(n_modes())) / std::sqrt(cov_.determinant());
}

GaussianState vacuum(std::size_t n_modes) {
  if (n_modes == 0) throw std::invalid_argument("vacuum: mode count must be at least 1");
  const auto dim = static_cast<Eigen::Index>(2 * n_modes);
  return GaussianState(Vector::Zero(dim), kVacuumVariance * Matrix::Identity(dim, dim));
}

GaussianState coherent(double x, double p) {
  return displace_p(displace_x(vacuum(1), 0, x), 0, p);
}

GaussianState tensor(const GaussianState& a, const GaussianState& b) {
  const auto na = a.mean().size();
  const auto nb = b.mean().size();
  Vector mean(na + nb);
  mean << a.mean(), b.mean();
  Matrix cov = Matrix::Zero(na + nb, na + nb);
  cov.topLeftCorner(na, na) = a.cov();
  cov.bottomRightCorner(nb, nb) = b.cov();
  return GaussianState(std::move(mean), std::move(cov), GaussianState::Trusted{});
}

double symplectic_residual(const Matrix& s) {
  if (s.rows() != s.cols() || s.rows() % 2 != 0) {
    throw std::invalid_argument("symplectic_residual: matrix must be square with even size");
  }
  const Matrix omega = symplectic_form(static_cast<std::size_t>(s.rows() / 2));
  return max_abs(s * omega * s.transpose() - omega);
}

SymplecticOp::SymplecticOp(std::vector<std::size_t> modes, Matrix matrix, Vector shift)
    : modes_(std::move(modes)), matrix_(std::move(matrix)), shift_(std::move(shift)) {
  const auto dim = static_cast<Eigen::Index>(2 * modes_.size());
  if (modes_.empty()) throw std::invalid_argument("SymplecticOp: no modes");
  if (std::set<std::size_t>(modes_.begin(), modes_.end()).size() != modes_.size()) {
    throw std::invalid_argument("SymplecticOp: repeated mode index");
  }
  if (matrix_.rows() != dim || matrix_.cols() != dim || shift_.size() != dim) {
    throw std::invalid_argument("SymplecticOp: matrix/shift size does not match mode list");
  }
  if (!matrix_.allFinite() || !shift_.allFinite()) {
    throw InvalidOp("SymplecticOp: non-finite entries");
  }
  const double scale = std::max(1.0, max_abs(matrix_) * max_abs(matrix_));
  if (symplectic_residual(matrix_) > kSymplecticTolerance * scale) {
    throw InvalidOp("SymplecticOp: matrix does not preserve the symplectic form");
  }
}

SymplecticOp::SymplecticOp(std::vector<std::size_t> modes, Matrix matrix)
    : SymplecticOp(modes, std::move(matrix), Vector::Zero(static_cast<Eigen::Index>(2 * modes.size()))) {}

SymplecticOp SymplecticOp::inverse() const {
  // S^{-1} = Omega^T S^T Omega for symplectic S.
  const Matrix omega = symplectic_form(modes_.size());
  Matrix inv = omega.transpose() * matrix_.transpose() * omega;
  Vector inv_shift = -(inv * shift_);
  return SymplecticOp(modes_, std::move(inv), std::move(inv_shift));
}

Matrix SymplecticOp::full_matrix(std::size_t n_modes) const {
  const auto dim = static_cast<Eigen::Index>(2 * n_modes);
  for (auto m : modes_) check_mode(m, n_modes, "SymplecticOp");
  Matrix full = Matrix::Identity(dim, dim);
  for (std::size_t i = 0; i < modes_.size(); ++i) {
    for (std::size_t j = 0; j < modes_.size(); ++j) {
      full.block<2, 2>(static_cast<Eigen::Index>(2 * modes_[i]), static_cast<Eigen::Index>(2 * modes_[j])) =
          matrix_.block<2, 2>(static_cast<Eigen::Index>(2 * i), static_cast<Eigen::Index>(2 * j));
    }
  }
  return full;
}

Vector SymplecticOp::full_shift(std::size_t n_modes) const {
  Vector full = Vector::Zero(static_cast<Eigen::Index>(2 * n_modes));
  for (std::size_t i = 0; i < modes_.size(); ++i) {
    check_mode(modes_[i], n_modes, "SymplecticOp");
    full.segment<2>(static_cast<Eigen::Index>(2 * modes_[i])) =
        shift_.segment<2>(static_cast<Eigen::Index>(2 * i));
  }
  return full;
}

GaussianState SymplecticOp::apply_to(const GaussianState& state) const {
  const Matrix s = full_matrix(state.n_modes());
  Vector mean = s * state.mean() + full_shift(state.n_modes());
  Matrix cov = s * state.cov() * s.transpose();
  return GaussianState(std::move(mean), std::move(cov), GaussianState::Trusted{});
}

GaussianState apply(const GaussianState& state, const SymplecticOp& op) { return op.apply_to(state); }

SymplecticOp squeeze_op(std::size_t mode, double r, Quadrature axis) {
  if (!std::isfinite(r)) throw std::invalid_argument("squeeze_op: r must be finite");
  const double sx = axis == Quadrature::X ? std::exp(-r) : std::exp(r);
  Matrix m(2, 2);
  m << sx, 0.0, 0.0, 1.0 / sx;
  return SymplecticOp({mode}, std::move(m));
}

SymplecticOp phase_rotation_op(std::size_t mode, double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  Matrix m(2, 2);
  m << c, s, -s, c;
  return SymplecticOp({mode}, std::move(m));
}

SymplecticOp beam_splitter_op(std::size_t mode_a, std::size_t mode_b, double transmissivity) {
  if (!(transmissivity >= 0.0 && transmissivity <= 1.0)) {
    throw std::invalid_argument("beam_splitter_op: transmissivity must lie in [0, 1]");
  }
  if (mode_a == mode_b) throw std::invalid_argument("beam_splitter_op: modes must be distinct");
  const double t = std::sqrt(transmissivity);
  const double r = std::sqrt(1.0 - transmissivity);
  // Local ordering (x_a, p_a, x_b, p_b).
  Matrix m = Matrix::Zero(4, 4);
  m(0, 0) = t;  m(0, 2) = r;
  m(1, 1) = t;  m(1, 3) = r;
  m(2, 0) = -r; m(2, 2) = t;
  m(3, 1) = -r; m(3, 3) = t;
  return SymplecticOp({mode_a, mode_b}, std::move(m));
}

SymplecticOp two_mode_squeeze_op(std::size_t mode_a, std::size_t mode_b, double r) {
  if (!std::isfinite(r)) throw std::invalid_argument("two_mode_squeeze_op: r must be finite");
  if (mode_a == mode_b) throw std::invalid_argument("two_mode_squeeze_op: modes must be distinct");
  const double c = std::cosh(r);
  const double s = std::sinh(r);
  Matrix m = Matrix::Zero(4, 4);
  m(0, 0) = c;  m(0, 2) = s;
  m(1, 1) = c;  m(1, 3) = -s;
  m(2, 0) = s;  m(2, 2) = c;
  m(3, 1) = -s; m(3, 3) = c;
  return SymplecticOp({mode_a, mode_b}, std::move(m));
}

SymplecticOp qnd_op(std::size_t mode_1, std::size_t mode_2, double gain) {
  if (!std::isfinite(gain)) throw std::invalid_argument("qnd_op: gain must be finite");
  if (mode_1 == mode_2) throw std::invalid_argument("qnd_op: modes must be distinct");
  Matrix m = Matrix::Identity(4, 4);
  m(2, 0) = gain;   // x_2 += G x_1
  m(1, 3) = -gain;  // p_1 -= G p_2
  return SymplecticOp({mode_1, mode_2}, std::move(m));
}

GaussianState displace_x(const GaussianState& state, std::size_t mode, double s) {
  check_mode(mode, state.n_modes(), "displace_x");
  Vector mean = state.mean();
  mean(static_cast<Eigen::Index>(quad_index(mode, Quadrature::X))) += s;
  return GaussianState(std::move(mean), state.cov(), GaussianState::Trusted{});
}

GaussianState displace_p(const GaussianState& state, std::size_t mode, double p0) {
  check_mode(mode, state.n_modes(), "displace_p");
  Vector mean = state.mean();
  mean(static_cast<Eigen::Index>(quad_index(mode, Quadrature::P))) += p0;
  return GaussianState(std::move(mean), state.cov(), GaussianState::Trusted{});
}

HomodyneResult homodyne(const GaussianState& state, std::size_t mode, Quadrature quadrature,
                        std::optional<double> forced_outcome, Rng& rng) {
  const std::size_t n = state.n_modes();
  check_mode(mode, n, "homodyne");
  const auto q = static_cast<Eigen::Index>(quad_index(mode, quadrature));
  const double mu = state.mean()(q);
  const double var = state.cov()(q, q);

  MeasurementRecord rec;
  rec.mode = mode;
  rec.quadrature = quadrature;
  rec.marginal_mean = mu;
  rec.marginal_variance = var;
  if (forced_outcome) {
    rec.outcome = *forced_outcome;
    rec.forced = true;
  } else {
    std::normal_distribution<double> gauss(0.0, 1.0);
    rec.outcome = mu + std::sqrt(std::max(var, 0.0)) * gauss(rng);
  }
  rec.density = normal_density(rec.outcome, mu, std::max(var, kPinvCutoff));
  rec.near_zero_density = rec.density < kNearZeroDensity;

  HomodyneResult result;
  result.record = rec;
  if (n == 1) return result;

  // Indices of every quadrature not belonging to the measured mode.
  const auto keep_dim = static_cast<Eigen::Index>(2 * (n - 1));
  std::vector<Eigen::Index> keep;
  keep.reserve(static_cast<std::size_t>(keep_dim));
  for (std::size_t m = 0; m < n; ++m) {
    if (m == mode) continue;
    keep.push_back(static_cast<Eigen::Index>(2 * m));
    keep.push_back(static_cast<Eigen::Index>(2 * m + 1));
  }
  Vector mean(keep_dim);
  Matrix cov(keep_dim, keep_dim);
  Vector cross(keep_dim);
  for (Eigen::Index i = 0; i < keep_dim; ++i) {
    mean(i) = state.mean()(keep[static_cast<std::size_t>(i)]);
    cross(i) = state.cov()(keep[static_cast<std::size_t>(i)], q);
    for (Eigen::Index j = 0; j < keep_dim; ++j) {
      cov(i, j) = state.cov()(keep[static_cast<std::size_t>(i)], keep[static_cast<std::size_t>(j)]);
    }
  }
  if (var > kPinvCutoff) {
    mean += cross * ((rec.outcome - mu) / var);
    cov -= cross * cross.transpose() / var;
  }
  result.remaining.emplace(GaussianState(std::move(mean), std::move(cov), GaussianState::Trusted{}));
  return result;
}

HomodyneResult homodyne(const GaussianState& state, std::size_t mode, Quadrature quadrature,
                        std::optional<double> forced_outcome, std::optional<std::uint64_t> rng_seed) {
  Rng rng(rng_seed.value_or(0));
  auto result = homodyne(state, mode, quadrature, forced_outcome, rng);
  if (!forced_outcome) result.record.seed = rng_seed.value_or(0);
  return result;
}

double fidelity_pure(const GaussianState& input, const GaussianState& output) {
  if (input.n_modes() != 1 || output.n_modes() != 1) {
    throw std::invalid_argument("fidelity_pure: both states must be single-mode");
  }
  if (std::abs(input.purity() - 1.0) > 1e-6) {
    throw std::invalid_argument("fidelity_pure: input state is not pure");
  }
  const Eigen::Matrix2d sum = input.mode_cov(0) + output.mode_cov(0);
  const Eigen::Vector2d delta = input.mode_mean(0) - output.mode_mean(0);
  const double det = sum.determinant();
  if (!(det > 0.0)) throw std::invalid_argument("fidelity_pure: output is not a valid state");
  const double quad = delta.dot(sum.inverse() * delta);
  const double f = std::exp(-0.5 * quad) / (2.0 * std::sqrt(det));
  return std::clamp(f, 0.0, 1.0);
}

std::vector<double> wigner(const GaussianState& state, std::size_t mode,
                           std::span<const PhasePoint> grid) {
  const Eigen::Matrix2d sigma = state.mode_cov(mode);
  const Eigen::Vector2d mu = state.mode_mean(mode);
  const double det = sigma.determinant();
  if (!(det > 0.0)) throw InvalidState("wigner: singular reduced covariance");
  const Eigen::Matrix2d inv = sigma.inverse();
  const double norm = 1.0 / (2.0 * std::numbers::pi * std::sqrt(det));
  std::vector<double> values;
  values.reserve(grid.size());
  for (const auto& pt : grid) {
    const Eigen::Vector2d d(pt.x - mu(0), pt.p - mu(1));
    values.push_back(norm * std::exp(-0.5 * d.dot(inv * d)));
  }
  return values;
}

double peak_x(const GaussianState& state, std::size_t mode, Window window, double resolution) {
  if (!(window.hi > window.lo)) throw std::invalid_argument("peak_x: empty window");
  if (!(resolution > 0.0) || !std::isfinite(resolution)) {
    throw std::invalid_argument("peak_x: resolution must be positive");
  }
  const double mu = state.mode_mean(mode)(0);
  const double var = state.mode_cov(mode)(0, 0);
  const auto steps = static_cast<std::size_t>(std::floor((window.hi - window.lo) / resolution + 1e-9));
  if (steps < 2) throw std::invalid_argument("peak_x: window narrower than two resolution steps");

  // Log-density so that narrow marginals do not underflow to a flat zero scan.
  std::size_t best = 0;
  double best_log = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i <= steps; ++i) {
    const double x = window.lo + static_cast<double>(i) * resolution;
    const double d = x - mu;
    const double log_w = -0.5 * d * d / var - 0.5 * std::log(2.0 * std::numbers::pi * var);
    if (log_w > best_log) {
      best_log = log_w;
      best = i;
    }
  }
  const double x_best = window.lo + static_cast<double>(best) * resolution;
  if (best == 0 || best == steps) {
    std::ostringstream os;
    os << "peak_x: Wigner marginal peaks at window edge x = " << x_best << " (window ["
       << window.lo << ", " << window.hi << "])";
    throw OutOfWindow(os.str(), x_best);
  }
  return x_best;
}

}  // namespace cvpctc
