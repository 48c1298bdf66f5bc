#pragma once

// Independent reference computations used to freeze expected values in tests.
// Nothing here calls into the library's gate, homodyne, fidelity or Wigner
// code paths; states are described by raw means and covariances.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Upper Gaussian tail Q(z) = P(N(0,1) > z).
inline double gaussian_tail(double z) { return 0.5 * std::erfc(z / std::numbers::sqrt2); }

// Single-mode Wigner function written out by hand from a 2x2 covariance.
inline double wigner_point(const Eigen::Vector2d& mu, const Eigen::Matrix2d& s, double x, double p) {
  const double det = s(0, 0) * s(1, 1) - s(0, 1) * s(1, 0);
  const double dx = x - mu(0);
  const double dp = p - mu(1);
  const double q = (s(1, 1) * dx * dx - 2.0 * s(0, 1) * dx * dp + s(0, 0) * dp * dp) / det;
  return std::exp(-0.5 * q) / (2.0 * std::numbers::pi * std::sqrt(det));
}

// Trapezoid quadrature of f over [x_lo, x_hi] x [p_lo, p_hi] with n points per axis.
template <typename F>
double integrate_2d(F&& f, double x_lo, double x_hi, double p_lo, double p_hi, std::size_t n) {
  const double hx = (x_hi - x_lo) / static_cast<double>(n - 1);
  const double hp = (p_hi - p_lo) / static_cast<double>(n - 1);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double wx = (i == 0 || i == n - 1) ? 0.5 : 1.0;
    const double x = x_lo + hx * static_cast<double>(i);
    for (std::size_t j = 0; j < n; ++j) {
      const double wp = (j == 0 || j == n - 1) ? 0.5 : 1.0;
      total += wx * wp * f(x, p_lo + hp * static_cast<double>(j));
    }
  }
  return total * hx * hp;
}

// Tr(rho_1 rho_2) = 2 pi hbar * integral W_1 W_2 with hbar = 1/2.
inline double wigner_overlap(const Eigen::Vector2d& mu1, const Eigen::Matrix2d& s1,
                             const Eigen::Vector2d& mu2, const Eigen::Matrix2d& s2,
                             std::size_t n = 601) {
  const double sx = std::sqrt(std::max(s1(0, 0), s2(0, 0)));
  const double sp = std::sqrt(std::max(s1(1, 1), s2(1, 1)));
  const double cx = 0.5 * (mu1(0) + mu2(0));
  const double cp = 0.5 * (mu1(1) + mu2(1));
  const double half_x = 8.0 * sx + 0.5 * std::abs(mu1(0) - mu2(0));
  const double half_p = 8.0 * sp + 0.5 * std::abs(mu1(1) - mu2(1));
  const double integral = integrate_2d(
      [&](double x, double p) { return wigner_point(mu1, s1, x, p) * wigner_point(mu2, s2, x, p); },
      cx - half_x, cx + half_x, cp - half_p, cp + half_p, n);
  return std::numbers::pi * integral;
}

// Closed-form EPR covariance in (x_A, p_A, x_B, p_B) ordering, vacuum = 1/4.
inline Mat epr_covariance(double r) {
  const double c = std::cosh(2.0 * r) / 4.0;
  const double s = std::sinh(2.0 * r) / 4.0;
  Mat m(4, 4);
  m << c, 0, s, 0,
       0, c, 0, -s,
       s, 0, c, 0,
       0, -s, 0, c;
  return m;
}

// Joint Gaussian conditioning on several linear functionals at once:
// returns mean and covariance of `target` rows given functionals = values.
struct Conditioned {
  Vec mean;
  Mat cov;
};

inline Conditioned condition(const Vec& mean, const Mat& cov, const Mat& target,
                             const Mat& functionals, const Vec& values) {
  const Mat c_tt = target * cov * target.transpose();
  const Mat c_tf = target * cov * functionals.transpose();
  const Mat c_ff = functionals * cov * functionals.transpose();
  const Mat gain = c_tf * c_ff.inverse();
  return {target * mean + gain * (values - functionals * mean), c_tt - gain * c_tf.transpose()};
}

// Brute-force iteration of a successor table until f(k) == k.
inline std::size_t brute_fixed_point(const std::vector<std::size_t>& table, std::size_t start) {
  std::size_t k = start;
  for (std::size_t step = 0; step <= table.size(); ++step) {
    if (table[k] == k) return k;
    k = table[k];
  }
  return table.size();  // sentinel: no fixed point
}

// Sample mean / variance helpers.
struct Moments {
  double mean = 0.0;
  double variance = 0.0;
  std::size_t n = 0;
  double stderr_mean() const { return std::sqrt(variance / static_cast<double>(n)); }
  // Standard error of the sample variance for (near-)normal data.
  double stderr_variance() const { return variance * std::sqrt(2.0 / static_cast<double>(n - 1)); }
};

inline Moments moments(const std::vector<double>& xs) {
  Moments m;
  m.n = xs.size();
  for (double x : xs) m.mean += x;
  m.mean /= static_cast<double>(m.n);
  for (double x : xs) m.variance += (x - m.mean) * (x - m.mean);
  m.variance /= static_cast<double>(m.n - 1);
  return m;
}

}  // namespace oracle
