#pragma once

// Interval encoding of classical inputs into a qumode position.
//
// The segment [x0, L] is cut into n intervals of width alpha = (L - x0)/n.
// Input k is loaded by placing the qumode at the midpoint x0 + (k + 1/2) alpha,
// which leaves a symmetric tolerance of +-alpha/2 for the readout.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cvpctc/gaussian.hpp"

namespace cvpctc {

class IntervalScheme {
 public:
  // Throws std::invalid_argument unless L > x0, n >= 1 and all values finite.
  IntervalScheme(double x0, double L, std::size_t n);

  double x0() const noexcept { return x0_; }
  double end() const noexcept { return end_; }
  std::size_t n() const noexcept { return n_; }
  double alpha() const noexcept { return alpha_; }

  // Absolute position x0 + (k + 1/2) alpha. Throws std::out_of_range for k >= n.
  double midpoint(std::size_t k) const;

 private:
  double x0_;
  double end_;
  std::size_t n_;
  double alpha_;
};

// A classical input: a bit string, or an m x w binary matrix of memory cells.
class InputWord {
 public:
  static InputWord bits(std::string_view bits);
  static InputWord matrix(const std::vector<std::string>& rows);
  // "1100" -> bit string; "100;001;000" -> matrix with rows separated by ';'.
  static InputWord parse(std::string_view text);

  bool is_matrix() const noexcept { return rows_ > 0; }
  std::size_t rows() const noexcept { return rows_; }
  std::size_t width() const noexcept { return width_; }
  // Row-major flattened bits, most significant first.
  const std::vector<bool>& flat_bits() const noexcept { return bits_; }
  std::string to_string() const;

 private:
  InputWord(std::vector<bool> bits, std::size_t rows, std::size_t width)
      : bits_(std::move(bits)), rows_(rows), width_(width) {}

  std::vector<bool> bits_;
  std::size_t rows_;  // 0 for plain bit strings
  std::size_t width_;
};

// Binary value of the (flattened) word, most significant bit first.
std::uint64_t index_of(const InputWord& word);

// Offset s from x0 realizing interval k: s = (k + 1/2) alpha, so k alpha < s < (k+1) alpha.
double encode(const IntervalScheme& scheme, std::size_t k);

struct DecodeVerdict {
  std::size_t index = 0;
  double distance_to_midpoint = 0.0;
  bool within_tolerance = true;
};

// floor((x - x0)/alpha); a point on an interior boundary belongs to the
// upper interval. Throws OutOfSegment outside [x0, L).
DecodeVerdict decode(const IntervalScheme& scheme, double x_measured);

// Optional momentum channel, independent of the position channel.
struct PChannel {
  IntervalScheme scheme;
  InputWord word;
};

// Places the x-mean of `mode` on the midpoint of interval index_of(word).
// For a mode prepared at x0 this is exactly the displacement X(encode(k)).
GaussianState encode_onto(const GaussianState& state, std::size_t mode, const IntervalScheme& scheme,
                          const InputWord& word, const std::optional<PChannel>& p_channel = std::nullopt);

GaussianState encode_index_onto(const GaussianState& state, std::size_t mode,
                                const IntervalScheme& scheme, std::size_t k);

// Monte Carlo estimate of P(decode(midpoint_k + N(0, sigma^2)) != k); points
// outside the segment count as errors.
double decode_error_rate(const IntervalScheme& scheme, std::size_t k, double noise_sigma,
                         std::size_t shots, std::uint64_t seed);

}  // namespace cvpctc
