#include "cvpctc/encode.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

#include "cvpctc/errors.hpp"
#include "cvpctc/rng.hpp"

namespace cvpctc {

IntervalScheme::IntervalScheme(double x0, double L, std::size_t n) : x0_(x0), end_(L), n_(n) {
  if (!std::isfinite(x0) || !std::isfinite(L)) {
    throw std::invalid_argument("IntervalScheme: x0 and L must be finite");
  }
  if (!(L > x0)) throw std::invalid_argument("IntervalScheme: L must be greater than x0");
  if (n == 0) throw std::invalid_argument("IntervalScheme: interval count must be at least 1");
  alpha_ = (L - x0) / static_cast<double>(n);
  if (!(alpha_ > 0.0)) throw std::invalid_argument("IntervalScheme: interval width underflows");
}

double IntervalScheme::midpoint(std::size_t k) const { return x0_ + encode(*this, k); }

InputWord InputWord::bits(std::string_view text) {
  if (text.empty()) throw std::invalid_argument("InputWord: empty bit string");
  std::vector<bool> out;
  out.reserve(text.size());
  for (char c : text) {
    if (c != '0' && c != '1') {
      throw std::invalid_argument("InputWord: bit strings may only contain '0' and '1'");
    }
    out.push_back(c == '1');
  }
  const std::size_t width = out.size();
  return InputWord(std::move(out), 0, width);
}

InputWord InputWord::matrix(const std::vector<std::string>& rows) {
  if (rows.empty()) throw std::invalid_argument("InputWord: matrix has no rows");
  const std::size_t width = rows.front().size();
  std::vector<bool> out;
  for (const auto& row : rows) {
    if (row.empty()) throw std::invalid_argument("InputWord: empty matrix row");
    if (row.size() != width) throw std::invalid_argument("InputWord: matrix rows differ in width");
    const auto parsed = bits(row).flat_bits();
    out.insert(out.end(), parsed.begin(), parsed.end());
  }
  return InputWord(std::move(out), rows.size(), width);
}

InputWord InputWord::parse(std::string_view text) {
  if (text.find(';') == std::string_view::npos) return bits(text);
  std::vector<std::string> rows;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(';', start);
    rows.emplace_back(text.substr(start, pos == std::string_view::npos ? text.npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return matrix(rows);
}

std::string InputWord::to_string() const {
  std::string out;
  for (std::size_t i = 0; i < bits_.size(); ++i) {
    if (is_matrix() && i > 0 && i % width_ == 0) out.push_back(';');
    out.push_back(bits_[i] ? '1' : '0');
  }
  return out;
}

std::uint64_t index_of(const InputWord& word) {
  const auto& bits = word.flat_bits();
  if (bits.empty()) throw std::invalid_argument("index_of: empty word");
  std::uint64_t value = 0;
  for (bool b : bits) {
    if (value > (std::numeric_limits<std::uint64_t>::max() >> 1)) {
      throw std::invalid_argument("index_of: word does not fit in 64 bits");
    }
    value = (value << 1) | (b ? 1u : 0u);
  }
  return value;
}

double encode(const IntervalScheme& scheme, std::size_t k) {
  if (k >= scheme.n()) {
    std::ostringstream os;
    os << "encode: interval " << k << " outside 0.." << scheme.n() - 1;
    throw std::out_of_range(os.str());
  }
  return (static_cast<double>(k) + 0.5) * scheme.alpha();
}

DecodeVerdict decode(const IntervalScheme& scheme, double x_measured) {
  if (!(x_measured >= scheme.x0() && x_measured < scheme.end())) {
    std::ostringstream os;
    os << "decode: position " << x_measured << " outside segment [" << scheme.x0() << ", "
       << scheme.end() << ")";
    throw OutOfSegment(os.str(), x_measured);
  }
  const double t = (x_measured - scheme.x0()) / scheme.alpha();
  auto index = static_cast<std::size_t>(std::floor(t));
  // Rounding can push points just below L onto index n.
  if (index >= scheme.n()) index = scheme.n() - 1;

  DecodeVerdict v;
  v.index = index;
  v.distance_to_midpoint = x_measured - scheme.midpoint(index);
  v.within_tolerance = std::abs(v.distance_to_midpoint) <= 0.5 * scheme.alpha() * (1.0 + 1e-12);
  return v;
}

GaussianState encode_index_onto(const GaussianState& state, std::size_t mode,
                                const IntervalScheme& scheme, std::size_t k) {
  const double target = scheme.midpoint(k);
  return displace_x(state, mode, target - state.mode_mean(mode)(0));
}

GaussianState encode_onto(const GaussianState& state, std::size_t mode, const IntervalScheme& scheme,
                          const InputWord& word, const std::optional<PChannel>& p_channel) {
  const auto k = index_of(word);
  if (k >= scheme.n()) {
    throw std::out_of_range("encode_onto: word index " + std::to_string(k) + " exceeds interval count");
  }
  GaussianState out = encode_index_onto(state, mode, scheme, static_cast<std::size_t>(k));
  if (p_channel) {
    const auto kp = index_of(p_channel->word);
    if (kp >= p_channel->scheme.n()) {
      throw std::out_of_range("encode_onto: p-channel word index exceeds interval count");
    }
    const double target = p_channel->scheme.midpoint(static_cast<std::size_t>(kp));
    out = displace_p(out, mode, target - out.mode_mean(mode)(1));
  }
  return out;
}

double decode_error_rate(const IntervalScheme& scheme, std::size_t k, double noise_sigma,
                         std::size_t shots, std::uint64_t seed) {
  if (shots == 0) throw std::invalid_argument("decode_error_rate: shots must be at least 1");
  if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) {
    throw std::invalid_argument("decode_error_rate: noise sigma must be finite and >= 0");
  }
  const double mid = scheme.midpoint(k);
  Rng rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::size_t errors = 0;
  for (std::size_t i = 0; i < shots; ++i) {
    const double x = mid + noise_sigma * gauss(rng);
    try {
      if (decode(scheme, x).index != k) ++errors;
    } catch (const OutOfSegment&) {
      ++errors;
    }
  }
  return static_cast<double>(errors) / static_cast<double>(shots);
}

}  // namespace cvpctc
