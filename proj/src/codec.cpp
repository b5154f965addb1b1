#include "snm/codec.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

namespace snm {
namespace {

constexpr int kMaxPrecision = 960;

void check_precision(Precision prec) {
  if (prec.U < 0 || prec.P < 0) {
    throw std::invalid_argument("codec: U and P must be nonnegative");
  }
  if (prec.U > kMaxPrecision || prec.P > kMaxPrecision) {
    throw std::invalid_argument("codec: U or P out of supported range");
  }
}

}  // namespace

BitString::BitString(bool sign_bit, std::vector<std::uint8_t> magnitude,
                     Precision prec)
    : sign_(sign_bit), magnitude_(std::move(magnitude)), prec_(prec) {
  check_precision(prec);
  if (static_cast<int>(magnitude_.size()) != prec.U + prec.P + 1) {
    throw std::invalid_argument("BitString: magnitude length must be U + P + 1");
  }
  for (auto b : magnitude_) {
    if (b > 1) throw std::invalid_argument("BitString: bits must be 0 or 1");
  }
}

int BitString::bit(int j) const {
  if (j < -prec_.P || j > prec_.U) throw std::out_of_range("BitString::bit");
  return magnitude_[static_cast<std::size_t>(j + prec_.P)];
}

std::vector<std::uint8_t> BitString::to_bytes() const {
  const auto total = static_cast<std::size_t>(size());
  std::vector<std::uint8_t> out((total + 7) / 8, 0);
  auto put = [&](std::size_t pos, int b) {
    if (b) out[pos / 8] |= static_cast<std::uint8_t>(0x80u >> (pos % 8));
  };
  put(0, sign_ ? 1 : 0);
  std::size_t pos = 1;
  for (int j = prec_.U; j >= -prec_.P; --j) put(pos++, bit(j));
  return out;
}

BitString BitString::from_bytes(std::span<const std::uint8_t> bytes,
                                Precision prec) {
  check_precision(prec);
  const auto total = static_cast<std::size_t>(prec.bits());
  if (bytes.size() != (total + 7) / 8) {
    throw std::invalid_argument("BitString::from_bytes: length mismatch");
  }
  auto get = [&](std::size_t pos) {
    return (bytes[pos / 8] >> (7 - pos % 8)) & 1u;
  };
  for (std::size_t pos = total; pos < bytes.size() * 8; ++pos) {
    if (get(pos)) throw std::invalid_argument("BitString::from_bytes: nonzero padding");
  }
  std::vector<std::uint8_t> magnitude(static_cast<std::size_t>(prec.U + prec.P + 1));
  std::size_t pos = 1;
  for (int j = prec.U; j >= -prec.P; --j) {
    magnitude[static_cast<std::size_t>(j + prec.P)] = static_cast<std::uint8_t>(get(pos++));
  }
  return BitString(get(0) != 0, std::move(magnitude), prec);
}

BitString BitString::negated() const {
  return BitString(!sign_, magnitude_, prec_);
}

BitString trunc(double x, Precision prec) {
  check_precision(prec);
  if (!std::isfinite(x)) throw std::invalid_argument("trunc: x must be finite");
  // |x| * 2^P is exact; its floor is an integer whose bit k is b_{k-P}.
  // Every step below (ldexp, floor, fmod by 2) is exact in binary floating
  // point, so the extracted bits are those of the true expansion.
  const double scaled = std::floor(std::ldexp(std::fabs(x), prec.P));
  std::vector<std::uint8_t> magnitude(static_cast<std::size_t>(prec.U + prec.P + 1));
  for (int k = 0; k <= prec.U + prec.P; ++k) {
    const double shifted = std::floor(std::ldexp(scaled, -k));
    magnitude[static_cast<std::size_t>(k)] = std::fmod(shifted, 2.0) != 0.0 ? 1 : 0;
  }
  // signbit rather than x >= 0: approx() of a negative value that truncates
  // to zero is -0.0, and re-truncating it must give back the same string.
  return BitString(!std::signbit(x), std::move(magnitude), prec);
}

double approx(const BitString& s, Precision prec) {
  if (!(s.precision() == prec)) {
    throw std::invalid_argument("approx: precision does not match bit string");
  }
  double magnitude = 0.0;
  for (int j = -prec.P; j <= prec.U; ++j) {
    if (s.bit(j)) magnitude += std::ldexp(1.0, j);
  }
  return s.sign_bit() ? magnitude : -magnitude;
}

int index_bits(std::int64_t d) {
  if (d < 2) throw std::invalid_argument("index_bits: requires d >= 2");
  return static_cast<int>(std::bit_width(static_cast<std::uint64_t>(d - 1)));
}

}  // namespace snm
