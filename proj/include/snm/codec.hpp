#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace snm {

/// Number of bits kept above (U) and below (P) the binary point.
struct Precision {
  int U = 0;
  int P = 0;

  int bits() const { return U + P + 2; }
  friend bool operator==(const Precision&, const Precision&) = default;
};

/// Sign-plus-magnitude truncated binary representation of a real number.
///
/// Holds a sign bit (1 for x >= 0) and the magnitude bits b_{-P}..b_U of
/// |x|. Bits above position U are not representable and are dropped by
/// trunc(); the caller picks U large enough.
class BitString {
 public:
  /// `magnitude` is ordered b_{-P}, ..., b_U and must have U + P + 1 entries
  /// in {0, 1}.
  BitString(bool sign_bit, std::vector<std::uint8_t> magnitude, Precision prec);

  bool sign_bit() const { return sign_; }
  Precision precision() const { return prec_; }
  /// Bit b_j for -P <= j <= U.
  int bit(int j) const;
  /// Total encoded length, U + P + 2.
  std::int64_t size() const { return prec_.bits(); }

  /// Canonical packing: sign bit first, then b_U down to b_{-P}, MSB-first
  /// within each byte, zero padded at the tail.
  std::vector<std::uint8_t> to_bytes() const;
  static BitString from_bytes(std::span<const std::uint8_t> bytes, Precision prec);

  BitString negated() const;

  friend bool operator==(const BitString&, const BitString&) = default;

 private:
  bool sign_ = true;
  std::vector<std::uint8_t> magnitude_;
  Precision prec_;
};

BitString trunc(double x, Precision prec);
inline BitString trunc(double x, int U, int P) { return trunc(x, Precision{U, P}); }

/// Decodes (2 sign - 1) * sum_j b_j 2^j. Throws if `prec` does not match
/// the string's own layout.
double approx(const BitString& s, Precision prec);
inline double approx(const BitString& s, int U, int P) {
  return approx(s, Precision{U, P});
}

/// ceil(log2 d): cost of one index in [0, d).
int index_bits(std::int64_t d);

}  // namespace snm
