#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <boost/multiprecision/cpp_int.hpp>

#include "snm/codec.hpp"
#include "snm/rng.hpp"

using namespace snm;
using boost::multiprecision::cpp_int;

namespace {

std::vector<int> bits_of(const BitString& s) {
  std::vector<int> out;
  const auto prec = s.precision();
  for (int j = -prec.P; j <= prec.U; ++j) out.push_back(s.bit(j));
  return out;
}

// Reference expansion: |x| = m 2^e exactly with integer m, so
// floor(|x| 2^P) is an integer shift of m.
int reference_bit(double x, int j, int P) {
  int e = 0;
  const double frac = std::frexp(std::fabs(x), &e);
  cpp_int m = static_cast<long long>(std::ldexp(frac, 53));
  const int shift = e - 53 + P;
  cpp_int scaled = shift >= 0 ? cpp_int(m << shift) : cpp_int(m >> -shift);
  return static_cast<int>((scaled >> (j + P)) & 1);
}

}  // namespace

TEST_CASE("trunc examples") {
  const auto a = trunc(0.75, 1, 2);
  CHECK(a.sign_bit());
  CHECK(bits_of(a) == std::vector<int>{1, 1, 0, 0});
  CHECK(approx(a, 1, 2) == 0.75);

  const auto b = trunc(-0.3, 1, 2);
  CHECK_FALSE(b.sign_bit());
  CHECK(bits_of(b) == std::vector<int>{1, 0, 0, 0});
  CHECK(approx(b, 1, 2) == -0.25);

  const auto c = trunc(5.5, 2, 1);
  CHECK(bits_of(c) == std::vector<int>{1, 1, 0, 1});
  CHECK(approx(c, 2, 1) == 5.5);

  const auto zero = trunc(0.0, 3, 3);
  CHECK(zero.sign_bit());
  CHECK(approx(zero, 3, 3) == 0.0);

  const double pi_hat = approx(trunc(std::numbers::pi, 2, 10), 2, 10);
  CHECK(pi_hat <= std::numbers::pi);
  CHECK(std::numbers::pi - pi_hat < std::ldexp(1.0, -10));
}

TEST_CASE("sizes and layout") {
  CHECK(trunc(1.0, 4, 7).size() == 13);
  CHECK(Precision{2, 3}.bits() == 7);
  CHECK_THROWS_AS(trunc(1.0, -1, 2), std::invalid_argument);
  CHECK_THROWS_AS(trunc(INFINITY, 1, 2), std::invalid_argument);
  CHECK_THROWS_AS(approx(trunc(1.0, 2, 2), 2, 3), std::invalid_argument);
  CHECK_THROWS_AS(BitString(true, {1, 0}, Precision{1, 1}), std::invalid_argument);
  CHECK_THROWS_AS(trunc(1.0, 1, 1).bit(2), std::out_of_range);
}

TEST_CASE("overflow drops high bits") {
  // 9 = 1001b; with U=2 the 2^3 bit is lost.
  CHECK(approx(trunc(9.0, 2, 0), 2, 0) == 1.0);
}

TEST_CASE("sign symmetry") {
  const auto s = trunc(2.625, 2, 3);
  CHECK(approx(s.negated(), 2, 3) == -2.625);
  CHECK(trunc(-2.625, 2, 3) == s.negated());
}

TEST_CASE("byte packing") {
  // sign, b1, b0, b-1, b-2 = 1,1,1,0,1 then zero padding
  const auto s = trunc(3.25, 1, 2);
  const auto bytes = s.to_bytes();
  REQUIRE(bytes.size() == 1);
  CHECK(bytes[0] == 0b11101000);
  CHECK(BitString::from_bytes(bytes, Precision{1, 2}) == s);
  const std::vector<std::uint8_t> padded{0b11101001};
  CHECK_THROWS_AS(BitString::from_bytes(padded, Precision{1, 2}), std::invalid_argument);
  const std::vector<std::uint8_t> short_input{};
  CHECK_THROWS_AS(BitString::from_bytes(short_input, Precision{1, 2}), std::invalid_argument);

  const auto wide = trunc(-1234.5678, 12, 15);
  CHECK(wide.to_bytes().size() == 4);
  CHECK(BitString::from_bytes(wide.to_bytes(), Precision{12, 15}) == wide);
}

TEST_CASE("bits match a reference expansion") {
  PhiloxEngine rng(SeedSpec{77, 0, 1});
  for (int n = 0; n < 2000; ++n) {
    const int U = static_cast<int>(rng() % 12);
    const int P = static_cast<int>(rng() % 40);
    const double u = static_cast<double>(rng() >> 11) * 0x1p-53;
    const double x = (2.0 * u - 1.0) * std::ldexp(1.0, U + 1);
    const auto s = trunc(x, U, P);
    for (int j = -P; j <= U; ++j) REQUIRE(s.bit(j) == reference_bit(x, j, P));
  }
}

TEST_CASE("index_bits") {
  CHECK(index_bits(2) == 1);
  CHECK(index_bits(3) == 2);
  CHECK(index_bits(1000) == 10);
  CHECK(index_bits(1024) == 10);
  CHECK(index_bits(1025) == 11);
  CHECK(index_bits(1 << 15) == 15);
  CHECK_THROWS_AS(index_bits(1), std::invalid_argument);
}

TEST_CASE("negative value below resolution") {
  const auto s = trunc(-0.1, 1, 2);
  CHECK_FALSE(s.sign_bit());
  const double back = approx(s, 1, 2);
  CHECK(back == 0.0);
  CHECK(trunc(back, 1, 2) == s);
  CHECK(trunc(0.0, 1, 2).sign_bit());
}
