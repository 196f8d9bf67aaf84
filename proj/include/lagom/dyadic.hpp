#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace lagom {

/// Exact dyadic rational m * 2^e with 64-bit mantissa.
///
/// Kept in canonical form: the mantissa is odd, or the value is zero with
/// exponent 0. Every operation is exact; results that do not fit the
/// mantissa throw Error(Overflow) instead of rounding.
class Dyadic {
 public:
  constexpr Dyadic() = default;
  Dyadic(std::int64_t mantissa, int exponent = 0);  // NOLINT(google-explicit-constructor)

  static Dyadic pow2(int exponent) { return Dyadic(1, exponent); }

  std::int64_t mantissa() const noexcept { return m_; }
  int exponent() const noexcept { return e_; }

  bool is_zero() const noexcept { return m_ == 0; }
  int sign() const noexcept { return (m_ > 0) - (m_ < 0); }
  bool is_integer() const noexcept { return m_ == 0 || e_ >= 0; }

  /// floor(log2 |x|); undefined for zero.
  int ilog2() const noexcept;

  double to_double() const noexcept;
  /// Exact integer value; throws unless is_integer() and it fits.
  std::int64_t to_integer() const;

  /// "m*2^e" form used in CSV output.
  std::string to_string() const;
  static Dyadic parse(std::string_view text);

  /// Multiplies by 2^k exactly.
  Dyadic scaled(int k) const { return is_zero() ? Dyadic() : Dyadic(m_, e_ + k); }
  Dyadic half() const { return scaled(-1); }

  Dyadic operator-() const;
  friend Dyadic operator+(const Dyadic& a, const Dyadic& b);
  friend Dyadic operator-(const Dyadic& a, const Dyadic& b) { return a + (-b); }
  friend Dyadic operator*(const Dyadic& a, const Dyadic& b);
  Dyadic& operator+=(const Dyadic& o) { return *this = *this + o; }
  Dyadic& operator-=(const Dyadic& o) { return *this = *this - o; }
  Dyadic& operator*=(const Dyadic& o) { return *this = *this * o; }

  friend std::strong_ordering operator<=>(const Dyadic& a, const Dyadic& b);
  friend bool operator==(const Dyadic& a, const Dyadic& b) = default;

 private:
  std::int64_t m_ = 0;
  int e_ = 0;
};

Dyadic abs(const Dyadic& x);
Dyadic floor(const Dyadic& x);
Dyadic ceil(const Dyadic& x);
/// x^n for n >= 0.
Dyadic pow(const Dyadic& x, int n);

/// Exact positive-denominator ratio of two dyadics; rdist and ecc live here.
struct DyadicRatio {
  Dyadic num;
  Dyadic den{1};

  double to_double() const noexcept { return num.to_double() / den.to_double(); }
  std::string to_string() const;

  friend std::strong_ordering operator<=>(const DyadicRatio& a, const DyadicRatio& b);
  friend bool operator==(const DyadicRatio& a, const DyadicRatio& b) {
    return (a <=> b) == std::strong_ordering::equal;
  }
};

}  // namespace lagom
