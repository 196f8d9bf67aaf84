#include "lagom/dyadic.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <limits>

#include "lagom/error.hpp"

namespace lagom {

namespace {

using i128 = __int128;

constexpr std::int64_t kMax = std::numeric_limits<std::int64_t>::max();

std::int64_t narrow(i128 v) {
  if (v > kMax || v < -kMax) throw Error(ErrorKind::Overflow, "mantissa exceeds 63 bits");
  return static_cast<std::int64_t>(v);
}

int bit_length(std::uint64_t v) { return 64 - std::countl_zero(v); }

std::uint64_t magnitude(std::int64_t m) {
  return m < 0 ? std::uint64_t(0) - std::uint64_t(m) : std::uint64_t(m);
}

}  // namespace

Dyadic::Dyadic(std::int64_t mantissa, int exponent) : m_(mantissa), e_(exponent) {
  if (m_ == 0) {
    e_ = 0;
    return;
  }
  const int tz = std::countr_zero(magnitude(m_));
  m_ >>= tz;  // arithmetic shift keeps the sign
  e_ += tz;
}

int Dyadic::ilog2() const noexcept { return bit_length(magnitude(m_)) - 1 + e_; }

double Dyadic::to_double() const noexcept { return std::ldexp(static_cast<double>(m_), e_); }

std::int64_t Dyadic::to_integer() const {
  if (!is_integer()) throw Error(ErrorKind::InvalidArgument, "not an integer: " + to_string());
  if (m_ != 0 && ilog2() >= 62) throw Error(ErrorKind::Overflow, "integer too large");
  return m_ * (std::int64_t(1) << e_);
}

std::string Dyadic::to_string() const {
  return std::to_string(m_) + "*2^" + std::to_string(e_);
}

Dyadic Dyadic::parse(std::string_view text) {
  const auto star = text.find("*2^");
  std::int64_t m = 0;
  int e = 0;
  const auto mpart = text.substr(0, star);
  auto [p, ec] = std::from_chars(mpart.data(), mpart.data() + mpart.size(), m);
  if (ec != std::errc() || p != mpart.data() + mpart.size())
    throw Error(ErrorKind::Parse, "bad dyadic mantissa '" + std::string(text) + "'");
  if (star != std::string_view::npos) {
    const auto epart = text.substr(star + 3);
    auto [q, ec2] = std::from_chars(epart.data(), epart.data() + epart.size(), e);
    if (ec2 != std::errc() || q != epart.data() + epart.size())
      throw Error(ErrorKind::Parse, "bad dyadic exponent '" + std::string(text) + "'");
  }
  return Dyadic(m, e);
}

Dyadic Dyadic::operator-() const {
  Dyadic r;
  r.m_ = -m_;
  r.e_ = e_;
  return r;
}

Dyadic operator+(const Dyadic& a, const Dyadic& b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  const Dyadic& hi = a.e_ >= b.e_ ? a : b;
  const Dyadic& lo = a.e_ >= b.e_ ? b : a;
  const int shift = hi.e_ - lo.e_;
  if (shift + bit_length(magnitude(hi.m_)) > 125)
    throw Error(ErrorKind::Overflow, "exponent gap too wide for exact addition");
  const i128 sum = (i128(hi.m_) << shift) + i128(lo.m_);
  if (sum == 0) return Dyadic();
  // canonicalise inside 128 bits before narrowing so cancellation is handled
  i128 s = sum;
  int e = lo.e_;
  while ((s & 1) == 0) {
    s >>= 1;
    ++e;
  }
  return Dyadic(narrow(s), e);
}

Dyadic operator*(const Dyadic& a, const Dyadic& b) {
  if (a.is_zero() || b.is_zero()) return Dyadic();
  return Dyadic(narrow(i128(a.m_) * i128(b.m_)), a.e_ + b.e_);
}

std::strong_ordering operator<=>(const Dyadic& a, const Dyadic& b) {
  if (a.sign() != b.sign()) return a.sign() <=> b.sign();
  if (a.is_zero()) return std::strong_ordering::equal;
  const int la = a.ilog2();
  const int lb = b.ilog2();
  if (la != lb) return a.sign() > 0 ? la <=> lb : lb <=> la;
  // same magnitude class: the exponent gap is below 64
  const int e = a.e_ < b.e_ ? a.e_ : b.e_;
  const i128 x = i128(a.m_) << (a.e_ - e);
  const i128 y = i128(b.m_) << (b.e_ - e);
  return x <=> y;
}

Dyadic abs(const Dyadic& x) { return x.sign() < 0 ? -x : x; }

Dyadic floor(const Dyadic& x) {
  if (x.is_integer()) return x;
  const int s = -x.exponent();
  if (s >= 63) return x.sign() < 0 ? Dyadic(-1) : Dyadic(0);
  // arithmetic right shift rounds toward -inf
  return Dyadic(x.mantissa() >> s);
}

Dyadic ceil(const Dyadic& x) { return -floor(-x); }

Dyadic pow(const Dyadic& x, int n) {
  if (n < 0) throw Error(ErrorKind::InvalidArgument, "negative power");
  Dyadic r(1);
  for (int i = 0; i < n; ++i) r *= x;
  return r;
}

std::string DyadicRatio::to_string() const { return num.to_string() + "/" + den.to_string(); }

std::strong_ordering operator<=>(const DyadicRatio& a, const DyadicRatio& b) {
  return a.num * b.den <=> b.num * a.den;
}

}  // namespace lagom
