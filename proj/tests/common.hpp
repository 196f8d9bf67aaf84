#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <optional>
#include <random>
#include <vector>

#include "lagom/error.hpp"
#include "lagom/geometry.hpp"
#include "lagom/grid.hpp"

namespace testing {

using Rational = boost::multiprecision::cpp_rational;

inline Rational to_rational(const lagom::Dyadic& x) {
  Rational r = x.mantissa();
  const int e = x.exponent();
  const Rational p = Rational(boost::multiprecision::cpp_int(1) << std::abs(e));
  if (e >= 0) return Rational(r * p);
  return Rational(r / p);
}

inline Rational to_rational(const lagom::DyadicRatio& x) { return to_rational(x.num) / to_rational(x.den); }

/// Rational-arithmetic model of a cube, independent of the library geometry.
struct RCube {
  int d = 1;
  std::vector<Rational> lo;
  Rational side;

  static RCube from(const lagom::Cube& c) {
    RCube r;
    r.d = c.d;
    r.side = to_rational(c.side);
    for (int a = 0; a < c.d; ++a) r.lo.push_back(to_rational(c.center[a]) - r.side / 2);
    return r;
  }
  Rational hi(int a) const { return lo[static_cast<std::size_t>(a)] + side; }
  Rational volume() const {
    Rational v = 1;
    for (int a = 0; a < d; ++a) v *= side;
    return v;
  }
};

struct RPair {
  Rational diam, rdist, ecc;
  std::vector<Rational> corner;
};

inline RPair pair_oracle(const RCube& a, const RCube& b) {
  RPair p;
  std::vector<Rational> hi;
  for (int i = 0; i < a.d; ++i) {
    const Rational l = std::min(a.lo[i], b.lo[i]);
    const Rational h = std::max(a.hi(i), b.hi(i));
    hi.push_back(h);
    if (h - l > p.diam) p.diam = h - l;
  }
  for (int i = 0; i < a.d; ++i) p.corner.push_back(hi[i] - p.diam);
  p.rdist = p.diam / std::max(a.side, b.side);
  p.ecc = std::min(a.volume(), b.volume()) / std::max(a.volume(), b.volume());
  return p;
}

/// Uniform [0, 1) from the top 53 bits, as in the library.
inline double unit(std::mt19937_64& gen) { return static_cast<double>(gen() >> 11) * 0x1p-53; }

inline lagom::GridFunction random_function(const lagom::GridSpec& spec, std::mt19937_64& gen, bool complex_values = true) {
  lagom::GridFunction f(spec);
  for (std::size_t i = 0; i < f.size(); ++i)
    f[i] = lagom::complex(2 * unit(gen) - 1, complex_values ? 2 * unit(gen) - 1 : 0.0);
  return f;
}

inline double max_abs_diff(const lagom::GridFunction& f, const lagom::GridFunction& g) {
  double m = 0;
  for (std::size_t i = 0; i < f.size(); ++i) m = std::max(m, std::abs(f[i] - g[i]));
  return m;
}

/// Kind of the lagom::Error thrown by f, if any.
template <typename F>
std::optional<lagom::ErrorKind> thrown_kind(F&& f) {
  try {
    f();
  } catch (const lagom::Error& e) {
    return e.kind();
  }
  return std::nullopt;
}

}  // namespace testing
