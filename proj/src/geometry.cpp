#include "lagom/geometry.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <optional>

#include "lagom/error.hpp"

namespace lagom {

namespace {

void check_dim(int d) {
  if (d < 1 || d > kMaxDim)
    throw Error(ErrorKind::InvalidArgument, "dimension must be in 1.." + std::to_string(kMaxDim));
}

void check_same_dim(const Cube& a, const Cube& b) {
  if (a.d != b.d) throw Error(ErrorKind::DimensionMismatch, "cubes of different dimension");
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

template <typename T>
T parse_int(std::string_view s) {
  T v{};
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    throw Error(ErrorKind::Parse, "bad integer '" + std::string(s) + "'");
  return v;
}

Dyadic max_side(const Cube& a, const Cube& b) { return std::max(a.side, b.side); }

Dyadic center_distance(const Cube& a, const Cube& b) {
  Dyadic best;
  for (int i = 0; i < a.d; ++i) best = std::max(best, abs(a.center[i] - b.center[i]));
  return best;
}

// Odometer over a box of integer ranges.
template <typename F>
void for_each_corner(int d, const std::array<std::int64_t, kMaxDim>& lo,
                     const std::array<std::int64_t, kMaxDim>& hi, F&& f) {
  std::array<std::int64_t, kMaxDim> k{};
  for (int i = 0; i < d; ++i) {
    if (hi[i] < lo[i]) return;
    k[i] = lo[i];
  }
  while (true) {
    f(k);
    int i = d - 1;
    while (i >= 0) {
      if (++k[i] <= hi[i]) break;
      k[i] = lo[i];
      --i;
    }
    if (i < 0) return;
  }
}

}  // namespace

Cube Cube::dilated(const Dyadic& lambda) const {
  Cube c = *this;
  c.side = side * lambda;
  return c;
}

std::string Cube::to_string() const {
  std::string s = std::to_string(d) + ":";
  for (int i = 0; i < d; ++i) {
    if (i) s += ",";
    s += center[i].to_string();
  }
  return s + ":" + side.to_string();
}

Cube Cube::parse(std::string_view text) {
  const auto parts = split(text, ':');
  if (parts.size() != 3) throw Error(ErrorKind::Parse, "cube must be d:cx,...:side");
  Cube c;
  c.d = parse_int<int>(parts[0]);
  check_dim(c.d);
  const auto coords = split(parts[1], ',');
  if (static_cast<int>(coords.size()) != c.d)
    throw Error(ErrorKind::Parse, "cube centre has wrong number of coordinates");
  for (int i = 0; i < c.d; ++i) c.center[i] = Dyadic::parse(coords[i]);
  c.side = Dyadic::parse(parts[2]);
  if (c.side.sign() <= 0) throw Error(ErrorKind::Parse, "cube side must be positive");
  return c;
}

Cube DyadicCube::to_cube() const {
  Cube c;
  c.d = d;
  c.side = side();
  for (int i = 0; i < d; ++i) c.center[i] = center_coord(i);
  return c;
}

DyadicCube DyadicCube::parent() const {
  DyadicCube p = *this;
  p.j = j + 1;
  for (int i = 0; i < d; ++i) p.k[i] = k[i] >> 1;  // floor division
  return p;
}

std::string DyadicCube::to_string() const {
  std::string s = std::to_string(d) + ":" + std::to_string(j) + ":";
  for (int i = 0; i < d; ++i) {
    if (i) s += ",";
    s += std::to_string(k[i]);
  }
  return s;
}

DyadicCube DyadicCube::parse(std::string_view text) {
  const auto parts = split(text, ':');
  if (parts.size() != 3) throw Error(ErrorKind::Parse, "dyadic cube must be d:j:k1,...");
  DyadicCube c;
  c.d = parse_int<int>(parts[0]);
  check_dim(c.d);
  c.j = parse_int<int>(parts[1]);
  const auto ks = split(parts[2], ',');
  if (static_cast<int>(ks.size()) != c.d)
    throw Error(ErrorKind::Parse, "dyadic cube has wrong number of corner indices");
  for (int i = 0; i < c.d; ++i) c.k[i] = parse_int<std::int64_t>(ks[i]);
  return c;
}

RealCube RealCube::from(const Cube& c) {
  RealCube r;
  r.d = c.d;
  r.side = c.side.to_double();
  for (int i = 0; i < c.d; ++i) r.center[i] = c.center[i].to_double();
  return r;
}

Cube centered_ball(int d, const Dyadic& lambda) {
  check_dim(d);
  Cube c;
  c.d = d;
  c.side = lambda;
  return c;
}

CubePairGeometry enclosing_cube(const Cube& a, const Cube& b) {
  check_same_dim(a, b);
  CubePairGeometry g;
  std::array<Dyadic, kMaxDim> hi{};
  for (int i = 0; i < a.d; ++i) {
    const Dyadic lo = std::min(a.lower(i), b.lower(i));
    hi[i] = std::max(a.upper(i), b.upper(i));
    g.diam = std::max(g.diam, hi[i] - lo);
  }
  g.enclosing.d = a.d;
  g.enclosing.side = g.diam;
  for (int i = 0; i < a.d; ++i) g.enclosing.center[i] = hi[i] - g.diam.half();
  g.rdist = DyadicRatio{g.diam, max_side(a, b)};
  const Dyadic va = a.volume();
  const Dyadic vb = b.volume();
  g.ecc = DyadicRatio{std::min(va, vb), std::max(va, vb)};
  return g;
}

DyadicRatio rdist(const Cube& a, const Cube& b) { return enclosing_cube(a, b).rdist; }

DyadicRatio ecc(const Cube& a, const Cube& b) { return enclosing_cube(a, b).ecc; }

std::pair<DyadicRatio, DyadicRatio> rdist_bounds(const Cube& a, const Cube& b) {
  check_same_dim(a, b);
  const Dyadic ml = max_side(a, b);
  const Dyadic num = ml + center_distance(a, b);
  return {DyadicRatio{num, ml.scaled(1)}, DyadicRatio{num, ml}};
}

double rdist(const RealCube& a, const RealCube& b) {
  if (a.d != b.d) throw Error(ErrorKind::DimensionMismatch, "cubes of different dimension");
  double diam = 0.0;
  for (int i = 0; i < a.d; ++i) {
    const double lo = std::min(a.center[i] - a.side / 2, b.center[i] - b.side / 2);
    const double hi = std::max(a.center[i] + a.side / 2, b.center[i] + b.side / 2);
    diam = std::max(diam, hi - lo);
  }
  return diam / std::max(a.side, b.side);
}

bool is_lagom(const Cube& c, int M) {
  if (M < 1) throw Error(ErrorKind::InvalidArgument, "M must be >= 1");
  if (c.side < Dyadic::pow2(-M) || c.side > Dyadic::pow2(M)) return false;
  const auto r = rdist(c, centered_ball(c.d, Dyadic::pow2(M)));
  return r <= DyadicRatio{Dyadic(M), Dyadic(1)};
}

bool is_lagom(const DyadicCube& c, int M) {
  if (M < 1) throw Error(ErrorKind::InvalidArgument, "M must be >= 1");
  if (c.j < -M || c.j > M) return false;
  return is_lagom(c.to_cube(), M);
}

bool is_lagom(const RealCube& c, int M) {
  if (M < 1) throw Error(ErrorKind::InvalidArgument, "M must be >= 1");
  const double big = std::ldexp(1.0, M);
  if (c.side < 1.0 / big || c.side > big) return false;
  RealCube ball;
  ball.d = c.d;
  ball.side = big;
  return rdist(c, ball) <= M;
}

Dyadic lagom_center_bound(int M) { return Dyadic(2 * std::int64_t(M) - 1, M); }

std::vector<DyadicCube> enumerate_lagom_dyadic(int M, int d) {
  check_dim(d);
  if (M < 1) throw Error(ErrorKind::InvalidArgument, "M must be >= 1");
  if (M > 40) throw Error(ErrorKind::EnumerationTooLarge, "M too large to enumerate");
  // centre (2k+1) 2^{j-1} within +-W  <=>  k in [-W', W'-1] with W' = W / 2^j
  auto half_window = [M](int j) { return (2 * std::int64_t(M) - 1) << (M - j); };
  double total = 0.0;
  for (int j = -M; j <= M; ++j) total += std::pow(2.0 * double(half_window(j)), d);
  if (total >= kEnumerationLimit)
    throw Error(ErrorKind::EnumerationTooLarge,
                "|D_M| scan window " + std::to_string(total) + " exceeds guard");
  std::vector<DyadicCube> out;
  for (int j = -M; j <= M; ++j) {
    const std::int64_t w = half_window(j);
    std::array<std::int64_t, kMaxDim> lo{}, hi{};
    for (int i = 0; i < d; ++i) {
      lo[i] = -w;
      hi[i] = w - 1;
    }
    for_each_corner(d, lo, hi, [&](const auto& k) {
      DyadicCube c{d, j, k};
      if (is_lagom(c, M)) out.push_back(c);
    });
  }
  return out;
}

std::vector<DyadicCube> family_Ikm(const DyadicCube& cube, int k, int m) {
  if (m < 1) throw Error(ErrorKind::InvalidArgument, "m must be >= 1");
  const int d = cube.d;
  const int jj = cube.j - k;
  const Dyadic big = Dyadic::pow2(std::max(cube.j, jj));
  // rdist >= (1 + |dc|/max l)/2 and rdist < m+1 give |dc| < (2m+1) max l
  const Dyadic window = Dyadic(2 * std::int64_t(m) + 1) * big;
  std::array<std::int64_t, kMaxDim> lo{}, hi{};
  double count = 1.0;
  for (int i = 0; i < d; ++i) {
    const Dyadic c = cube.center_coord(i);
    // centre of J is (kJ + 1/2) 2^jj
    lo[i] = floor((c - window).scaled(-jj) - Dyadic(1, -1)).to_integer();
    hi[i] = ceil((c + window).scaled(-jj)).to_integer();
    count *= double(hi[i] - lo[i] + 1);
  }
  if (count >= kEnumerationLimit)
    throw Error(ErrorKind::EnumerationTooLarge, "I_{k,m} scan window exceeds guard");
  const Cube ic = cube.to_cube();
  const DyadicRatio lower{Dyadic(m), Dyadic(1)};
  const DyadicRatio upper{Dyadic(m + 1), Dyadic(1)};
  std::vector<DyadicCube> out;
  for_each_corner(d, lo, hi, [&](const auto& kk) {
    DyadicCube j{d, jj, kk};
    const auto r = rdist(ic, j.to_cube());
    if (lower <= r && r < upper) out.push_back(j);
  });
  return out;
}

double family_Ikm_count_formula(int d, int k, int m) {
  return std::ldexp(1.0, std::max(k, 0) * d) * 2.0 * d * std::pow(2.0 * m, d - 1);
}

CompanionCubes companion_cubes(const Cube& a, const Cube& b, double theta) {
  check_same_dim(a, b);
  if (!(theta > 0.0 && theta < 1.0))
    throw Error(ErrorKind::InvalidArgument, "theta must lie in (0,1)");
  const bool b_smaller = b.side <= a.side;
  const Cube& kmin = b_smaller ? b : a;
  const Cube& kmax = b_smaller ? a : b;
  const auto g = enclosing_cube(a, b);

  CompanionCubes out;
  out.i3 = g.enclosing;
  out.lambda1 = DyadicRatio{g.diam, kmax.side};
  out.lambda2 = std::pow(kmin.side.to_double(), -theta) * std::pow(g.diam.to_double(), theta);

  // K~max: K_max translated to the centre of K_min
  out.i4 = kmin;
  out.i4.side = g.diam;
  out.i5 = RealCube::from(kmin);
  out.i5.side = out.lambda2 * kmax.side.to_double();
  out.i6 = RealCube::from(kmin);
  out.i6.side = out.lambda2 * kmin.side.to_double();
  return out;
}

DyadicRatio w_weight(std::span<const Cube> union_of, const Cube& k) {
  if (union_of.empty()) throw Error(ErrorKind::EmptyRegion, "no cubes describe the region");
  const int d = k.d;
  for (const auto& c : union_of) {
    if (c.d != d) throw Error(ErrorKind::DimensionMismatch, "region cube dimension");
  }
  std::array<std::vector<Dyadic>, kMaxDim> cuts;
  for (int i = 0; i < d; ++i) {
    for (const auto& c : union_of) {
      cuts[i].push_back(c.lower(i));
      cuts[i].push_back(c.upper(i));
    }
    std::sort(cuts[i].begin(), cuts[i].end());
    cuts[i].erase(std::unique(cuts[i].begin(), cuts[i].end()), cuts[i].end());
  }
  // compressed cell t along an axis: t = 0 is (-inf, cut_0), t = n is [cut_{n-1}, inf)
  std::array<std::int64_t, kMaxDim> lo{}, hi{};
  for (int i = 0; i < d; ++i) hi[i] = static_cast<std::int64_t>(cuts[i].size());

  std::optional<Dyadic> best;
  for_each_corner(d, lo, hi, [&](const auto& t) {
    bool bounded = true;
    for (int i = 0; i < d; ++i) {
      if (t[i] == 0 || t[i] == hi[i]) bounded = false;
    }
    bool covered = false;
    if (bounded) {
      for (const auto& c : union_of) {
        bool inside = true;
        for (int i = 0; i < d && inside; ++i) {
          inside = c.lower(i) <= cuts[i][t[i] - 1] && cuts[i][t[i]] <= c.upper(i);
        }
        if (inside) {
          covered = true;
          break;
        }
      }
    }
    if (covered) return;
    Dyadic dist;
    for (int i = 0; i < d; ++i) {
      const Dyadic x = k.center[i];
      Dyadic gap;
      if (t[i] > 0 && x < cuts[i][t[i] - 1]) gap = cuts[i][t[i] - 1] - x;
      if (t[i] < hi[i] && x > cuts[i][t[i]]) gap = x - cuts[i][t[i]];
      dist = std::max(dist, gap);
    }
    if (!best || dist < *best) best = dist;
  });
  return DyadicRatio{k.side + *best, k.side};
}

}  // namespace lagom
