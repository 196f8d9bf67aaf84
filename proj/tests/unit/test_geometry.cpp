#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "../common.hpp"
#include "lagom/error.hpp"
#include "lagom/geometry.hpp"

using namespace lagom;
using testing::Rational;
using testing::to_rational;

namespace {

Cube interval(std::int64_t lo, std::int64_t hi) {
  return Cube{1, {Dyadic(lo + hi, -1)}, Dyadic(hi - lo)};
}

Cube random_cube(std::mt19937_64& gen, int d) {
  Cube c;
  c.d = d;
  c.side = Dyadic::pow2(static_cast<int>(gen() % 9) - 4) * Dyadic(static_cast<std::int64_t>(gen() % 3) + 1);
  for (int a = 0; a < d; ++a) c.center[a] = Dyadic(static_cast<std::int64_t>(gen() % 257) - 128, -3);
  return c;
}

}  // namespace

TEST_CASE("enclosing cube on the documented pairs") {
  auto g = enclosing_cube(interval(0, 1), interval(2, 3));
  CHECK(g.diam == Dyadic(3));
  CHECK(to_rational(g.rdist) == 3);
  CHECK(to_rational(g.ecc) == 1);

  const Cube I = interval(0, 1);
  g = enclosing_cube(I, I);
  CHECK(g.diam == I.side);
  CHECK(to_rational(g.rdist) == 1);

  Cube a{2, {Dyadic(1, -1), Dyadic(1, -1)}, Dyadic(1)};
  Cube b{2, {Dyadic(5, -1), Dyadic(1, -1)}, Dyadic(1)};
  g = enclosing_cube(a, b);
  CHECK(g.diam == Dyadic(3));
  CHECK(to_rational(g.rdist) == 3);
  CHECK(to_rational(g.ecc) == 1);
  CHECK(g.enclosing.lower(0) == Dyadic(0));
  CHECK(g.enclosing.lower(1) == Dyadic(-2));  // coordinatewise-minimal corner

  CHECK_THROWS_AS(enclosing_cube(I, a), Error);
}

TEST_CASE("pair geometry matches a rational oracle") {
  std::mt19937_64 gen(11);
  for (int n = 0; n < 2000; ++n) {
    const int d = 1 + static_cast<int>(n % 3);
    const Cube a = random_cube(gen, d), b = random_cube(gen, d);
    const auto g = enclosing_cube(a, b);
    const auto o = testing::pair_oracle(testing::RCube::from(a), testing::RCube::from(b));
    REQUIRE(to_rational(g.diam) == o.diam);
    REQUIRE(to_rational(g.rdist) == o.rdist);
    REQUIRE(to_rational(g.ecc) == o.ecc);
    for (int i = 0; i < d; ++i) REQUIRE(to_rational(g.enclosing.lower(i)) == o.corner[static_cast<std::size_t>(i)]);
    // symmetric, rdist >= 1, ecc in (0, 1]
    REQUIRE(rdist(a, b) == rdist(b, a));
    REQUIRE(ecc(a, b) == ecc(b, a));
    REQUIRE(o.rdist >= 1);
    REQUIRE(o.ecc > 0);
    REQUIRE(o.ecc <= 1);
    const auto [lo, hi] = rdist_bounds(a, b);
    REQUIRE(to_rational(lo) <= o.rdist);
    REQUIRE(o.rdist <= to_rational(hi));
  }
}

TEST_CASE("rdist bounds on hand-evaluated pairs") {
  const Cube I = interval(0, 1);
  auto [lo, hi] = rdist_bounds(I, I);
  CHECK(to_rational(lo) == Rational(1, 2));
  CHECK(to_rational(hi) == 1);
  std::tie(lo, hi) = rdist_bounds(I, interval(4, 5));
  CHECK(to_rational(lo) == Rational(5, 2));
  CHECK(to_rational(hi) == 5);
  CHECK(to_rational(rdist(I, interval(4, 5))) == 5);
}

TEST_CASE("lagom membership") {
  for (int d = 1; d <= 3; ++d) {
    Cube unit{d, {}, Dyadic(1)};
    for (int a = 0; a < d; ++a) unit.center[a] = Dyadic(1, -1);
    CHECK(is_lagom(unit, 1));
  }
  for (int M = 1; M <= 4; ++M) {
    const Cube big{1, {Dyadic::pow2(M)}, Dyadic::pow2(M + 1)};
    CHECK_FALSE(is_lagom(big, M));
    const Cube tiny{1, {Dyadic::pow2(-M - 2)}, Dyadic::pow2(-M - 1)};
    CHECK_FALSE(is_lagom(tiny, M));
  }
  CHECK(is_lagom(DyadicCube{1, 0, {0}}, 1));
  CHECK_FALSE(is_lagom(DyadicCube{1, 1, {0}}, 1));  // [0,2): rdist to (-1,1) is 3/2
}

TEST_CASE("enumerated lagom cubes lie in the ball of side (2M-1) 2^M") {
  // enclosing cube of I and B_{2^M} has side <= M 2^M and contains (-2^{M-1}, 2^{M-1})
  for (int M = 1; M <= 4; ++M)
    for (int d = 1; d <= 2; ++d) {
      const Dyadic reach = Dyadic(2 * M - 1) * Dyadic::pow2(M - 1);
      bool touches = false;
      for (const auto& c : enumerate_lagom_dyadic(M, d)) {
        REQUIRE(is_lagom(c, M));
        for (int a = 0; a < d; ++a) {
          REQUIRE(c.lower(a) >= -reach);
          REQUIRE(c.lower(a) + c.side() <= reach);
          REQUIRE(abs(c.center_coord(a)) <= lagom_center_bound(M));
          touches |= c.lower(a) + c.side() == reach;
        }
      }
      CHECK(touches);  // and the bound is attained
    }
}

TEST_CASE("lagom cubes inside B_{M 2^M} with centre within (M-1) 2^M" * doctest::should_fail()) {
  // [0,1) is lagom for M = 1 but sticks out of (-1/2, 1/2) and has centre 1/2 > 0.
  std::size_t bad = 0;
  for (int M = 1; M <= 3; ++M) {
    const Dyadic reach = Dyadic(M) * Dyadic::pow2(M - 1);
    for (const auto& c : enumerate_lagom_dyadic(M, 1))
      bad += abs(c.center_coord(0)) > Dyadic(M - 1) * Dyadic::pow2(M) || c.lower(0) < -reach ||
             c.lower(0) + c.side() > reach;
  }
  CHECK(bad == 0);
}

TEST_CASE("D_1 in one dimension equals a brute-force scan") {
  std::set<DyadicCube> scan;
  for (int j = -3; j <= 3; ++j)
    for (std::int64_t k = -64; k < 64; ++k) {
      const DyadicCube c{1, j, {k}};
      if (is_lagom(c.to_cube(), 1)) scan.insert(c);
    }
  const auto list = enumerate_lagom_dyadic(1, 1);
  CHECK(std::set<DyadicCube>(list.begin(), list.end()) == scan);
  CHECK(std::is_sorted(list.begin(), list.end(), [](const DyadicCube& a, const DyadicCube& b) {
    return a.j != b.j ? a.j < b.j : a.k < b.k;
  }));
}

TEST_CASE("D_M grows with M") {
  for (int d = 1; d <= 2; ++d)
    for (int M = 1; M <= (d == 1 ? 4 : 3); ++M) {
      const auto a = enumerate_lagom_dyadic(M, d), b = enumerate_lagom_dyadic(M + 1, d);
      const std::set<DyadicCube> bs(b.begin(), b.end());
      for (const auto& c : a) REQUIRE(bs.count(c) == 1);
    }
}

TEST_CASE("I_{k,m} enumeration") {
  const DyadicCube I{1, 0, {0}};
  const auto own = family_Ikm(I, 0, 1);
  CHECK(std::find(own.begin(), own.end(), I) != own.end());

  // d = 1, k = 1, m = 2 against a scan of all l(J) = 1/2 in a wide window
  std::set<DyadicCube> scan;
  for (std::int64_t k = -64; k < 64; ++k) {
    const DyadicCube J{1, -1, {k}};
    const Rational r = to_rational(rdist(I.to_cube(), J.to_cube()));
    if (r >= 2 && r < 3) scan.insert(J);
  }
  const auto fam = family_Ikm(I, 1, 2);
  CHECK(std::set<DyadicCube>(fam.begin(), fam.end()) == scan);

  // the sets over m are disjoint and cover rdist < m_max + 1
  for (int k = -2; k <= 2; ++k) {
    std::set<DyadicCube> seen;
    std::size_t total = 0;
    for (int m = 1; m <= 6; ++m) {
      for (const auto& J : family_Ikm(I, k, m)) {
        REQUIRE(seen.insert(J).second);
        ++total;
      }
    }
    std::size_t direct = 0;
    for (std::int64_t kk = -512; kk < 512; ++kk) {
      const DyadicCube J{1, -k, {kk}};
      direct += to_rational(rdist(I.to_cube(), J.to_cube())) < 7;
    }
    CHECK(total == direct);
  }
  CHECK_THROWS_AS(family_Ikm(I, 0, 0), Error);
}

TEST_CASE("I_{k,m} cardinality is comparable to the quoted count") {
  for (int d = 1; d <= 2; ++d) {
    const DyadicCube I{d, 0, {0, 0, 0}};
    for (int k = -3; k <= 3; ++k)
      for (int m = 1; m <= 8; ++m) {
        const double n = static_cast<double>(family_Ikm(I, k, m).size());
        const double ratio = n / family_Ikm_count_formula(d, k, m);
        INFO("d=" << d << " k=" << k << " m=" << m);
        CHECK(ratio >= 1.0 / 16);
        CHECK(ratio <= 16.0);
      }
  }
}

TEST_CASE("companion cubes") {
  const Cube I = interval(0, 1);
  auto cc = companion_cubes(I, I, 0.5);
  CHECK(to_rational(cc.lambda1) == 1);
  CHECK(cc.lambda2 == doctest::Approx(1.0));
  CHECK(cc.i4.side == I.side);
  CHECK(cc.i4.center[0] == I.center[0]);
  CHECK(cc.i5.side == doctest::Approx(1.0));
  CHECK(cc.i6.center[0] == doctest::Approx(0.5));

  cc = companion_cubes(I, interval(4, 5), 0.5);
  CHECK(to_rational(cc.lambda1) == 5);
  CHECK(cc.lambda2 == doctest::Approx(std::sqrt(5.0)).epsilon(1e-15));
  CHECK(cc.i4.side == Dyadic(5));
  CHECK(cc.i4.center[0] == Dyadic(9, -1));
  CHECK(cc.i3.side == Dyadic(5));

  std::mt19937_64 gen(5);
  for (int n = 0; n < 200; ++n) {
    const int d = 1 + n % 3;
    const Cube a = random_cube(gen, d), b = random_cube(gen, d);
    REQUIRE(companion_cubes(a, b, 0.25).i4.side == enclosing_cube(a, b).diam);
  }
  CHECK_THROWS_AS(companion_cubes(I, I, 1.0), Error);
}

TEST_CASE("w weight") {
  const Cube ten{1, {Dyadic(1, -1)}, Dyadic(10)};
  const Cube I = interval(0, 1);
  CHECK(to_rational(w_weight(std::span(&ten, 1), I)) == 6);  // nearest complement point 5 away
  const Cube far = interval(20, 21);
  CHECK(to_rational(w_weight(std::span(&ten, 1), far)) == 1);
  CHECK_THROWS_AS(w_weight(std::span<const Cube>(), I), Error);

  // single square region against dense sampling of its boundary
  const Cube sq{2, {Dyadic(0), Dyadic(0)}, Dyadic(8)};
  std::mt19937_64 gen(3);
  for (int n = 0; n < 20; ++n) {
    Cube K{2, {Dyadic(static_cast<std::int64_t>(gen() % 49) - 24, -3), Dyadic(static_cast<std::int64_t>(gen() % 49) - 24, -3)},
           Dyadic(1, -1)};
    double best = 1e300;
    const int steps = 1 << 12;
    for (int s = 0; s <= steps; ++s) {
      const double u = -4.0 + 8.0 * s / steps;
      const double cx = K.center[0].to_double(), cy = K.center[1].to_double();
      for (auto [px, py] : {std::pair{u, -4.0}, {u, 4.0}, {-4.0, u}, {4.0, u}})
        best = std::min(best, std::max(std::abs(px - cx), std::abs(py - cy)));
    }
    const double want = 1.0 + best / K.side.to_double();
    CHECK(w_weight(std::span(&sq, 1), K).to_double() == doctest::Approx(want).epsilon(0x1p-20));
  }
}

TEST_CASE("text forms round-trip") {
  const DyadicCube c{2, -3, {5, -7}};
  CHECK(c.to_string() == "2:-3:5,-7");
  CHECK(DyadicCube::parse(c.to_string()) == c);
  const Cube g = c.to_cube();
  CHECK(Cube::parse(g.to_string()).side == g.side);
  CHECK(Dyadic::parse(Dyadic(3, -4).to_string()) == Dyadic(3, -4));
  CHECK_THROWS_AS(DyadicCube::parse("2:x:1"), Error);
}
