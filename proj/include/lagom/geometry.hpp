#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lagom/dyadic.hpp"

namespace lagom {

inline constexpr int kMaxDim = 3;

/// Axis-parallel cube with exact dyadic centre and side.
struct Cube {
  int d = 1;
  std::array<Dyadic, kMaxDim> center{};
  Dyadic side{1};

  Dyadic lower(int axis) const { return center[axis] - side.half(); }
  Dyadic upper(int axis) const { return center[axis] + side.half(); }
  Dyadic volume() const { return pow(side, d); }

  /// The cube lambda*I: same centre, side scaled by a dyadic factor.
  Cube dilated(const Dyadic& lambda) const;

  std::string to_string() const;  // "d:cx,...:side"
  static Cube parse(std::string_view text);

  friend bool operator==(const Cube&, const Cube&) = default;
};

/// Cube 2^j * prod [k_i, k_i + 1).
struct DyadicCube {
  int d = 1;
  int j = 0;
  std::array<std::int64_t, kMaxDim> k{};

  Dyadic side() const { return Dyadic::pow2(j); }
  Dyadic lower(int axis) const { return Dyadic(k[axis], j); }
  Dyadic center_coord(int axis) const { return Dyadic(2 * k[axis] + 1, j - 1); }
  Cube to_cube() const;
  DyadicCube parent() const;

  std::string to_string() const;  // "d:j:k1,...,kd"
  static DyadicCube parse(std::string_view text);

  friend auto operator<=>(const DyadicCube&, const DyadicCube&) = default;
};

/// Cube with floating-point geometry. Only the lambda_2 companion cubes need it.
struct RealCube {
  int d = 1;
  std::array<double, kMaxDim> center{};
  double side = 1.0;

  static RealCube from(const Cube& c);
};

/// (-lambda/2, lambda/2)^d.
Cube centered_ball(int d, const Dyadic& lambda);

struct CubePairGeometry {
  Dyadic diam;
  DyadicRatio rdist;
  DyadicRatio ecc;
  Cube enclosing;
};

/// Smallest enclosing cube <I,J> with the coordinatewise-minimal corner, plus
/// diam, rdist and ecc of the pair.
CubePairGeometry enclosing_cube(const Cube& a, const Cube& b);

DyadicRatio rdist(const Cube& a, const Cube& b);
DyadicRatio ecc(const Cube& a, const Cube& b);

/// Lower and upper bounds of rdist in terms of the centre distance:
/// (1 + |c(I)-c(J)|_inf / max l) / 2 and 1 + |c(I)-c(J)|_inf / max l.
std::pair<DyadicRatio, DyadicRatio> rdist_bounds(const Cube& a, const Cube& b);

double rdist(const RealCube& a, const RealCube& b);

bool is_lagom(const Cube& c, int M);
bool is_lagom(const DyadicCube& c, int M);
bool is_lagom(const RealCube& c, int M);

/// Exact centre bound for members of C_M, |c(I)|_inf <= (2M - 1) 2^M, which
/// follows from the lower rdist bound. Used as the scan window.
Dyadic lagom_center_bound(int M);

inline constexpr double kEnumerationLimit = 1e8;

/// All dyadic lagom cubes D_M, ordered by scale and then corner.
std::vector<DyadicCube> enumerate_lagom_dyadic(int M, int d);

/// I_{k,m} = { J dyadic : l(I) = 2^k l(J), m <= rdist(I,J) < m+1 }.
std::vector<DyadicCube> family_Ikm(const DyadicCube& cube, int k, int m);

/// Cardinality 2^{max(k,0) d} 2d (2m)^{d-1} quoted for I_{k,m}.
double family_Ikm_count_formula(int d, int k, int m);

struct CompanionCubes {
  Cube i3;  // <I,J>
  Cube i4;  // lambda_1 * K~max
  RealCube i5;  // lambda_2 * K~max
  RealCube i6;  // lambda_2 * K_min
  DyadicRatio lambda1;
  double lambda2 = 1.0;
};

CompanionCubes companion_cubes(const Cube& a, const Cube& b, double theta);

/// w = 1 + dist_inf(complement of the union, c(K)) / l(K).
DyadicRatio w_weight(std::span<const Cube> union_of, const Cube& k);

}  // namespace lagom
