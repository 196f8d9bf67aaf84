#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "lagom/geometry.hpp"
#include "lagom/grid.hpp"

namespace lagom {

/// Dyadic cubes of side 2^j inside the grid box, flattened with axis 0
/// fastest. Valid for -R <= j <= B.
struct ScaleLayout {
  GridSpec spec;
  int j = 0;

  std::int64_t per_axis() const { return std::int64_t(1) << (spec.B + 1 - j); }
  std::int64_t offset() const { return std::int64_t(1) << (spec.B - j); }
  std::size_t count() const;
  bool contains(const DyadicCube& c) const;
  std::size_t index(const DyadicCube& c) const;
  DyadicCube cube(std::size_t index) const;
};

struct HaarEntry {
  DyadicCube cube;
  int type = 0;  // 0 marks a scaling coefficient of a top-level cube
  complex value;
};

/// <f, psi_I^i> for every dyadic cube I in the box with 2^{1-R} <= l(I) <= 2^B
/// and every type i in 1..2^d-1, plus the scaling coefficients of the 2^d
/// cubes of side 2^B. Type i is a bit mask: a set bit a means the Haar
/// factor (+ on the left half, - on the right) along axis a.
class HaarCoefficients {
 public:
  HaarCoefficients() = default;
  explicit HaarCoefficients(GridSpec spec);

  const GridSpec& spec() const noexcept { return spec_; }
  int types() const noexcept { return (1 << spec_.d) - 1; }
  int min_scale() const noexcept { return 1 - spec_.R; }
  int max_scale() const noexcept { return spec_.B; }

  bool contains(const DyadicCube& c) const;
  complex get(const DyadicCube& c, int type) const;
  void set(const DyadicCube& c, int type, complex v);

  /// Dense storage of one scale: cube index * types() + (type - 1).
  std::span<complex> level(int j);
  std::span<const complex> level(int j) const;
  std::span<complex> scaling() { return scaling_; }
  std::span<const complex> scaling() const { return scaling_; }

  /// Nonzero entries sorted by scale, corner, type.
  std::vector<HaarEntry> entries() const;
  double energy() const;

  HaarCoefficients& operator+=(const HaarCoefficients& o);
  HaarCoefficients& operator*=(complex s);

  // CSV rows "j,k1,..,kd,i,re,im"; only nonzero entries are written.
  void write_csv(const std::filesystem::path& path) const;
  static HaarCoefficients read_csv(const std::filesystem::path& path, const GridSpec& spec);

 private:
  std::span<complex> slot(const DyadicCube& c, int type);
  std::span<const complex> slot(const DyadicCube& c, int type) const;

  GridSpec spec_;
  std::vector<std::vector<complex>> levels_;  // index j - min_scale()
  std::vector<complex> scaling_;
};

HaarCoefficients analyze(const GridFunction& f, Exec exec = Exec::Parallel);
GridFunction synthesize(const HaarCoefficients& c, Exec exec = Exec::Parallel);

/// psi_I^i sampled on the grid, built cell by cell.
GridFunction haar_function(const GridSpec& spec, const DyadicCube& cube, int type);

/// Averages of f over every dyadic cube of side 2^j, -R <= j <= B; index j + R.
std::vector<std::vector<complex>> cube_averages(const GridFunction& f, Exec exec = Exec::Parallel);

/// Cell values sum_J w_J over all ancestors J of the cell (including the cell
/// itself); weights laid out as cube_averages returns them.
GridFunction accumulate_down(const GridSpec& spec, const std::vector<std::vector<complex>>& weights,
                             Exec exec = Exec::Parallel);

/// Orthogonal projection onto span{psi_I^i : I in D_M} and its complement.
/// Coarse scaling content belongs to the complement. Requires B >= M.
class LagomProjector {
 public:
  LagomProjector(const GridSpec& spec, int M);

  int M() const noexcept { return M_; }
  const GridSpec& spec() const noexcept { return spec_; }
  bool keeps(int j, std::size_t cube_index) const;

  GridFunction project(const GridFunction& f, Exec exec = Exec::Parallel) const;
  GridFunction complement(const GridFunction& f, Exec exec = Exec::Parallel) const;
  /// Keeps the lagom (or, with lagom = false, the complementary) coefficients.
  HaarCoefficients restrict(const HaarCoefficients& c, bool lagom) const;

 private:
  GridFunction filtered(const GridFunction& f, bool lagom, Exec exec) const;

  GridSpec spec_;
  int M_;
  std::vector<std::vector<std::uint8_t>> keep_;  // index j - (1 - R)
};

GridFunction project_lagom(const GridFunction& f, int M, Exec exec = Exec::Parallel);
GridFunction project_lagom_complement(const GridFunction& f, int M, Exec exec = Exec::Parallel);

/// max over Omega of (|Omega|^-1 sum_{I not in D_M, I in Omega} sum_i |c_I^i|^2)^{1/2}.
double cmo_defect(const HaarCoefficients& c, int M, std::span<const Cube> omegas);
/// Same with Omega ranging over every dyadic cube of the grid that can hold a wavelet cube.
double cmo_defect(const HaarCoefficients& c, int M);

/// max over dyadic Omega in the grid of (|Omega|^-1 sum_{I in Omega} sum_i |c_I^i|^2)^{1/2}.
double carleson_constant(const HaarCoefficients& c);

}  // namespace lagom
