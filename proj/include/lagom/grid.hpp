#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "lagom/dyadic.hpp"
#include "lagom/geometry.hpp"
#include "lagom/kernels.hpp"

namespace lagom {

using complex = std::complex<double>;
using kernels::Exec;

/// Uniform grid on the box [-2^B, 2^B)^d with cell side 2^-R.
struct GridSpec {
  int d = 1;
  int B = 0;
  int R = 0;

  static constexpr std::int64_t kMaxCells = std::int64_t(1) << 28;

  std::int64_t per_axis() const { return std::int64_t(1) << (B + R + 1); }
  std::size_t cell_count() const;
  Dyadic cell_side() const { return Dyadic::pow2(-R); }
  double h() const { return std::ldexp(1.0, -R); }
  double cell_volume() const { return std::ldexp(1.0, -R * d); }
  Dyadic box_lower() const { return -Dyadic::pow2(B); }

  /// Throws on d outside 1..3, negative exponents or too many cells.
  void validate() const;

  std::array<std::int64_t, kMaxDim> coords(std::size_t index) const;
  std::size_t index(const std::array<std::int64_t, kMaxDim>& coords) const;
  /// Cell centre along one axis.
  double center(std::int64_t coord) const { return -std::ldexp(1.0, B) + (double(coord) + 0.5) * h(); }
  Dyadic center_exact(std::int64_t coord) const;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

/// Piecewise-constant complex function, one value per grid cell. Axis 0
/// varies fastest in the flat layout.
class GridFunction {
 public:
  GridFunction() = default;
  explicit GridFunction(GridSpec spec);
  GridFunction(GridSpec spec, std::vector<complex> values);

  const GridSpec& spec() const noexcept { return spec_; }
  std::span<const complex> values() const noexcept { return values_; }
  std::span<complex> mutable_values() noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  const complex& operator[](std::size_t i) const { return values_[i]; }
  complex& operator[](std::size_t i) { return values_[i]; }

  GridFunction& operator+=(const GridFunction& o);
  GridFunction& operator-=(const GridFunction& o);
  GridFunction& operator*=(complex s);
  friend GridFunction operator+(GridFunction a, const GridFunction& b) { return a += b; }
  friend GridFunction operator-(GridFunction a, const GridFunction& b) { return a -= b; }
  friend GridFunction operator*(complex s, GridFunction a) { return a *= s; }

  /// Real parts as a separate vector (for real-valued operator kernels).
  std::vector<double> real_part() const;
  std::vector<double> imag_part() const;
  bool is_real() const;

 private:
  GridSpec spec_;
  std::vector<complex> values_;
};

void check_same_spec(const GridSpec& a, const GridSpec& b);

/// chi_I restricted to the box. I must be aligned to the grid.
GridFunction indicator(const Cube& cube, const GridSpec& spec);

/// Integral of f conj(g).
complex inner_product(const GridFunction& f, const GridFunction& g, Exec exec = Exec::Parallel);
complex integral(const GridFunction& f, Exec exec = Exec::Parallel);

/// ||f||_p for p in [1, inf]; pass std::numeric_limits<double>::infinity() for sup.
double lp_norm(const GridFunction& f, double p, Exec exec = Exec::Parallel);

/// m({|f| > lambda}).
double distribution_function(const GridFunction& f, double lambda);

/// sup_lambda lambda * m({|f| > lambda}), evaluated exactly over the value levels.
double weak_l1_quasinorm(const GridFunction& f);

/// Shift by an integer number of cells per axis, zero fill.
GridFunction translate_cells(const GridFunction& f, const std::array<std::int64_t, kMaxDim>& shift);

// Flat binary: int32 d, B, R then (re, im) little-endian doubles per cell.
void write_binary(const std::filesystem::path& path, const GridFunction& f);
GridFunction read_binary(const std::filesystem::path& path);
// CSV: "cell,re,im".
void write_csv(const std::filesystem::path& path, const GridFunction& f);
GridFunction read_csv(const std::filesystem::path& path, const GridSpec& spec);

}  // namespace lagom
