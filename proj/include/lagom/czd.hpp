#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "lagom/geometry.hpp"
#include "lagom/grid.hpp"

namespace lagom {

/// f_I = (f - m_I(f)) chi_I, stored on the cells of I (axis 0 fastest).
struct BadPart {
  DyadicCube cube;
  complex mean;                 // m_I(f)
  double abs_average = 0.0;     // |I|^-1 int_I |f|
  std::vector<complex> values;
};

struct CZDecomposition {
  GridSpec spec;
  double threshold = 0.0;
  std::vector<DyadicCube> cubes;  // maximal, pairwise disjoint; E is their union
  GridFunction good;
  std::vector<BadPart> bad;       // parallel to cubes
  std::vector<std::string> warnings;

  GridFunction bad_part(std::size_t i) const;
  /// Sum of all bad parts, f - good.
  GridFunction bad_sum() const;
};

/// Maximal dyadic cubes of the box (side 2^B down to single cells) whose
/// |f|-average exceeds the threshold strictly.
CZDecomposition decompose(const GridFunction& f, double threshold, Exec exec = Exec::Parallel);

struct ExceptionalMeasures {
  double E = 0.0;
  double E_tilde = 0.0;  // union of the cubes 10 I, clipped to the box
};

ExceptionalMeasures exceptional_measures(const CZDecomposition& dec);

/// max over cells of |f - (good + bad)| / (eps (|f| + |good|)), eps = 2^-52.
/// Zero when f - m_I is representable on every cell, e.g. for inputs on a
/// coarse dyadic lattice; at most 1 otherwise.
double reconstruction_defect(const CZDecomposition& dec, const GridFunction& f);

/// 10 I: same centre, ten times the side.
Cube dilate_ten(const DyadicCube& c);

/// Rows "j,k1,..,kd,abs_average".
void write_cubes_csv(const std::filesystem::path& path, const CZDecomposition& dec);
/// Good part and the sum of bad parts as binary grid files.
void write_parts(const std::filesystem::path& good, const std::filesystem::path& bad, const CZDecomposition& dec);

}  // namespace lagom
