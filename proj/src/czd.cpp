#include "lagom/czd.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "lagom/error.hpp"
#include "lagom/haar.hpp"

namespace lagom {

namespace {

using Coords = std::array<std::int64_t, kMaxDim>;

// Grid cell coordinates covered by a dyadic cube that fits the grid.
struct CellRange {
  Coords lo{};
  std::int64_t n = 1;
};

CellRange cell_range(const GridSpec& spec, const DyadicCube& c) {
  CellRange r;
  r.n = std::int64_t(1) << (c.j + spec.R);
  for (int a = 0; a < spec.d; ++a)
    r.lo[a] = ((c.lower(a) - spec.box_lower()).scaled(spec.R)).to_integer();
  return r;
}

template <class F>
void for_cells(const GridSpec& spec, const CellRange& r, F&& fn) {
  const int d = spec.d;
  const std::int64_t n1 = d > 1 ? r.n : 1, n2 = d > 2 ? r.n : 1;
  std::size_t local = 0;
  for (std::int64_t c2 = 0; c2 < n2; ++c2)
    for (std::int64_t c1 = 0; c1 < n1; ++c1)
      for (std::int64_t c0 = 0; c0 < r.n; ++c0, ++local)
        fn(spec.index({r.lo[0] + c0, r.lo[1] + c1, r.lo[2] + c2}), local);
}

// Half-cell units from the box corner, clipped to the box.
std::int64_t half_units(const GridSpec& spec, const Dyadic& x) {
  const std::int64_t u = (x - spec.box_lower()).scaled(spec.R + 1).to_integer();
  return std::clamp<std::int64_t>(u, 0, 2 * spec.per_axis());
}

}  // namespace

GridFunction CZDecomposition::bad_part(std::size_t i) const {
  const BadPart& b = bad.at(i);
  GridFunction out(spec);
  for_cells(spec, cell_range(spec, b.cube), [&](std::size_t idx, std::size_t local) { out[idx] = b.values[local]; });
  return out;
}

GridFunction CZDecomposition::bad_sum() const {
  GridFunction out(spec);
  for (const BadPart& b : bad)
    for_cells(spec, cell_range(spec, b.cube), [&](std::size_t idx, std::size_t local) { out[idx] = b.values[local]; });
  return out;
}

CZDecomposition decompose(const GridFunction& f, double threshold, Exec exec) {
  if (!(threshold > 0.0) || !std::isfinite(threshold))
    throw Error(ErrorKind::InvalidArgument, "threshold must be positive");
  const GridSpec& spec = f.spec();
  const int d = spec.d;

  GridFunction absf(spec);
  for (std::size_t i = 0; i < f.size(); ++i) absf[i] = std::abs(f[i]);
  const auto abs_avg = cube_averages(absf, exec);
  const auto avg = cube_averages(f, exec);

  CZDecomposition dec;
  dec.spec = spec;
  dec.threshold = threshold;

  // covered[p] at the current scale: p lies inside a selected cube.
  std::vector<std::uint8_t> covered;
  for (int j = spec.B; j >= -spec.R; --j) {
    const ScaleLayout layout{spec, j};
    const auto& a = abs_avg[static_cast<std::size_t>(j + spec.R)];
    std::vector<std::uint8_t> cur(layout.count(), 0);
    std::vector<std::uint8_t> picked(layout.count(), 0);
    const std::int64_t n = layout.per_axis();
    kernels::for_range(layout.count(), exec, [&](std::size_t p) {
      bool parent_covered = false;
      if (!covered.empty()) {
        Coords pc{};
        std::size_t rest = p;
        for (int ax = 0; ax < d; ++ax) {
          pc[ax] = static_cast<std::int64_t>(rest % static_cast<std::size_t>(n)) / 2;
          rest /= static_cast<std::size_t>(n);
        }
        std::size_t q = 0;
        for (int ax = d - 1; ax >= 0; --ax) q = q * static_cast<std::size_t>(n / 2) + static_cast<std::size_t>(pc[ax]);
        parent_covered = covered[q] != 0;
      }
      if (parent_covered) {
        cur[p] = 1;
      } else if (a[p].real() > threshold) {
        cur[p] = 1;
        picked[p] = 1;
      }
    });
    for (std::size_t p = 0; p < picked.size(); ++p) {
      if (!picked[p]) continue;
      const DyadicCube c = layout.cube(p);
      dec.cubes.push_back(c);
      dec.bad.push_back({c, avg[static_cast<std::size_t>(j + spec.R)][p], a[p].real(), {}});
    }
    covered = std::move(cur);
  }

  dec.good = f;
  kernels::for_range(dec.bad.size(), exec, [&](std::size_t i) {
    BadPart& b = dec.bad[i];
    const CellRange r = cell_range(spec, b.cube);
    b.values.resize(static_cast<std::size_t>(std::pow(r.n, d)));
    for_cells(spec, r, [&](std::size_t idx, std::size_t local) {
      b.values[local] = f[idx] - b.mean;
      dec.good[idx] = b.mean;
    });
  });

  const Dyadic edge = Dyadic::pow2(spec.B);
  bool top = false, margin = true;
  for (const auto& c : dec.cubes) {
    top = top || c.j == spec.B;
    const Cube t = dilate_ten(c);
    for (int a = 0; a < d; ++a) margin = margin && t.lower(a) >= -edge && t.upper(a) <= edge;
  }
  if (top) dec.warnings.emplace_back("a cube of the top scale was selected; the bound on the good part may fail");
  if (!margin) dec.warnings.emplace_back("some cube 10I leaves the box; its measure is clipped");
  return dec;
}

Cube dilate_ten(const DyadicCube& c) { return c.to_cube().dilated(Dyadic(10)); }

ExceptionalMeasures exceptional_measures(const CZDecomposition& dec) {
  ExceptionalMeasures out;
  if (dec.cubes.empty()) return out;
  const GridSpec& spec = dec.spec;
  const int d = spec.d;
  for (const auto& c : dec.cubes) out.E += c.side().to_double() * (d > 1 ? c.side().to_double() : 1.0) *
                                           (d > 2 ? c.side().to_double() : 1.0);

  // Union of the clipped 10I on the compressed coordinates of their faces.
  std::array<std::vector<std::int64_t>, kMaxDim> faces;
  std::vector<std::array<std::int64_t, 2 * kMaxDim>> boxes;
  for (const auto& c : dec.cubes) {
    const Cube t = dilate_ten(c);
    std::array<std::int64_t, 2 * kMaxDim> b{};
    for (int a = 0; a < d; ++a) {
      b[2 * a] = half_units(spec, t.lower(a));
      b[2 * a + 1] = half_units(spec, t.upper(a));
      faces[a].push_back(b[2 * a]);
      faces[a].push_back(b[2 * a + 1]);
    }
    boxes.push_back(b);
  }
  std::size_t total = 1;
  std::array<std::size_t, kMaxDim> cells{1, 1, 1};
  for (int a = 0; a < d; ++a) {
    std::sort(faces[a].begin(), faces[a].end());
    faces[a].erase(std::unique(faces[a].begin(), faces[a].end()), faces[a].end());
    cells[a] = faces[a].size() - 1;
    total *= cells[a];
  }
  if (total > (std::size_t(1) << 27)) throw Error(ErrorKind::MemoryGuard, "too many distinct cube faces");
  std::vector<std::uint8_t> mark(total, 0);
  for (const auto& b : boxes) {
    std::array<std::size_t, 2 * kMaxDim> r{0, 1, 0, 1, 0, 1};
    for (int a = 0; a < d; ++a) {
      r[2 * a] = static_cast<std::size_t>(std::lower_bound(faces[a].begin(), faces[a].end(), b[2 * a]) - faces[a].begin());
      r[2 * a + 1] =
          static_cast<std::size_t>(std::lower_bound(faces[a].begin(), faces[a].end(), b[2 * a + 1]) - faces[a].begin());
    }
    for (std::size_t i2 = r[4]; i2 < r[5]; ++i2)
      for (std::size_t i1 = r[2]; i1 < r[3]; ++i1)
        for (std::size_t i0 = r[0]; i0 < r[1]; ++i0) mark[(i2 * cells[1] + i1) * cells[0] + i0] = 1;
  }
  auto len = [&](int a, std::size_t i) { return a < d ? faces[a][i + 1] - faces[a][i] : std::int64_t(1); };
  std::int64_t units = 0;  // in half-cell volumes
  for (std::size_t i2 = 0; i2 < cells[2]; ++i2)
    for (std::size_t i1 = 0; i1 < cells[1]; ++i1)
      for (std::size_t i0 = 0; i0 < cells[0]; ++i0)
        if (mark[(i2 * cells[1] + i1) * cells[0] + i0]) units += len(0, i0) * len(1, i1) * len(2, i2);
  out.E_tilde = std::ldexp(static_cast<double>(units), -(spec.R + 1) * d);
  return out;
}

double reconstruction_defect(const CZDecomposition& dec, const GridFunction& f) {
  check_same_spec(dec.spec, f.spec());
  const GridFunction b = dec.bad_sum();
  double worst = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double err = std::abs(f[i] - (dec.good[i] + b[i]));
    if (err == 0.0) continue;
    worst = std::max(worst, err / (0x1p-52 * (std::abs(f[i]) + std::abs(dec.good[i]))));
  }
  return worst;
}

void write_cubes_csv(const std::filesystem::path& path, const CZDecomposition& dec) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot open " + path.string());
  out << "j";
  for (int a = 0; a < dec.spec.d; ++a) out << ",k" << a + 1;
  out << ",abs_average\n";
  out.precision(17);
  for (const auto& b : dec.bad) {
    out << b.cube.j;
    for (int a = 0; a < dec.spec.d; ++a) out << ',' << b.cube.k[a];
    out << ',' << b.abs_average << '\n';
  }
  if (!out) throw Error(ErrorKind::Io, "write failed for " + path.string());
}

void write_parts(const std::filesystem::path& good, const std::filesystem::path& bad, const CZDecomposition& dec) {
  write_binary(good, dec.good);
  write_binary(bad, dec.bad_sum());
}

}  // namespace lagom
