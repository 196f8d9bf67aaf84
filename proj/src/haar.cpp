#include "lagom/haar.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "lagom/error.hpp"

namespace lagom {

namespace {

using Coords = std::array<std::int64_t, kMaxDim>;

Coords decode(std::size_t index, std::int64_t n, int d) {
  Coords c{};
  for (int a = 0; a < d; ++a) {
    c[a] = static_cast<std::int64_t>(index % static_cast<std::size_t>(n));
    index /= static_cast<std::size_t>(n);
  }
  return c;
}

std::size_t encode(const Coords& c, std::int64_t n, int d) {
  std::size_t idx = 0;
  for (int a = d - 1; a >= 0; --a) idx = idx * static_cast<std::size_t>(n) + static_cast<std::size_t>(c[a]);
  return idx;
}

// |P|^{1/2} for a cube of side 2^j in dimension d.
double sqrt_volume(int j, int d) {
  const int e = j * d;
  return e % 2 == 0 ? std::ldexp(1.0, e / 2) : std::ldexp(std::numbers::sqrt2, (e - 1) / 2);
}

// Average/difference form: detail[j] holds the signed means D_I^i with
// <f, psi_I^i> = |I|^{1/2} D_I^i; top holds the averages over the 2^d
// cubes of side 2^B.
struct RawHaar {
  std::vector<std::vector<complex>> detail;
  std::vector<complex> top;
};

void forward_butterfly(complex* v, int d) {
  const int n = 1 << d;
  for (int a = 0; a < d; ++a) {
    const int bit = 1 << a;
    for (int m = 0; m < n; ++m) {
      if (m & bit) continue;
      const complex l = v[m], r = v[m | bit];
      v[m] = (l + r) * 0.5;
      v[m | bit] = (l - r) * 0.5;
    }
  }
}

void inverse_butterfly(complex* v, int d) {
  const int n = 1 << d;
  for (int a = 0; a < d; ++a) {
    const int bit = 1 << a;
    for (int m = 0; m < n; ++m) {
      if (m & bit) continue;
      const complex s = v[m], t = v[m | bit];
      v[m] = s + t;
      v[m | bit] = s - t;
    }
  }
}

// Child of parent coordinates pc in direction mask c, at the finer level.
std::size_t child_index(const Coords& pc, int mask, std::int64_t child_n, int d) {
  Coords cc{};
  for (int a = 0; a < d; ++a) cc[a] = 2 * pc[a] + ((mask >> a) & 1);
  return encode(cc, child_n, d);
}

RawHaar analyze_raw(const GridFunction& f, Exec exec) {
  const GridSpec& spec = f.spec();
  const int d = spec.d;
  const int nt = (1 << d) - 1;
  RawHaar raw;
  std::vector<complex> cur(f.values().begin(), f.values().end());
  for (int j = 1 - spec.R; j <= spec.B; ++j) {
    const ScaleLayout parent{spec, j};
    const std::int64_t child_n = 2 * parent.per_axis();
    std::vector<complex> next(parent.count());
    std::vector<complex> detail(parent.count() * nt);
    kernels::for_range(parent.count(), exec, [&](std::size_t p) {
      const Coords pc = decode(p, parent.per_axis(), d);
      complex v[1 << kMaxDim];
      for (int m = 0; m <= nt; ++m) v[m] = cur[child_index(pc, m, child_n, d)];
      forward_butterfly(v, d);
      next[p] = v[0];
      for (int i = 1; i <= nt; ++i) detail[p * nt + (i - 1)] = v[i];
    });
    raw.detail.push_back(std::move(detail));
    cur = std::move(next);
  }
  raw.top = std::move(cur);
  return raw;
}

GridFunction synthesize_raw(const GridSpec& spec, const RawHaar& raw, Exec exec) {
  const int d = spec.d;
  const int nt = (1 << d) - 1;
  std::vector<complex> cur = raw.top;
  for (int j = spec.B; j >= 1 - spec.R; --j) {
    const ScaleLayout parent{spec, j};
    const std::int64_t child_n = 2 * parent.per_axis();
    const auto& detail = raw.detail[static_cast<std::size_t>(j - (1 - spec.R))];
    std::vector<complex> next(parent.count() << d);
    kernels::for_range(parent.count(), exec, [&](std::size_t p) {
      const Coords pc = decode(p, parent.per_axis(), d);
      complex v[1 << kMaxDim];
      v[0] = cur[p];
      for (int i = 1; i <= nt; ++i) v[i] = detail[p * nt + (i - 1)];
      inverse_butterfly(v, d);
      for (int m = 0; m <= nt; ++m) next[child_index(pc, m, child_n, d)] = v[m];
    });
    cur = std::move(next);
  }
  return GridFunction(spec, std::move(cur));
}

std::vector<std::vector<std::uint8_t>> lagom_flags(const GridSpec& spec, int M) {
  std::vector<std::vector<std::uint8_t>> keep;
  for (int j = 1 - spec.R; j <= spec.B; ++j) {
    const ScaleLayout layout{spec, j};
    std::vector<std::uint8_t> flags(layout.count(), 0);
    if (std::abs(j) <= M) {
      for (std::size_t p = 0; p < flags.size(); ++p) flags[p] = is_lagom(layout.cube(p), M) ? 1 : 0;
    }
    keep.push_back(std::move(flags));
  }
  return keep;
}

}  // namespace

std::size_t ScaleLayout::count() const {
  std::size_t n = 1;
  for (int a = 0; a < spec.d; ++a) n *= static_cast<std::size_t>(per_axis());
  return n;
}

bool ScaleLayout::contains(const DyadicCube& c) const {
  if (c.d != spec.d || c.j != j) return false;
  for (int a = 0; a < spec.d; ++a) {
    const std::int64_t x = c.k[a] + offset();
    if (x < 0 || x >= per_axis()) return false;
  }
  return true;
}

std::size_t ScaleLayout::index(const DyadicCube& c) const {
  if (!contains(c)) throw Error(ErrorKind::OutOfRange, c.to_string() + " is not a cube of this grid scale");
  Coords x{};
  for (int a = 0; a < spec.d; ++a) x[a] = c.k[a] + offset();
  return encode(x, per_axis(), spec.d);
}

DyadicCube ScaleLayout::cube(std::size_t index) const {
  const Coords x = decode(index, per_axis(), spec.d);
  DyadicCube c{spec.d, j, {}};
  for (int a = 0; a < spec.d; ++a) c.k[a] = x[a] - offset();
  return c;
}

HaarCoefficients::HaarCoefficients(GridSpec spec) : spec_(spec) {
  spec_.validate();
  for (int j = min_scale(); j <= max_scale(); ++j)
    levels_.emplace_back(ScaleLayout{spec_, j}.count() * static_cast<std::size_t>(types()));
  scaling_.assign(std::size_t(1) << spec_.d, complex{});
}

bool HaarCoefficients::contains(const DyadicCube& c) const {
  return c.j >= min_scale() && c.j <= max_scale() && ScaleLayout{spec_, c.j}.contains(c);
}

std::span<complex> HaarCoefficients::slot(const DyadicCube& c, int type) {
  auto s = std::as_const(*this).slot(c, type);
  return {const_cast<complex*>(s.data()), s.size()};
}

std::span<const complex> HaarCoefficients::slot(const DyadicCube& c, int type) const {
  if (type == 0) {
    if (c.j != spec_.B || !ScaleLayout{spec_, c.j}.contains(c))
      throw Error(ErrorKind::OutOfRange, "scaling coefficients exist only for the top cubes");
    return {scaling_.data() + ScaleLayout{spec_, c.j}.index(c), 1};
  }
  if (type < 0 || type > types()) throw Error(ErrorKind::OutOfRange, "Haar type out of range");
  if (!contains(c)) throw Error(ErrorKind::OutOfRange, c.to_string() + " is outside the coefficient range");
  const std::size_t p = ScaleLayout{spec_, c.j}.index(c);
  const auto& lv = levels_[static_cast<std::size_t>(c.j - min_scale())];
  return {lv.data() + p * static_cast<std::size_t>(types()) + static_cast<std::size_t>(type - 1), 1};
}

complex HaarCoefficients::get(const DyadicCube& c, int type) const { return slot(c, type)[0]; }

void HaarCoefficients::set(const DyadicCube& c, int type, complex v) { slot(c, type)[0] = v; }

std::span<complex> HaarCoefficients::level(int j) {
  if (j < min_scale() || j > max_scale()) throw Error(ErrorKind::OutOfRange, "scale out of range");
  return levels_[static_cast<std::size_t>(j - min_scale())];
}

std::span<const complex> HaarCoefficients::level(int j) const {
  if (j < min_scale() || j > max_scale()) throw Error(ErrorKind::OutOfRange, "scale out of range");
  return levels_[static_cast<std::size_t>(j - min_scale())];
}

std::vector<HaarEntry> HaarCoefficients::entries() const {
  std::vector<HaarEntry> out;
  const auto nt = static_cast<std::size_t>(types());
  for (int j = min_scale(); j <= max_scale(); ++j) {
    const ScaleLayout layout{spec_, j};
    const auto& lv = levels_[static_cast<std::size_t>(j - min_scale())];
    for (std::size_t s = 0; s < lv.size(); ++s) {
      if (lv[s] != complex{}) out.push_back({layout.cube(s / nt), static_cast<int>(s % nt) + 1, lv[s]});
    }
  }
  const ScaleLayout top{spec_, spec_.B};
  for (std::size_t p = 0; p < scaling_.size(); ++p) {
    if (scaling_[p] != complex{}) out.push_back({top.cube(p), 0, scaling_[p]});
  }
  std::sort(out.begin(), out.end(), [](const HaarEntry& a, const HaarEntry& b) {
    if (a.cube.j != b.cube.j) return a.cube.j < b.cube.j;
    if (a.cube.k != b.cube.k) return a.cube.k < b.cube.k;
    return a.type < b.type;
  });
  return out;
}

double HaarCoefficients::energy() const {
  double s = 0.0;
  for (const auto& lv : levels_)
    s += kernels::sum_of(lv.size(), [&](std::size_t i) { return std::norm(lv[i]); }, Exec::Serial);
  for (const auto& v : scaling_) s += std::norm(v);
  return s;
}

HaarCoefficients& HaarCoefficients::operator+=(const HaarCoefficients& o) {
  check_same_spec(spec_, o.spec_);
  for (std::size_t l = 0; l < levels_.size(); ++l)
    for (std::size_t i = 0; i < levels_[l].size(); ++i) levels_[l][i] += o.levels_[l][i];
  for (std::size_t i = 0; i < scaling_.size(); ++i) scaling_[i] += o.scaling_[i];
  return *this;
}

HaarCoefficients& HaarCoefficients::operator*=(complex s) {
  for (auto& lv : levels_)
    for (auto& v : lv) v *= s;
  for (auto& v : scaling_) v *= s;
  return *this;
}

void HaarCoefficients::write_csv(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot open " + path.string());
  out.precision(17);
  out << "j";
  for (int a = 0; a < spec_.d; ++a) out << ",k" << a + 1;
  out << ",i,re,im\n";
  for (const auto& e : entries()) {
    out << e.cube.j;
    for (int a = 0; a < spec_.d; ++a) out << ',' << e.cube.k[a];
    out << ',' << e.type << ',' << e.value.real() << ',' << e.value.imag() << '\n';
  }
  if (!out) throw Error(ErrorKind::Io, "write failed for " + path.string());
}

HaarCoefficients HaarCoefficients::read_csv(const std::filesystem::path& path, const GridSpec& spec) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  HaarCoefficients c(spec);
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream row(line);
    for (std::string f; std::getline(row, f, ',');) fields.push_back(f);
    if (fields.size() != static_cast<std::size_t>(spec.d + 4))
      throw Error(ErrorKind::Parse, "bad coefficient row '" + line + "'");
    try {
      DyadicCube cube{spec.d, std::stoi(fields[0]), {}};
      for (int a = 0; a < spec.d; ++a) cube.k[a] = std::stoll(fields[1 + a]);
      const int type = std::stoi(fields[spec.d + 1]);
      c.set(cube, type, complex(std::stod(fields[spec.d + 2]), std::stod(fields[spec.d + 3])));
    } catch (const std::logic_error&) {
      throw Error(ErrorKind::Parse, "bad coefficient row '" + line + "'");
    }
  }
  return c;
}

HaarCoefficients analyze(const GridFunction& f, Exec exec) {
  const GridSpec& spec = f.spec();
  RawHaar raw = analyze_raw(f, exec);
  HaarCoefficients c(spec);
  for (int j = c.min_scale(); j <= c.max_scale(); ++j) {
    auto lv = c.level(j);
    const auto& src = raw.detail[static_cast<std::size_t>(j - c.min_scale())];
    const double s = sqrt_volume(j, spec.d);
    for (std::size_t i = 0; i < lv.size(); ++i) lv[i] = src[i] * s;
  }
  const double s = sqrt_volume(spec.B, spec.d);
  for (std::size_t i = 0; i < raw.top.size(); ++i) c.scaling()[i] = raw.top[i] * s;
  return c;
}

GridFunction synthesize(const HaarCoefficients& c, Exec exec) {
  const GridSpec& spec = c.spec();
  RawHaar raw;
  for (int j = c.min_scale(); j <= c.max_scale(); ++j) {
    const auto lv = c.level(j);
    const double s = 1.0 / sqrt_volume(j, spec.d);
    std::vector<complex> v(lv.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = lv[i] * s;
    raw.detail.push_back(std::move(v));
  }
  const double s = 1.0 / sqrt_volume(spec.B, spec.d);
  raw.top.resize(c.scaling().size());
  for (std::size_t i = 0; i < raw.top.size(); ++i) raw.top[i] = c.scaling()[i] * s;
  return synthesize_raw(spec, raw, exec);
}

GridFunction haar_function(const GridSpec& spec, const DyadicCube& cube, int type) {
  spec.validate();
  if (cube.d != spec.d) throw Error(ErrorKind::DimensionMismatch, "cube and grid dimension differ");
  if (cube.j < 1 - spec.R || cube.j > spec.B || !ScaleLayout{spec, cube.j}.contains(cube))
    throw Error(ErrorKind::OutOfRange, cube.to_string() + " has no Haar function on this grid");
  if (type < 1 || type >= (1 << spec.d)) throw Error(ErrorKind::OutOfRange, "Haar type out of range");
  GridFunction f(spec);
  const std::int64_t cells = std::int64_t(1) << (cube.j + spec.R);  // cells per cube side
  const std::int64_t off = std::int64_t(1) << (spec.B + spec.R);
  const double amp = 1.0 / sqrt_volume(cube.j, spec.d);
  auto v = f.mutable_values();
  for (std::size_t idx = 0; idx < v.size(); ++idx) {
    const auto c = spec.coords(idx);
    double sign = amp;
    for (int a = 0; a < spec.d && sign != 0.0; ++a) {
      const std::int64_t rel = c[a] - (cube.k[a] * cells + off);
      if (rel < 0 || rel >= cells) sign = 0.0;
      else if (((type >> a) & 1) && rel >= cells / 2) sign = -sign;
    }
    v[idx] = sign;
  }
  return f;
}

std::vector<std::vector<complex>> cube_averages(const GridFunction& f, Exec exec) {
  const GridSpec& spec = f.spec();
  const int d = spec.d;
  const double scale = std::ldexp(1.0, -d);
  std::vector<std::vector<complex>> out;
  out.emplace_back(f.values().begin(), f.values().end());
  for (int j = 1 - spec.R; j <= spec.B; ++j) {
    const ScaleLayout parent{spec, j};
    const std::int64_t child_n = 2 * parent.per_axis();
    const auto& cur = out.back();
    std::vector<complex> next(parent.count());
    kernels::for_range(parent.count(), exec, [&](std::size_t p) {
      const Coords pc = decode(p, parent.per_axis(), d);
      complex s{};
      for (int m = 0; m < (1 << d); ++m) s += cur[child_index(pc, m, child_n, d)];
      next[p] = s * scale;
    });
    out.push_back(std::move(next));
  }
  return out;
}

GridFunction accumulate_down(const GridSpec& spec, const std::vector<std::vector<complex>>& weights,
                             Exec exec) {
  const int d = spec.d;
  if (weights.size() != static_cast<std::size_t>(spec.B + spec.R + 1))
    throw Error(ErrorKind::SpecMismatch, "weights do not cover every grid scale");
  std::vector<complex> acc = weights.back();
  for (int j = spec.B; j >= 1 - spec.R; --j) {
    const ScaleLayout parent{spec, j};
    const std::int64_t child_n = 2 * parent.per_axis();
    const auto& w = weights[static_cast<std::size_t>(j - 1 + spec.R)];
    std::vector<complex> next(w.begin(), w.end());
    kernels::for_range(parent.count(), exec, [&](std::size_t p) {
      const Coords pc = decode(p, parent.per_axis(), d);
      for (int m = 0; m < (1 << d); ++m) next[child_index(pc, m, child_n, d)] += acc[p];
    });
    acc = std::move(next);
  }
  return GridFunction(spec, std::move(acc));
}

LagomProjector::LagomProjector(const GridSpec& spec, int M) : spec_(spec), M_(M) {
  spec_.validate();
  if (M < 1) throw Error(ErrorKind::InvalidArgument, "M must be >= 1");
  if (spec_.B < M)
    throw Error(ErrorKind::BoxTooSmall, "grid box exponent B must be at least M to hold D_M");
  keep_ = lagom_flags(spec_, M);
}

bool LagomProjector::keeps(int j, std::size_t cube_index) const {
  if (j < 1 - spec_.R || j > spec_.B) return false;
  return keep_[static_cast<std::size_t>(j - (1 - spec_.R))][cube_index] != 0;
}

GridFunction LagomProjector::filtered(const GridFunction& f, bool lagom, Exec exec) const {
  check_same_spec(spec_, f.spec());
  RawHaar raw = analyze_raw(f, exec);
  const auto nt = static_cast<std::size_t>((1 << spec_.d) - 1);
  for (std::size_t l = 0; l < raw.detail.size(); ++l) {
    auto& det = raw.detail[l];
    for (std::size_t p = 0; p < keep_[l].size(); ++p) {
      if ((keep_[l][p] != 0) != lagom) std::fill_n(det.begin() + static_cast<std::ptrdiff_t>(p * nt), nt, complex{});
    }
  }
  if (lagom) std::fill(raw.top.begin(), raw.top.end(), complex{});
  return synthesize_raw(spec_, raw, exec);
}

GridFunction LagomProjector::project(const GridFunction& f, Exec exec) const { return filtered(f, true, exec); }

GridFunction LagomProjector::complement(const GridFunction& f, Exec exec) const {
  return filtered(f, false, exec);
}

HaarCoefficients LagomProjector::restrict(const HaarCoefficients& c, bool lagom) const {
  check_same_spec(spec_, c.spec());
  HaarCoefficients out = c;
  const auto nt = static_cast<std::size_t>(c.types());
  for (int j = c.min_scale(); j <= c.max_scale(); ++j) {
    auto lv = out.level(j);
    const auto& flags = keep_[static_cast<std::size_t>(j - c.min_scale())];
    for (std::size_t p = 0; p < flags.size(); ++p) {
      if ((flags[p] != 0) != lagom) std::fill_n(lv.begin() + static_cast<std::ptrdiff_t>(p * nt), nt, complex{});
    }
  }
  if (lagom) std::fill(out.scaling().begin(), out.scaling().end(), complex{});
  return out;
}

GridFunction project_lagom(const GridFunction& f, int M, Exec exec) {
  return LagomProjector(f.spec(), M).project(f, exec);
}

GridFunction project_lagom_complement(const GridFunction& f, int M, Exec exec) {
  return LagomProjector(f.spec(), M).complement(f, exec);
}

double cmo_defect(const HaarCoefficients& c, int M, std::span<const Cube> omegas) {
  if (omegas.empty()) throw Error(ErrorKind::EmptyFamily, "cmo_defect needs at least one set");
  std::vector<HaarEntry> tail;
  for (const auto& e : c.entries())
    if (e.type != 0 && !is_lagom(e.cube, M)) tail.push_back(e);
  double best = 0.0;
  for (const Cube& omega : omegas) {
    if (omega.d != c.spec().d) throw Error(ErrorKind::DimensionMismatch, "set and grid dimension differ");
    double s = 0.0;
    for (const auto& e : tail) {
      bool inside = true;
      for (int a = 0; a < omega.d && inside; ++a) {
        inside = omega.lower(a) <= e.cube.lower(a) &&
                 e.cube.lower(a) + e.cube.side() <= omega.upper(a);
      }
      if (inside) s += std::norm(e.value);
    }
    best = std::max(best, std::sqrt(s / omega.volume().to_double()));
  }
  return best;
}

namespace {

// max over dyadic Omega of (|Omega|^-1 sum_{I in Omega, not kept} |c_I|^2)^{1/2};
// every coefficient counts when flags is null.
double box_energy_sup(const HaarCoefficients& c, const std::vector<std::vector<std::uint8_t>>* flags) {
  const GridSpec& spec = c.spec();
  const auto nt = static_cast<std::size_t>(c.types());
  const int d = spec.d;
  std::vector<double> below;  // tail energy inside each cube of the previous (finer) scale
  double best = 0.0;
  for (int j = c.min_scale(); j <= c.max_scale(); ++j) {
    const ScaleLayout layout{spec, j};
    const auto lv = c.level(j);
    const auto* fl = flags ? &(*flags)[static_cast<std::size_t>(j - c.min_scale())] : nullptr;
    std::vector<double> tot(layout.count(), 0.0);
    for (std::size_t p = 0; p < tot.size(); ++p) {
      double s = 0.0;
      if (!fl || !(*fl)[p])
        for (std::size_t i = 0; i < nt; ++i) s += std::norm(lv[p * nt + i]);
      if (!below.empty()) {
        const Coords pc = decode(p, layout.per_axis(), d);
        for (int m = 0; m < (1 << d); ++m) s += below[child_index(pc, m, 2 * layout.per_axis(), d)];
      }
      tot[p] = s;
      best = std::max(best, std::sqrt(s * std::ldexp(1.0, -j * d)));
    }
    below = std::move(tot);
  }
  return best;
}

}  // namespace

double cmo_defect(const HaarCoefficients& c, int M) {
  const auto flags = lagom_flags(c.spec(), M);
  return box_energy_sup(c, &flags);
}

double carleson_constant(const HaarCoefficients& c) { return box_energy_sup(c, nullptr); }

}  // namespace lagom
