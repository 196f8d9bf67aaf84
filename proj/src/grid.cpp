#include "lagom/grid.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include "lagom/error.hpp"

namespace lagom {

namespace {

template <typename T>
void put_le(std::ostream& out, T v) {
  char bytes[sizeof(T)];
  std::memcpy(bytes, &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  out.write(bytes, sizeof(T));
}

template <typename T>
T get_le(std::istream& in) {
  char bytes[sizeof(T)];
  if (!in.read(bytes, sizeof(T))) throw Error(ErrorKind::Io, "truncated binary grid file");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  T v;
  std::memcpy(&v, bytes, sizeof(T));
  return v;
}

}  // namespace

std::size_t GridSpec::cell_count() const {
  std::size_t n = 1;
  for (int i = 0; i < d; ++i) n *= static_cast<std::size_t>(per_axis());
  return n;
}

void GridSpec::validate() const {
  if (d < 1 || d > kMaxDim) throw Error(ErrorKind::InvalidArgument, "grid dimension must be 1..3");
  if (B < 0 || R < 0) throw Error(ErrorKind::InvalidArgument, "grid exponents must be >= 0");
  if ((B + R + 1) * d >= 28)
    throw Error(ErrorKind::MemoryGuard, "grid cell count must stay below 2^28");
}

std::array<std::int64_t, kMaxDim> GridSpec::coords(std::size_t index) const {
  std::array<std::int64_t, kMaxDim> c{};
  const auto n = static_cast<std::size_t>(per_axis());
  for (int i = 0; i < d; ++i) {
    c[i] = static_cast<std::int64_t>(index % n);
    index /= n;
  }
  return c;
}

std::size_t GridSpec::index(const std::array<std::int64_t, kMaxDim>& c) const {
  const auto n = static_cast<std::size_t>(per_axis());
  std::size_t idx = 0;
  for (int i = d - 1; i >= 0; --i) idx = idx * n + static_cast<std::size_t>(c[i]);
  return idx;
}

Dyadic GridSpec::center_exact(std::int64_t coord) const {
  return box_lower() + Dyadic(2 * coord + 1, -R - 1);
}

GridFunction::GridFunction(GridSpec spec) : spec_(spec) {
  spec_.validate();
  values_.assign(spec_.cell_count(), complex{});
}

GridFunction::GridFunction(GridSpec spec, std::vector<complex> values)
    : spec_(spec), values_(std::move(values)) {
  spec_.validate();
  if (values_.size() != spec_.cell_count())
    throw Error(ErrorKind::SpecMismatch, "value count does not match grid");
  for (const auto& v : values_) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw Error(ErrorKind::NonFinite, "grid function values must be finite");
  }
}

GridFunction& GridFunction::operator+=(const GridFunction& o) {
  check_same_spec(spec_, o.spec_);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
  return *this;
}

GridFunction& GridFunction::operator-=(const GridFunction& o) {
  check_same_spec(spec_, o.spec_);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
  return *this;
}

GridFunction& GridFunction::operator*=(complex s) {
  for (auto& v : values_) v *= s;
  return *this;
}

std::vector<double> GridFunction::real_part() const {
  std::vector<double> r(values_.size());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = values_[i].real();
  return r;
}

std::vector<double> GridFunction::imag_part() const {
  std::vector<double> r(values_.size());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = values_[i].imag();
  return r;
}

bool GridFunction::is_real() const {
  return std::all_of(values_.begin(), values_.end(), [](const complex& v) { return v.imag() == 0.0; });
}

void check_same_spec(const GridSpec& a, const GridSpec& b) {
  if (!(a == b)) throw Error(ErrorKind::SpecMismatch, "grid functions live on different grids");
}

GridFunction indicator(const Cube& cube, const GridSpec& spec) {
  if (cube.d != spec.d) throw Error(ErrorKind::DimensionMismatch, "cube and grid dimension differ");
  GridFunction f(spec);
  const Dyadic h = spec.cell_side();
  std::array<std::int64_t, kMaxDim> lo{}, hi{};
  for (int i = 0; i < spec.d; ++i) {
    const Dyadic a = (cube.lower(i) - spec.box_lower()).scaled(spec.R);
    const Dyadic b = (cube.upper(i) - spec.box_lower()).scaled(spec.R);
    if (!a.is_integer() || !b.is_integer())
      throw Error(ErrorKind::UnalignedCube, cube.to_string() + " is not aligned to cells of side " +
                                                h.to_string());
    lo[i] = std::clamp<std::int64_t>(a.to_integer(), 0, spec.per_axis());
    hi[i] = std::clamp<std::int64_t>(b.to_integer(), 0, spec.per_axis());
    if (lo[i] >= hi[i]) return f;
  }
  auto v = f.mutable_values();
  for (std::size_t idx = 0; idx < v.size(); ++idx) {
    const auto c = spec.coords(idx);
    bool inside = true;
    for (int i = 0; i < spec.d && inside; ++i) inside = c[i] >= lo[i] && c[i] < hi[i];
    if (inside) v[idx] = 1.0;
  }
  return f;
}

complex inner_product(const GridFunction& f, const GridFunction& g, Exec exec) {
  check_same_spec(f.spec(), g.spec());
  const auto a = f.values();
  const auto b = g.values();
  const double re = kernels::sum_of(
      a.size(), [&](std::size_t i) { return a[i].real() * b[i].real() + a[i].imag() * b[i].imag(); },
      exec);
  const double im = kernels::sum_of(
      a.size(), [&](std::size_t i) { return a[i].imag() * b[i].real() - a[i].real() * b[i].imag(); },
      exec);
  return complex(re, im) * f.spec().cell_volume();
}

complex integral(const GridFunction& f, Exec exec) {
  const auto a = f.values();
  const double re = kernels::sum_of(a.size(), [&](std::size_t i) { return a[i].real(); }, exec);
  const double im = kernels::sum_of(a.size(), [&](std::size_t i) { return a[i].imag(); }, exec);
  return complex(re, im) * f.spec().cell_volume();
}

double lp_norm(const GridFunction& f, double p, Exec exec) {
  if (!(p >= 1.0)) throw Error(ErrorKind::InvalidArgument, "p must be >= 1");
  const auto a = f.values();
  if (std::isinf(p)) {
    double m = 0.0;
    for (const auto& v : a) m = std::max(m, std::abs(v));
    return m;
  }
  if (p == 1.0)
    return kernels::sum_of(a.size(), [&](std::size_t i) { return std::abs(a[i]); }, exec) *
           f.spec().cell_volume();
  if (p == 2.0)
    return std::sqrt(kernels::sum_of(a.size(), [&](std::size_t i) { return std::norm(a[i]); }, exec) *
                     f.spec().cell_volume());
  const double s =
      kernels::sum_of(a.size(), [&](std::size_t i) { return std::pow(std::abs(a[i]), p); }, exec);
  return std::pow(s * f.spec().cell_volume(), 1.0 / p);
}

double distribution_function(const GridFunction& f, double lambda) {
  std::size_t count = 0;
  for (const auto& v : f.values()) count += std::abs(v) > lambda;
  return double(count) * f.spec().cell_volume();
}

double weak_l1_quasinorm(const GridFunction& f) {
  std::vector<double> mags;
  mags.reserve(f.size());
  for (const auto& v : f.values()) {
    const double a = std::abs(v);
    if (a > 0.0) mags.push_back(a);
  }
  std::sort(mags.begin(), mags.end(), std::greater<>());
  // just below level v the set {|f| > lambda} holds every cell with |f| >= v
  double best = 0.0;
  for (std::size_t i = 0; i < mags.size(); ++i) {
    if (i + 1 < mags.size() && mags[i + 1] == mags[i]) continue;
    best = std::max(best, mags[i] * double(i + 1));
  }
  return best * f.spec().cell_volume();
}

GridFunction translate_cells(const GridFunction& f, const std::array<std::int64_t, kMaxDim>& shift) {
  const auto& spec = f.spec();
  GridFunction out(spec);
  auto v = out.mutable_values();
  for (std::size_t idx = 0; idx < f.size(); ++idx) {
    auto c = spec.coords(idx);
    bool inside = true;
    for (int i = 0; i < spec.d; ++i) {
      c[i] += shift[i];
      inside = inside && c[i] >= 0 && c[i] < spec.per_axis();
    }
    if (inside) v[spec.index(c)] = f[idx];
  }
  return out;
}

void write_binary(const std::filesystem::path& path, const GridFunction& f) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot open " + path.string());
  put_le<std::int32_t>(out, f.spec().d);
  put_le<std::int32_t>(out, f.spec().B);
  put_le<std::int32_t>(out, f.spec().R);
  for (const auto& v : f.values()) {
    put_le<double>(out, v.real());
    put_le<double>(out, v.imag());
  }
  if (!out) throw Error(ErrorKind::Io, "write failed for " + path.string());
}

GridFunction read_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  GridSpec spec;
  spec.d = get_le<std::int32_t>(in);
  spec.B = get_le<std::int32_t>(in);
  spec.R = get_le<std::int32_t>(in);
  spec.validate();
  std::vector<complex> values(spec.cell_count());
  for (auto& v : values) {
    const double re = get_le<double>(in);
    const double im = get_le<double>(in);
    v = complex(re, im);
  }
  return GridFunction(spec, std::move(values));
}

void write_csv(const std::filesystem::path& path, const GridFunction& f) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot open " + path.string());
  out.precision(17);
  out << "cell,re,im\n";
  for (std::size_t i = 0; i < f.size(); ++i) out << i << ',' << f[i].real() << ',' << f[i].imag() << '\n';
  if (!out) throw Error(ErrorKind::Io, "write failed for " + path.string());
}

GridFunction read_csv(const std::filesystem::path& path, const GridSpec& spec) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  GridFunction f(spec);
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::size_t idx = 0;
    double re = 0, im = 0;
    char c1 = 0, c2 = 0;
    if (!(row >> idx >> c1 >> re >> c2 >> im) || c1 != ',' || c2 != ',' || idx >= f.size())
      throw Error(ErrorKind::Parse, "bad grid csv row '" + line + "'");
    f[idx] = complex(re, im);
  }
  return f;
}

}  // namespace lagom
