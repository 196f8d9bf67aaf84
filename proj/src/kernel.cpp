#include "lagom/kernel.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <random>
#include <sstream>

#include "lagom/error.hpp"

namespace lagom {

namespace {

double inf_norm(const Point& v, int d) {
  double m = 0.0;
  for (int a = 0; a < d; ++a) m = std::max(m, std::abs(v[a]));
  return m;
}

// Uniform [0,1) from the top 53 bits, identical on every platform.
double unit(std::mt19937_64& gen) { return double(gen() >> 11) * 0x1.0p-53; }

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t{}");
  const auto e = s.find_last_not_of(" \t{}");
  return b == std::string_view::npos ? std::string() : std::string(s.substr(b, e - b + 1));
}

}  // namespace

double AdmissibleFunction::operator()(double x) const {
  switch (family) {
    case AdmissibleFamily::PowerDecay: return std::pow(1.0 + x, -gamma);
    case AdmissibleFamily::PowerGrowthCap: {
      const double p = std::pow(x, gamma);
      return std::isinf(p) ? 1.0 : p / (1.0 + p);
    }
    case AdmissibleFamily::Constant: return 1.0;
  }
  return 1.0;
}

std::string AdmissibleFunction::to_string() const {
  std::ostringstream out;
  out.precision(17);
  switch (family) {
    case AdmissibleFamily::PowerDecay: out << "power-decay:" << gamma; break;
    case AdmissibleFamily::PowerGrowthCap: out << "power-growth-cap:" << gamma; break;
    case AdmissibleFamily::Constant: out << "constant"; break;
  }
  return out.str();
}

AdmissibleFunction AdmissibleFunction::parse(std::string_view text) {
  const std::string t = trim(text);
  const auto sep = t.find_first_of(":,");
  const std::string family = trim(t.substr(0, sep));
  double gamma = 1.0;
  if (sep != std::string::npos) {
    try {
      gamma = std::stod(trim(t.substr(sep + 1)));
    } catch (const std::logic_error&) {
      throw Error(ErrorKind::Parse, "bad admissible function '" + t + "'");
    }
    if (!(gamma > 0.0)) throw Error(ErrorKind::Parse, "admissible exponent must be positive");
  }
  if (family == "power-decay") return power_decay(gamma);
  if (family == "power-growth-cap") return power_growth_cap(gamma);
  if (family == "constant" || family == "constant-1") return constant();
  throw Error(ErrorKind::Parse, "unknown admissible family '" + family + "'");
}

AdmissibleReport check_admissible(const AdmissibleTriple& t) {
  AdmissibleReport r;
  for (int k = -40; k <= 40; ++k) {
    const double x = std::ldexp(1.0, k);
    for (const auto* f : {&t.L, &t.S, &t.D}) {
      const double v = (*f)(x);
      if (!std::isfinite(v)) throw Error(ErrorKind::NonFinite, f->to_string() + " is not finite at 2^" + std::to_string(k));
      r.bound = std::max(r.bound, v);
    }
  }
  r.L_tail = t.L(std::ldexp(1.0, 40));
  r.S_tail = t.S(std::ldexp(1.0, -40));
  r.D_tail = t.D(std::ldexp(1.0, 40));
  r.L_ok = r.L_tail < kAdmissibleTailTolerance;
  r.S_ok = r.S_tail < kAdmissibleTailTolerance;
  r.D_ok = r.D_tail < kAdmissibleTailTolerance;
  return r;
}

double CompactCZKernel::F(const Point& t, const Point& x) const {
  Point diff{}, sum{};
  for (int a = 0; a < d; ++a) {
    diff[a] = t[a] - x[a];
    sum[a] = t[a] + x[a];
  }
  const double r = inf_norm(diff, d);
  return triple.L(r) * triple.S(r) * triple.D(inf_norm(sum, d));
}

AdmissibleTriple default_triple() {
  return {AdmissibleFunction::power_decay(0.5), AdmissibleFunction::power_growth_cap(0.25),
          AdmissibleFunction::power_decay(0.5)};
}

CompactCZKernel make_kernel(std::string_view name, const std::optional<AdmissibleTriple>& triple,
                            std::optional<double> delta) {
  CompactCZKernel k;
  k.name = std::string(name);
  k.antisymmetric = true;
  if (name == "compact-1d") {
    k.d = 1;
    k.delta = 0.25;
    k.triple = triple.value_or(default_triple());
    const AdmissibleTriple tr = k.triple;
    k.diff_factor = [tr](double s) { return s == 0.0 ? 0.0 : tr.L(std::abs(s)) * tr.S(std::abs(s)) / s; };
    k.sum_factor = [tr](double s) { return tr.D(std::abs(s)); };
    k.eval = [tr](const Point& t, const Point& x) {
      const double s = t[0] - x[0];
      return s == 0.0 ? 0.0 : tr.L(std::abs(s)) * tr.S(std::abs(s)) * tr.D(std::abs(t[0] + x[0])) / s;
    };
  } else if (name == "control-1d") {
    k.d = 1;
    k.delta = 0.5;
    k.standard_only = true;
    if (triple) throw Error(ErrorKind::InvalidArgument, "control-1d has F == 1 and takes no triple");
    k.diff_factor = [](double s) { return s == 0.0 ? 0.0 : 1.0 / s; };
    k.eval = [](const Point& t, const Point& x) {
      const double s = t[0] - x[0];
      return s == 0.0 ? 0.0 : 1.0 / s;
    };
  } else if (name == "compact-2d") {
    k.d = 2;
    k.delta = 0.25;
    k.triple = triple.value_or(default_triple());
    const AdmissibleTriple tr = k.triple;
    k.eval = [tr](const Point& t, const Point& x) {
      const double u = t[0] - x[0], v = t[1] - x[1];
      const double r2 = u * u + v * v;
      if (r2 == 0.0) return 0.0;
      const double r = std::max(std::abs(u), std::abs(v));
      const double s = std::max(std::abs(t[0] + x[0]), std::abs(t[1] + x[1]));
      return tr.L(r) * tr.S(r) * tr.D(s) * u / (r2 * std::sqrt(r2));
    };
  } else {
    throw Error(ErrorKind::InvalidArgument, "unknown kernel '" + std::string(name) + "'");
  }
  if (delta) {
    if (!(*delta > 0.0 && *delta < 1.0)) throw Error(ErrorKind::InvalidArgument, "delta must lie in (0,1)");
    k.delta = *delta;
  }
  return k;
}

std::vector<CompactCZKernel> builtin_kernels() {
  return {make_kernel("compact-1d"), make_kernel("control-1d"), make_kernel("compact-2d")};
}

namespace {

// One quadruple (t, x, t', x') per point u of [0,1]^(4d+9): centre p, scale
// s = |t - x|_inf in [2^-6, 2^6], direction, perturbation size eta < s/2 split
// between t and x. Returns the smoothness ratio, or -1 when undefined.
double smoothness_ratio(const CompactCZKernel& k, std::span<const double> u) {
  const int d = k.d;
  std::size_t c = 0;
  auto next = [&] { return u[c++]; };
  auto direction = [&] {
    Point v{};
    const int axis = std::min(d - 1, static_cast<int>(next() * d));
    for (int a = 0; a < d; ++a) v[a] = 2.0 * next() - 1.0;
    v[axis] = next() < 0.5 ? -1.0 : 1.0;
    return v;
  };
  Point p{}, t{}, x{}, t2{}, x2{};
  for (int a = 0; a < d; ++a) p[a] = 128.0 * next() - 64.0;
  const double s = std::exp2(12.0 * next() - 6.0);
  const Point v = direction();
  for (int a = 0; a < d; ++a) {
    t[a] = p[a] + 0.5 * s * v[a];
    x[a] = p[a] - 0.5 * s * v[a];
  }
  const double eta = 0.49 * s * std::exp2(-10.0 * next());
  const double share = next();
  const Point vt = direction(), vx = direction();
  for (int a = 0; a < d; ++a) {
    t2[a] = t[a] + share * eta * vt[a];
    x2[a] = x[a] + (1.0 - share) * eta * vx[a];
  }
  Point dt{}, dx{}, dd{};
  for (int a = 0; a < d; ++a) {
    dt[a] = t[a] - t2[a];
    dx[a] = x[a] - x2[a];
    dd[a] = t[a] - x[a];
  }
  const double pert = inf_norm(dt, d) + inf_norm(dx, d);
  const double sep = inf_norm(dd, d);
  if (!(2.0 * pert < sep)) throw Error(ErrorKind::InvalidArgument, "smoothness sample violates the separation constraint");
  if (pert == 0.0) return -1.0;
  const double rhs = std::pow(pert, k.delta) / std::pow(sep, d + k.delta) * k.F(t, x);
  if (!(rhs > 0.0)) return -1.0;
  return std::abs(k(t, x) - k(t2, x2)) / rhs;
}

}  // namespace

SmoothnessReport check_smoothness(const CompactCZKernel& k, std::size_t n_samples, std::uint64_t seed) {
  if (n_samples < 1000) throw Error(ErrorKind::InvalidArgument, "smoothness check needs at least 1000 samples");
  std::mt19937_64 gen(seed);
  const std::size_t dim = static_cast<std::size_t>(4 * k.d + 9);
  constexpr std::size_t kKeep = 32;
  std::vector<std::pair<double, std::vector<double>>> best;  // ascending by ratio
  std::vector<double> u(dim);
  SmoothnessReport rep;
  rep.samples = n_samples;
  for (std::size_t n = 0; n < n_samples; ++n) {
    for (auto& x : u) x = unit(gen);
    const double r = smoothness_ratio(k, u);
    if (best.size() < kKeep || r > best.front().first) {
      if (best.size() == kKeep) best.erase(best.begin());
      best.emplace_back(r, u);
      std::sort(best.begin(), best.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    }
  }
  // Pattern search from the best samples; every trial point is again an
  // admissible quadruple, so the result stays a max over valid samples.
  for (auto& [r, v] : best) {
    double step = 1.0 / 16;
    for (int iter = 0; iter < 4000 && step > 1e-7; ++iter) {
      bool improved = false;
      for (std::size_t i = 0; i < dim; ++i)
        for (double sgn : {1.0, -1.0}) {
          const double old = v[i];
          v[i] = std::clamp(old + sgn * step, 0.0, std::nextafter(1.0, 0.0));
          const double trial = smoothness_ratio(k, v);
          if (trial > r) {
            r = trial;
            improved = true;
          } else {
            v[i] = old;
          }
        }
      if (!improved) step *= 0.5;
    }
    rep.constant = std::max(rep.constant, r);
  }
  return rep;
}

double F_single(const Cube& cube, int M, const AdmissibleTriple& kernel, const AdmissibleTriple& weak) {
  if (M < 1) throw Error(ErrorKind::InvalidArgument, "M must be >= 1");
  const double l = cube.side.to_double();
  const double r_unit = rdist(cube, centered_ball(cube.d, Dyadic(1))).to_double();
  const double r_big = rdist(cube, centered_ball(cube.d, Dyadic::pow2(M))).to_double();
  return kernel.L(l) * kernel.S(l) * kernel.D(r_unit) +
         weak.L(std::ldexp(l, -M)) * weak.S(std::ldexp(l, M)) * weak.D(r_big / M);
}

double F_six(std::span<const Cube> cubes, int M, const AdmissibleTriple& kernel, const AdmissibleTriple& weak) {
  if (M < 1) throw Error(ErrorKind::InvalidArgument, "M must be >= 1");
  if (cubes.empty()) throw Error(ErrorKind::EmptyFamily, "F needs at least one cube");
  double kl = 0, ks = 0, kd = 0, wl = 0, ws = 0, wd = 0;
  for (const Cube& c : cubes) {
    const double l = c.side.to_double();
    const double r = rdist(c, centered_ball(c.d, Dyadic(1))).to_double();
    kl += kernel.L(l);
    ks += kernel.S(l);
    kd += kernel.D(r);
    wl += weak.L(std::ldexp(l, -M));
    ws += weak.S(std::ldexp(l, M));
    wd += weak.D(r / M);
  }
  return kl * ks * kd + wl * ws * wd;
}

std::vector<DyadicCube> escape_family(int M, int d) {
  if (M < 1) throw Error(ErrorKind::InvalidArgument, "M must be >= 1");
  std::vector<DyadicCube> out;
  for (int s = 1; s <= 4; ++s) out.push_back({d, M + s, {}});
  for (int s = 1; s <= 4; ++s) out.push_back({d, -M - s, {}});
  for (int s = 1; s <= 4; ++s) {
    DyadicCube c{d, 0, {}};
    c.k[0] = std::int64_t(M + s) << M;
    out.push_back(c);
  }
  return out;
}

double F_six_escape_sup(int M, const AdmissibleTriple& kernel, const AdmissibleTriple& weak, int weak_M) {
  double best = 0.0;
  for (const auto& dc : escape_family(M, 1)) {
    const Cube c = dc.to_cube();
    const std::array<Cube, 6> six{c, c, c, c, c, c};
    best = std::max(best, F_six(six, weak_M, kernel, weak));
  }
  return best;
}

std::string DiagonalRule::to_string() const {
  return policy == DiagonalPolicy::Zero ? "zero" : "exclude-ring:" + std::to_string(ring);
}

DiscretizedOperator::DiscretizedOperator(const CompactCZKernel& kernel, const GridSpec& spec, DiagonalRule rule,
                                         Exec exec)
    : spec_(spec), name_(kernel.name), rule_(rule), exec_(exec) {
  spec_.validate();
  if (kernel.d != spec.d) throw Error(ErrorKind::DimensionMismatch, "kernel and grid dimension differ");
  if (rule.policy == DiagonalPolicy::Zero) rule_.ring = 0;
  if (rule_.ring < 0) throw Error(ErrorKind::InvalidArgument, "exclusion ring must be >= 0");
  if (!kernel.antisymmetric && rule.policy == DiagonalPolicy::Zero)
    throw Error(ErrorKind::InvalidArgument, "kernels without antisymmetry must declare an exclusion ring");
  n_ = spec_.cell_count();
  const double h = spec_.h();
  const std::int64_t ring = rule_.ring;

  if (kernel.separable() && spec_.d == 1) {
    const std::size_t m = 2 * n_ - 1;
    g_.resize(m);
    kernels::for_range(m, exec, [&](std::size_t k) {
      const std::int64_t off = static_cast<std::int64_t>(k) - static_cast<std::int64_t>(n_ - 1);
      g_[k] = std::abs(off) <= ring ? 0.0 : kernel.diff_factor(double(off) * h);
    });
    g_adj_.assign(g_.rbegin(), g_.rend());
    if (kernel.sum_factor) {
      storage_ = Storage::ToeplitzHankel;
      w_.resize(m);
      const double lower = -std::ldexp(1.0, spec_.B);
      kernels::for_range(m, exec, [&](std::size_t k) { w_[k] = kernel.sum_factor(2.0 * lower + double(k + 1) * h); });
    } else {
      storage_ = Storage::ToeplitzFft;
      fft_ = std::make_shared<kernels::ToeplitzFft>(g_);
      fft_adj_ = std::make_shared<kernels::ToeplitzFft>(g_adj_);
    }
    return;
  }

  if (n_ > kDenseEntryLimit / n_)
    throw Error(ErrorKind::MemoryGuard, "dense operator table exceeds 2^26 entries");
  storage_ = Storage::Dense;
  dense_.assign(n_ * n_, 0.0);
  kernels::for_range(n_, exec, [&](std::size_t i) {
    const auto ci = spec_.coords(i);
    Point x{};
    for (int a = 0; a < spec_.d; ++a) x[a] = spec_.center(ci[a]);
    for (std::size_t j = 0; j < n_; ++j) {
      const auto cj = spec_.coords(j);
      std::int64_t gap = 0;
      Point t{};
      for (int a = 0; a < spec_.d; ++a) {
        t[a] = spec_.center(cj[a]);
        gap = std::max(gap, std::abs(cj[a] - ci[a]));
      }
      dense_[i * n_ + j] = gap <= ring ? 0.0 : kernel(t, x);
    }
  });
}

double DiscretizedOperator::entry(std::size_t i, std::size_t j) const {
  switch (storage_) {
    case Storage::Dense: return dense_[i * n_ + j];
    case Storage::ToeplitzHankel: return g_[j + n_ - 1 - i] * w_[i + j];
    case Storage::ToeplitzFft: return g_[j + n_ - 1 - i];
  }
  return 0.0;
}

void DiscretizedOperator::apply_real(std::span<const double> x, std::span<double> y, bool adjoint) const {
  switch (storage_) {
    case Storage::Dense:
      if (adjoint) kernels::matvec_dense_transposed(dense_, x, y, exec_);
      else kernels::matvec_dense(dense_, x, y, exec_);
      break;
    case Storage::ToeplitzHankel:
      kernels::matvec_toeplitz_hankel(adjoint ? g_adj_ : g_, w_, x, y, exec_);
      break;
    case Storage::ToeplitzFft:
      (adjoint ? fft_adj_ : fft_)->apply(x, y);
      break;
  }
}

namespace {

GridFunction apply_parts(const GridSpec& spec, const GridFunction& f,
                         const std::function<void(std::span<const double>, std::span<double>)>& op) {
  const std::size_t n = f.size();
  const double vol = spec.cell_volume();
  std::vector<double> re = f.real_part(), out_re(n, 0.0), out_im(n, 0.0);
  op(re, out_re);
  if (!f.is_real()) {
    std::vector<double> im = f.imag_part();
    op(im, out_im);
  }
  std::vector<complex> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = complex(out_re[i] * vol, out_im[i] * vol);
  return GridFunction(spec, std::move(v));
}

}  // namespace

GridFunction DiscretizedOperator::apply(const GridFunction& f) const {
  check_same_spec(spec_, f.spec());
  return apply_parts(spec_, f, [this](auto x, auto y) { apply_real(x, y, false); });
}

GridFunction DiscretizedOperator::apply_adjoint(const GridFunction& f) const {
  check_same_spec(spec_, f.spec());
  return apply_parts(spec_, f, [this](auto x, auto y) { apply_real(x, y, true); });
}

DiscretizedOperator DiscretizedOperator::transpose() const {
  DiscretizedOperator t = *this;
  t.name_ = name_ + "^T";
  std::swap(t.g_, t.g_adj_);
  std::swap(t.fft_, t.fft_adj_);
  if (storage_ == Storage::Dense) {
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j) t.dense_[j * n_ + i] = dense_[i * n_ + j];
  }
  return t;
}

void DiscretizedOperator::write_table(const std::filesystem::path& path) const {
  if (n_ > kDenseEntryLimit / n_) throw Error(ErrorKind::MemoryGuard, "operator table too large to export");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot open " + path.string());
  static_assert(std::endian::native == std::endian::little, "table export assumes a little-endian host");
  const std::int32_t header[3] = {spec_.d, spec_.B, spec_.R};
  out.write(reinterpret_cast<const char*>(header), sizeof(header));
  std::vector<double> row(n_);
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = 0; j < n_; ++j) row[j] = entry(i, j);
    out.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(n_ * sizeof(double)));
  }
  if (!out) throw Error(ErrorKind::Io, "write failed for " + path.string());
}

double weak_compactness_scan(const GridOperator& op, int M, int order) {
  const GridSpec& spec = op.spec();
  const Dyadic edge = Dyadic::pow2(spec.B);
  const BumpProfile poly{ProfileKind::Polydecay, order, 2.0};
  const BumpProfile zero{ProfileKind::MeanZeroPolydecay, order, 2.0};
  double best = 0.0;
  bool any = false;
  for (const auto& dc : escape_family(M, spec.d)) {
    if (dc.j < 2 - spec.R) continue;
    const Cube c = dc.to_cube();
    bool inside = true;
    for (int a = 0; a < spec.d && inside; ++a) inside = c.lower(a) >= -edge && c.upper(a) <= edge;
    if (!inside) continue;
    any = true;
    const GridFunction phi = make_bump(c, poly, spec);
    const GridFunction psi = make_bump(c, zero, spec);
    best = std::max(best, std::abs(pairing(op, phi, psi)));
  }
  if (!any) throw Error(ErrorKind::BoxTooSmall, "no escape cube fits the grid");
  return best;
}

}  // namespace lagom
