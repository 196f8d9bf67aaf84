#include "lagom/bump.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/tools/minima.hpp>

#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

#include "lagom/error.hpp"
#include "lagom/haar.hpp"

namespace lagom {

namespace {

constexpr double kShift = 0.25;

// n-th derivative (n <= 2) of (1 + u^2)^{-N/2}.
double rho(double u, int N, int n) {
  const double q = 1.0 + u * u;
  const double h = -0.5 * N;
  switch (n) {
    case 0: return std::pow(q, h);
    case 1: return 2.0 * h * u * std::pow(q, h - 1.0);
    case 2: return 2.0 * h * std::pow(q, h - 1.0) + 4.0 * h * (h - 1.0) * u * u * std::pow(q, h - 2.0);
    default: throw Error(ErrorKind::MissingDerivative, "derivatives above second order are not provided");
  }
}

double sigma(double u, int N, int n) { return rho(u + kShift, N, n) - rho(u - kShift, N, n); }

// L^p norm of the one-dimensional polydecay factor.
double rho_norm(int N, double p) {
  if (std::isinf(p)) return 1.0;
  const double a = N * p;
  if (a <= 1.0) throw Error(ErrorKind::InvalidArgument, "profile order too small for L^p normalization");
  const double integral =
      std::sqrt(std::numbers::pi) * std::exp(boost::math::lgamma((a - 1.0) / 2.0) - boost::math::lgamma(a / 2.0));
  return std::pow(integral, 1.0 / p);
}

// L^p norm of the mean-zero factor; it is odd, so twice the half line.
double sigma_norm(int N, double p) {
  if (std::isinf(p)) {
    const auto r = boost::math::tools::brent_find_minima(
        [N](double u) { return sigma(u, N, 0); }, 0.0, 4.0, std::numeric_limits<double>::digits / 2);
    return std::abs(sigma(r.first, N, 0));
  }
  boost::math::quadrature::exp_sinh<double> integrator;
  const double half = integrator.integrate([N, p](double u) { return std::pow(std::abs(sigma(u, N, 0)), p); });
  return std::pow(2.0 * half, 1.0 / p);
}

}  // namespace

std::string BumpProfile::name() const {
  return kind == ProfileKind::Polydecay ? "polydecay" : "meanzero-polydecay";
}

ProfileKind BumpProfile::parse_kind(std::string_view text) {
  if (text == "polydecay") return ProfileKind::Polydecay;
  if (text == "meanzero-polydecay") return ProfileKind::MeanZeroPolydecay;
  throw Error(ErrorKind::Parse, "unknown bump profile '" + std::string(text) + "'");
}

Bump::Bump(const Cube& cube, const BumpProfile& profile) : cube_(cube), profile_(profile) {
  if (profile.order < 1) throw Error(ErrorKind::InvalidArgument, "bump order must be >= 1");
  if (!(profile.p > 0.0)) throw Error(ErrorKind::InvalidArgument, "bump exponent must be positive");
  side_ = cube.side.to_double();
  for (int a = 0; a < cube.d; ++a) center_[a] = cube.center[a].to_double();
  const double rn = rho_norm(profile.order, profile.p);
  double norm = std::pow(rn, cube.d);
  if (profile.kind == ProfileKind::MeanZeroPolydecay)
    norm = norm / rn * sigma_norm(profile.order, profile.p);
  const double volume = std::pow(side_, cube.d);
  amplitude_ = (std::isinf(profile.p) ? 1.0 : std::pow(volume, -1.0 / profile.p)) / norm;
}

double Bump::derivative(const Point& x, const MultiIndex& alpha) const {
  double v = amplitude_;
  for (int a = 0; a < cube_.d; ++a) {
    const double u = (x[a] - center_[a]) / side_;
    const bool odd_axis = a == 0 && profile_.kind == ProfileKind::MeanZeroPolydecay;
    v *= odd_axis ? sigma(u, profile_.order, alpha[a]) : rho(u, profile_.order, alpha[a]);
    if (alpha[a] != 0) v /= std::pow(side_, alpha[a]);
  }
  return v;
}

GridFunction Bump::sample(const GridSpec& spec) const {
  if (spec.d != cube_.d) throw Error(ErrorKind::DimensionMismatch, "cube and grid dimension differ");
  GridFunction f(spec);
  auto v = f.mutable_values();
  kernels::for_range(v.size(), Exec::Parallel, [&](std::size_t idx) {
    const auto c = spec.coords(idx);
    Point x{};
    for (int a = 0; a < spec.d; ++a) x[a] = spec.center(c[a]);
    v[idx] = (*this)(x);
  });
  return f;
}

GridFunction make_bump(const Cube& cube, const BumpProfile& profile, const GridSpec& spec) {
  spec.validate();
  if (cube.d != spec.d) throw Error(ErrorKind::DimensionMismatch, "cube and grid dimension differ");
  const Dyadic edge = Dyadic::pow2(spec.B);
  for (int a = 0; a < cube.d; ++a) {
    if (cube.lower(a) < -edge || cube.upper(a) > edge)
      throw Error(ErrorKind::OutOfRange, cube.to_string() + " is outside the grid box");
  }
  return Bump(cube, profile).sample(spec);
}

AdaptednessReport adaptedness_constant(const DerivativeOracle& f, const Cube& cube, double p, int N,
                                       int max_order) {
  if (!f) throw Error(ErrorKind::MissingDerivative, "no derivative oracle supplied");
  if (max_order < 0 || max_order > 2)
    throw Error(ErrorKind::InvalidArgument, "derivative order must be 0..2");
  const int d = cube.d;
  // relative lattice u in [-extent, extent]^d
  const double extent = d == 1 ? 32.0 : (d == 2 ? 16.0 : 8.0);
  const double step = d == 1 ? 1.0 / 16 : (d == 2 ? 0.25 : 0.5);
  const auto per_axis = static_cast<std::size_t>(2 * extent / step) + 1;
  std::size_t total = 1;
  for (int a = 0; a < d; ++a) total *= per_axis;

  std::vector<MultiIndex> alphas;
  for (int a0 = 0; a0 <= max_order; ++a0)
    for (int a1 = 0; a1 <= (d > 1 ? max_order : 0); ++a1)
      for (int a2 = 0; a2 <= (d > 2 ? max_order : 0); ++a2)
        if (a0 + a1 + a2 <= max_order) alphas.push_back({a0, a1, a2});

  const double side = cube.side.to_double();
  const double volume_factor = std::isinf(p) ? 1.0 : std::pow(std::pow(side, d), 1.0 / p);
  Point c{};
  for (int a = 0; a < d; ++a) c[a] = cube.center[a].to_double();

  AdaptednessReport rep;
  rep.points = total;
  for (std::size_t idx = 0; idx < total; ++idx) {
    Point x{};
    double dist = 0.0;
    std::size_t rest = idx;
    for (int a = 0; a < d; ++a) {
      const double u = -extent + step * double(rest % per_axis);
      rest /= per_axis;
      x[a] = c[a] + u * side;
      dist = std::max(dist, std::abs(u));
    }
    const double weight = volume_factor * std::pow(1.0 + dist, N);
    for (const auto& alpha : alphas) {
      const int order = alpha[0] + alpha[1] + alpha[2];
      const double v = std::abs(f(x, alpha)) * weight * std::pow(side, order);
      if (v > rep.constant) {
        rep.constant = v;
        rep.worst_point = x;
        rep.worst_alpha = alpha;
      }
    }
  }
  return rep;
}

AdaptednessReport adaptedness_constant(const Bump& bump, int N, int max_order) {
  return adaptedness_constant([&bump](const Point& x, const MultiIndex& a) { return bump.derivative(x, a); },
                              bump.cube(), bump.profile().p, N, max_order);
}

BoundCheck check_interaction_bound(const Bump& phi_i, const Bump& psi_j, bool mean_zero,
                                   const GridSpec& spec, double constant) {
  const Cube& I = phi_i.cube();
  const Cube& J = psi_j.cube();
  if (I.d != J.d) throw Error(ErrorKind::DimensionMismatch, "cubes differ in dimension");
  if (J.side > I.side) throw Error(ErrorKind::InvalidArgument, "interaction bound needs l(J) <= l(I)");
  const GridFunction a = phi_i.sample(spec);
  const GridFunction b = psi_j.sample(spec);
  if (mean_zero) {
    const double mass = lp_norm(b, 1.0);
    if (std::abs(integral(b)) > 1e-8 * mass)
      throw Error(ErrorKind::InvalidArgument, "psi_J does not have vanishing mean on this grid");
  }
  const int d = I.d;
  const int N = std::min(phi_i.profile().order, psi_j.profile().order);
  const double ratio_vol = std::pow(J.side.to_double() / I.side.to_double(), d);
  double sep = 0.0;
  for (int k = 0; k < d; ++k) sep = std::max(sep, std::abs((I.center[k] - J.center[k]).to_double()));
  const double u = 1.0 + sep / I.side.to_double();
  BoundCheck out;
  out.lhs = std::abs(inner_product(a, b));
  out.rhs = mean_zero ? constant * constant * std::pow(ratio_vol, 0.5 + 1.0 / d) * std::pow(u, -N + d)
                      : constant * constant * std::sqrt(ratio_vol) * std::pow(u, -N);
  out.ratio = out.lhs / out.rhs;
  return out;
}

BoundCheck check_atom_bound(const GridFunction& f, const Cube& support, const Bump& phi_j,
                            double constant) {
  const GridSpec& spec = f.spec();
  const GridFunction chi = indicator(support, spec);
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (chi[i] == complex{} && f[i] != complex{})
      throw Error(ErrorKind::InvalidArgument, "atom is not supported in its cube");
  }
  const double mass = lp_norm(f, 1.0);
  if (std::abs(integral(f)) >= 1e-10 * mass) throw Error(ErrorKind::InvalidArgument, "atom does not have mean zero");
  const Cube& J = phi_j.cube();
  const int d = J.d;
  const int N = phi_j.profile().order;
  const double lj = J.side.to_double();
  const double li = support.side.to_double();
  double sep = 0.0;
  for (int k = 0; k < d; ++k) sep = std::max(sep, std::abs((support.center[k] - J.center[k]).to_double()));
  BoundCheck out;
  out.lhs = std::abs(inner_product(f, phi_j.sample(spec))) * std::pow(lj, 0.5 * d);
  out.rhs = lj <= li ? constant * mass * std::pow(1.0 + sep / li, -N)
                     : constant * mass * (li / lj) * std::pow(1.0 + sep / lj, -N);
  out.ratio = out.lhs / out.rhs;
  return out;
}

namespace {

Cube unit_cube(int d) {
  Cube c{d, {}, Dyadic(1)};
  for (int a = 0; a < d; ++a) c.center[a] = Dyadic(1, -1);
  return c;
}

}  // namespace

std::vector<SweepRow> sweep_interaction(const SweepConfig& cfg, Exec exec) {
  const int d = cfg.d;
  if (d < 1 || d > 2) throw Error(ErrorKind::InvalidArgument, "sweeps run in dimension 1 or 2");
  const BumpProfile poly{ProfileKind::Polydecay, cfg.order, 2.0};
  const BumpProfile zero{ProfileKind::MeanZeroPolydecay, cfg.order, 2.0};
  const Cube I = unit_cube(d);
  const double c_poly = adaptedness_constant(Bump(I, poly), cfg.order).constant;
  const double c_zero = adaptedness_constant(Bump(I, zero), cfg.order).constant;
  const double C = std::max(c_poly, c_zero);

  const std::size_t n_ecc = static_cast<std::size_t>(cfg.max_k) + 1;
  const std::size_t n_sep = static_cast<std::size_t>(cfg.max_m);
  std::vector<SweepRow> rows(n_ecc + n_sep);

  const GridSpec ecc_grid{d, d == 1 ? 3 : 2, cfg.max_k + (d == 1 ? 5 : 2)};
  int sep_box = 1;
  while ((1 << sep_box) < cfg.max_m + 8) ++sep_box;
  const GridSpec sep_grid{d, sep_box, d == 1 ? 3 : 2};

  kernels::for_range(rows.size(), exec, [&](std::size_t r) {
    SweepRow row;
    row.d = d;
    if (r < n_ecc) {
      // psi_J sits at the origin so its odd profile cancels exactly on the
      // symmetric grid; c(I) is one side length away along axis 0.
      const int k = static_cast<int>(r);
      Cube Ic{d, {}, Dyadic(1)};
      Ic.center[0] = Dyadic(-1);
      Cube J{d, {}, Dyadic::pow2(-k)};
      const auto b = check_interaction_bound(Bump(Ic, poly), Bump(J, zero), true, ecc_grid, C);
      row.lemma = "interaction-ecc";
      row.k = k;
      row.m = 0;
      row.e = -k;
      row.lhs = b.lhs;
      row.rhs = b.rhs;
      row.ratio = b.ratio;
    } else {
      const int m = static_cast<int>(r - n_ecc) + 1;
      Cube J = I;
      J.center[0] = I.center[0] + Dyadic(m);
      const auto b = check_interaction_bound(Bump(I, poly), Bump(J, poly), false, sep_grid, C);
      row.lemma = "interaction-sep";
      row.m = m;
      row.lhs = b.lhs;
      row.rhs = b.rhs;
      row.ratio = b.ratio;
    }
    rows[r] = row;
  });
  return rows;
}

std::vector<SweepRow> sweep_atom(const SweepConfig& cfg, Exec exec) {
  const int d = cfg.d;
  if (d < 1 || d > 2) throw Error(ErrorKind::InvalidArgument, "sweeps run in dimension 1 or 2");
  const BumpProfile poly{ProfileKind::Polydecay, cfg.order, 2.0};
  const Cube I = unit_cube(d);
  const double C = adaptedness_constant(Bump(I, poly), cfg.order).constant;

  const std::size_t n_scale = static_cast<std::size_t>(cfg.max_e) + 1;
  const std::size_t n_sep = static_cast<std::size_t>(cfg.max_m);
  std::vector<SweepRow> rows(n_scale + n_sep);

  const GridSpec scale_grid{d, cfg.max_e + 2, 2};
  int sep_box = 1;
  while ((1 << sep_box) < cfg.max_m + 8) ++sep_box;
  const GridSpec sep_grid{d, sep_box, 2};
  const DyadicCube atom_cube{d, 0, {}};
  const GridFunction atom_scale = haar_function(scale_grid, atom_cube, 1);
  const GridFunction atom_sep = haar_function(sep_grid, atom_cube, 1);

  kernels::for_range(rows.size(), exec, [&](std::size_t r) {
    SweepRow row;
    row.d = d;
    if (r < n_scale) {
      const int e = static_cast<int>(r);
      Cube J = I;
      J.side = Dyadic::pow2(e);
      J.center[0] = I.center[0] + Dyadic(1, e - 2);
      const auto b = check_atom_bound(atom_scale, I, Bump(J, poly), C);
      row.lemma = "atom-scale";
      row.k = -e;
      row.e = e;
      row.lhs = b.lhs;
      row.rhs = b.rhs;
      row.ratio = b.ratio;
    } else {
      const int m = static_cast<int>(r - n_scale) + 1;
      Cube J = I;
      J.center[0] = I.center[0] + Dyadic(m);
      const auto b = check_atom_bound(atom_sep, I, Bump(J, poly), C);
      row.lemma = "atom-sep";
      row.m = m;
      row.lhs = b.lhs;
      row.rhs = b.rhs;
      row.ratio = b.ratio;
    }
    rows[r] = row;
  });
  return rows;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  const auto old = out.precision(17);
  out << "lemma,d,k,m,e,lhs,rhs,ratio\n";
  for (const auto& r : rows)
    out << r.lemma << ',' << r.d << ',' << r.k << ',' << r.m << ',' << r.e << ',' << r.lhs << ',' << r.rhs
        << ',' << r.ratio << '\n';
  out.precision(old);
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw Error(ErrorKind::DegenerateSweep, "need at least two points");
  const double n = double(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw Error(ErrorKind::DegenerateSweep, "abscissae are all equal");
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (fit.slope * x[i] + fit.intercept);
    ss += r * r;
  }
  fit.rms = std::sqrt(ss / n);
  return fit;
}

LineFit sweep_fit(const std::vector<SweepRow>& rows, std::string_view lemma, int from) {
  std::vector<double> x, y;
  for (const auto& r : rows) {
    if (r.lemma != lemma || !(r.lhs > 0.0)) continue;
    double v;
    int swept;
    if (lemma == "interaction-ecc") v = -r.d * (swept = r.k) * std::numbers::ln2;
    else if (lemma == "atom-scale") v = -r.d * (swept = r.e) * std::numbers::ln2;
    else v = std::log1p(swept = r.m);
    if (swept < from) continue;
    x.push_back(v);
    y.push_back(std::log(r.lhs));
  }
  if (x.size() < 2) throw Error(ErrorKind::DegenerateSweep, "too few rows for " + std::string(lemma));
  return fit_line(x, y);
}

}  // namespace lagom
