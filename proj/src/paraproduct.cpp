#include "lagom/paraproduct.hpp"

#include <cmath>
#include <map>

#include "lagom/error.hpp"

namespace lagom {

namespace {

BumpProfile smoothing_profile(const BumpProfile& p) {
  if (p.kind != ProfileKind::Polydecay)
    throw Error(ErrorKind::InvalidArgument, "the smoothing profile must be a polydecay bump");
  BumpProfile out = p;
  out.p = 1.0;
  return out;
}

// Nonzero wavelet entries grouped by cube.
std::map<DyadicCube, std::vector<HaarEntry>> by_cube(const HaarCoefficients& b) {
  std::map<DyadicCube, std::vector<HaarEntry>> out;
  for (const auto& e : b.entries())
    if (e.type != 0) out[e.cube].push_back(e);
  return out;
}

}  // namespace

GridFunction apply(const ParaproductSymbol& sym, const GridFunction& f, Exec exec) {
  const GridSpec& spec = sym.spec();
  check_same_spec(spec, f.spec());
  HaarCoefficients c(spec);
  if (!sym.smoothing) {
    const auto avg = cube_averages(f, exec);
    const auto nt = static_cast<std::size_t>(c.types());
    for (int j = c.min_scale(); j <= c.max_scale(); ++j) {
      const auto bl = sym.b.level(j);
      const auto& a = avg[static_cast<std::size_t>(j + spec.R)];
      auto out = c.level(j);
      kernels::for_range(a.size(), exec, [&](std::size_t p) {
        for (std::size_t i = 0; i < nt; ++i) out[p * nt + i] = bl[p * nt + i] * a[p];
      });
    }
  } else {
    const BumpProfile prof = smoothing_profile(*sym.smoothing);
    for (const auto& [cube, list] : by_cube(sym.b)) {
      const complex pair = inner_product(f, Bump(cube.to_cube(), prof).sample(spec), exec);
      for (const auto& e : list) c.set(cube, e.type, e.value * pair);
    }
  }
  return synthesize(c, exec);
}

GridFunction apply_adjoint(const ParaproductSymbol& sym, const GridFunction& g, Exec exec) {
  const GridSpec& spec = sym.spec();
  check_same_spec(spec, g.spec());
  const HaarCoefficients a = analyze(g, exec);
  if (!sym.smoothing) {
    const auto nt = static_cast<std::size_t>(a.types());
    std::vector<std::vector<complex>> w;
    w.emplace_back(ScaleLayout{spec, -spec.R}.count());
    for (int j = a.min_scale(); j <= a.max_scale(); ++j) {
      const auto bl = sym.b.level(j);
      const auto al = a.level(j);
      const double inv_volume = std::ldexp(1.0, -j * spec.d);
      std::vector<complex> lv(ScaleLayout{spec, j}.count());
      kernels::for_range(lv.size(), exec, [&](std::size_t p) {
        complex s{};
        for (std::size_t i = 0; i < nt; ++i) s += std::conj(bl[p * nt + i]) * al[p * nt + i];
        lv[p] = s * inv_volume;
      });
      w.push_back(std::move(lv));
    }
    return accumulate_down(spec, w, exec);
  }
  const BumpProfile prof = smoothing_profile(*sym.smoothing);
  GridFunction out(spec);
  for (const auto& [cube, list] : by_cube(sym.b)) {
    complex s{};
    for (const auto& e : list) s += std::conj(e.value) * a.get(cube, e.type);
    if (s != complex{}) out += s * Bump(cube.to_cube(), prof).sample(spec);
  }
  return out;
}

double lagom_commutation_check(const ParaproductSymbol& sym, int M, const GridFunction& f, Exec exec) {
  const LagomProjector P(sym.spec(), M);
  const GridFunction lhs = P.complement(apply(sym, f, exec), exec);
  const ParaproductSymbol tail{P.restrict(sym.b, false), sym.smoothing};
  return lp_norm(lhs - apply(tail, f, exec), 2.0, exec);
}

std::size_t rank_bound(const ParaproductSymbol& sym) {
  std::size_t n = 0;
  for (const auto& e : sym.b.entries()) n += e.type != 0;
  return n;
}

GridFunction ParaproductOperator::apply(const GridFunction& f) const {
  return adjoint_ ? lagom::apply_adjoint(sym_, f) : lagom::apply(sym_, f);
}

GridFunction ParaproductOperator::apply_adjoint(const GridFunction& f) const {
  return adjoint_ ? lagom::apply(sym_, f) : lagom::apply_adjoint(sym_, f);
}

ParaproductOperator counterexample_operator(const GridSpec& spec) {
  if (spec.d != 1) throw Error(ErrorKind::DimensionMismatch, "the counterexample lives on the line");
  if (spec.R < 1) throw Error(ErrorKind::InvalidArgument, "the grid must resolve psi_[0,1)");
  HaarCoefficients b(spec);
  b.set(DyadicCube{1, 0, {0, 0, 0}}, 1, 1.0);
  return ParaproductOperator({std::move(b), std::nullopt}, true, "counterexample");
}

CounterexampleReport run_counterexample(int M, std::optional<GridSpec> spec) {
  const GridSpec s = spec.value_or(GridSpec{1, M + 2, 4});
  s.validate();
  const auto T = counterexample_operator(s);
  const LagomProjector P(s, M);
  CounterexampleReport r;
  r.M = M;
  r.image = P.complement(T.apply(haar_function(s, DyadicCube{1, 0, {0, 0, 0}}, 1)));
  Cube support{1, {Dyadic::pow2(M - 1)}, Dyadic::pow2(M)};
  r.expected = complex(std::ldexp(1.0, -M)) * indicator(support, s);
  for (std::size_t i = 0; i < r.image.size(); ++i)
    r.max_cell_error = std::max(r.max_cell_error, std::abs(r.image[i] - r.expected[i]));
  r.weak_quasinorm = weak_l1_quasinorm(r.image);
  return r;
}

}  // namespace lagom
