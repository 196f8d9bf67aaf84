// Acceptance run: one PASS/FAIL line per criterion. With no arguments every
// criterion runs; --criterion N (repeatable) selects. Exit 0 iff all selected pass.
#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

#include "../common.hpp"
#include "lagom/bump.hpp"
#include "lagom/czd.hpp"
#include "lagom/diagnostics.hpp"
#include "lagom/haar.hpp"
#include "lagom/kernel.hpp"
#include "lagom/paraproduct.hpp"

using namespace lagom;
using testing::max_abs_diff;
using testing::random_function;
using testing::Rational;
using testing::to_rational;
using testing::unit;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Outcome {
  bool pass = true;
  std::ostringstream note;
  void require(bool ok, const std::string& what) {
    if (!ok && pass) note << "first failure: " << what << "; ";
    pass = pass && ok;
  }
};

struct Criterion {
  int id;
  std::string title;
  double budget_s;
  std::function<void(Outcome&)> run;
};

// 1 ---------------------------------------------------------------------------
void counterexample(Outcome& out) {
  for (int M = 1; M <= 6; ++M) {
    const auto rep = run_counterexample(M);
    out.note << "M=" << M << " err=" << format_real(rep.max_cell_error) << " wq=" << format_real(rep.weak_quasinorm) << "; ";
    out.require(rep.max_cell_error < 1e-12, "cell error at M=" + std::to_string(M));
    out.require(std::abs(rep.weak_quasinorm - 1.0) < 1e-12, "weak quasinorm at M=" + std::to_string(M));
  }
}

// 2 ---------------------------------------------------------------------------
void haar_system(Outcome& out) {
  double worst = 0;
  for (const GridSpec s : {GridSpec{1, 3, 4}, GridSpec{2, 2, 3}}) {
    // each sampled basis function against every coefficient of the fast transform
    const HaarCoefficients slots(s);
    std::size_t count = 0;
    for (int j = slots.min_scale(); j <= slots.max_scale(); ++j) {
      const ScaleLayout lay{s, j};
      for (std::size_t q = 0; q < lay.count(); ++q)
        for (int t = 1; t <= slots.types(); ++t) {
          const auto c = analyze(haar_function(s, lay.cube(q), t));
          for (int jj = c.min_scale(); jj <= c.max_scale(); ++jj) {
            const auto level = c.level(jj);
            for (std::size_t x = 0; x < level.size(); ++x) {
              const bool self = jj == j && x == q * static_cast<std::size_t>(c.types()) + static_cast<std::size_t>(t - 1);
              worst = std::max(worst, std::abs(level[x] - complex(self ? 1.0 : 0.0)));
            }
          }
          for (auto v : c.scaling()) worst = std::max(worst, std::abs(v));
          ++count;
        }
    }
    out.require(count + (std::size_t(1) << s.d) == s.cell_count(), "basis size");
  }
  // direct inner products for the one-dimensional grid
  const GridSpec s{1, 3, 4};
  std::vector<GridFunction> psi;
  for (int j = -3; j <= 3; ++j) {
    const ScaleLayout lay{s, j};
    for (std::size_t q = 0; q < lay.count(); ++q) psi.push_back(haar_function(s, lay.cube(q), 1));
  }
  for (std::size_t a = 0; a < psi.size(); ++a)
    for (std::size_t b = a; b < psi.size(); ++b)
      worst = std::max(worst, std::abs(inner_product(psi[a], psi[b]) - complex(a == b ? 1.0 : 0.0)));
  out.note << "orthonormality err=" << format_real(worst) << "; ";
  out.require(worst < 1e-12, "orthonormality");

  std::mt19937_64 gen(2);
  double rel = 0;
  for (int n = 0; n < 100; ++n) {
    const GridSpec r = n % 2 ? GridSpec{1, 3, 4} : GridSpec{2, 2, 3};
    const auto f = random_function(r, gen);
    const double e = lp_norm(f, 2) * lp_norm(f, 2);
    rel = std::max(rel, std::abs(analyze(f).energy() - e) / e);
  }
  out.note << "Parseval rel err=" << format_real(rel);
  out.require(rel < 1e-10, "Parseval");
}

// 3 ---------------------------------------------------------------------------
void projection_algebra(Outcome& out) {
  std::mt19937_64 gen(3);
  double worst = 0;
  for (int M = 1; M <= 3; ++M)
    for (const GridSpec s : {GridSpec{1, 6, 3}, GridSpec{2, 4, 2}}) {
      const LagomProjector P(s, M);
      for (int n = 0; n < 50; ++n) {
        const auto f = random_function(s, gen), g = random_function(s, gen);
        const auto pf = P.project(f), pg = P.project(g), qf = P.complement(f), qg = P.complement(g);
        worst = std::max({worst, max_abs_diff(P.project(pf), pf), std::abs(inner_product(pf, g) - inner_product(f, pg)),
                          max_abs_diff(pf + qf, f), std::abs(inner_product(pf, qg))});
      }
    }
  out.note << "max defect=" << format_real(worst);
  out.require(worst < 1e-12, "projection identities");
}

// 4 ---------------------------------------------------------------------------
void cz_invariants(Outcome& out) {
  std::mt19937_64 gen(4);
  double worst_defect = 0, worst_mean = 0;
  std::size_t lattice_inexact = 0, selected = 0;
  for (int n = 0; n < 100; ++n) {
    const int d = 1 + n % 2;
    const GridSpec s{d, 3, d == 1 ? 4 : 2};
    // half the inputs on a coarse dyadic lattice, half generic doubles; sparse peaks
    const bool lattice = n % 4 < 2;
    GridFunction f(s);
    for (std::size_t i = 0; i < f.size(); ++i) {
      double v = unit(gen);
      if (gen() % 17 == 0) v += 40 * unit(gen);
      if (n % 3 == 0) v *= (gen() & 1) ? -1.0 : 1.0;
      f[i] = lattice ? std::ldexp(std::floor(std::ldexp(v, 10)), -10) : v;
    }
    GridFunction mag(s);
    for (std::size_t i = 0; i < f.size(); ++i) mag[i] = std::abs(f[i]);
    const auto levels = cube_averages(mag);
    double top = 0;
    for (auto a : levels.back()) top = std::max(top, a.real());
    const double thr = (1.0 + 3.0 * unit(gen)) * top;  // no cube of the box scale is selected
    const auto dec = decompose(f, thr);
    selected += dec.cubes.size();
    const double l1 = lp_norm(f, 1);

    const double defect = reconstruction_defect(dec, f);
    worst_defect = std::max(worst_defect, defect);
    lattice_inexact += lattice && defect != 0.0;
    out.require(lp_norm(dec.good, kInf) <= std::ldexp(thr, d), "good part sup bound");
    out.require(lp_norm(dec.good, 1) <= l1 * (1 + 1e-14), "good part L1 bound");
    const auto m = exceptional_measures(dec);
    out.require(m.E <= l1 / thr, "m(E) bound");

    std::set<DyadicCube> chosen(dec.cubes.begin(), dec.cubes.end());
    for (std::size_t i = 0; i < dec.cubes.size(); ++i) {
      const auto& c = dec.cubes[i];
      const auto part = dec.bad_part(i);
      const double pl1 = lp_norm(part, 1);
      if (pl1 > 0) worst_mean = std::max(worst_mean, std::abs(integral(part)) / pl1);
      // support: zero off the cells of I
      const Cube cube = c.to_cube();
      for (std::size_t x = 0; x < part.size(); ++x) {
        if (part[x] == complex()) continue;
        const auto xy = s.coords(x);
        bool in = true;
        for (int a = 0; a < d; ++a) {
          const double p = s.center(xy[a]);
          in = in && p > cube.lower(a).to_double() && p < cube.upper(a).to_double();
        }
        out.require(in, "bad part support");
      }
      // maximal: the average exceeds, no ancestor exceeds or is chosen
      out.require(dec.bad[i].abs_average > thr, "selected average above threshold");
      for (auto p = c; p.j < s.B;) {
        p = p.parent();
        const ScaleLayout lay{s, p.j};
        out.require(levels[static_cast<std::size_t>(p.j + s.R)][lay.index(p)].real() <= thr, "parent average");
        out.require(chosen.count(p) == 0, "disjointness");
      }
    }
  }
  out.note << "selected cubes=" << selected << " reconstruction defect (roundings)=" << format_real(worst_defect)
           << " lattice inputs inexact=" << lattice_inexact << " max |mean|/L1=" << format_real(worst_mean);
  out.require(lattice_inexact == 0, "exact reconstruction on lattice inputs");
  out.require(worst_defect <= 1.0, "reconstruction within one rounding");
  out.require(worst_mean < 1e-12, "mean zero bad parts");
  out.require(selected > 100, "nontrivial decompositions");
}

// 5 ---------------------------------------------------------------------------
Cube random_cube(std::mt19937_64& gen, int d) {
  Cube c;
  c.d = d;
  c.side = Dyadic::pow2(static_cast<int>(gen() % 11) - 5) * Dyadic(static_cast<std::int64_t>(gen() % 5) + 1);
  for (int a = 0; a < d; ++a) c.center[a] = Dyadic(static_cast<std::int64_t>(gen() % 1025) - 512, -4);
  return c;
}

void geometry(Outcome& out) {
  std::mt19937_64 gen(5);
  std::size_t mismatches = 0, bound_violations = 0;
  for (int n = 0; n < 10000; ++n) {
    const int d = 1 + n % 3;
    const Cube a = random_cube(gen, d), b = random_cube(gen, d);
    const auto g = enclosing_cube(a, b);
    const auto o = testing::pair_oracle(testing::RCube::from(a), testing::RCube::from(b));
    bool same = to_rational(g.diam) == o.diam && to_rational(g.rdist) == o.rdist && to_rational(g.ecc) == o.ecc &&
                to_rational(g.enclosing.side) == o.diam;
    for (int i = 0; i < d; ++i) same = same && to_rational(g.enclosing.lower(i)) == o.corner[static_cast<std::size_t>(i)];
    mismatches += !same;
    const auto [lo, hi] = rdist_bounds(a, b);
    bound_violations += !(to_rational(lo) <= o.rdist && o.rdist <= to_rational(hi));
  }
  out.note << "oracle mismatches=" << mismatches << " bound violations=" << bound_violations << "; ";
  out.require(mismatches == 0, "rational oracle");
  out.require(bound_violations == 0, "rdist bounds");

  const DyadicCube I{1, 0, {0}};
  std::size_t family_mismatch = 0;
  double lo_ratio = 1e300, hi_ratio = 0;
  for (int k = -3; k <= 3; ++k)
    for (int m = 1; m <= 8; ++m) {
      const auto fam = family_Ikm(I, k, m);
      std::set<DyadicCube> scan;
      const std::int64_t reach = std::int64_t(m + 3) << std::max(k, 0) << std::max(-k, 0);
      for (std::int64_t kk = -reach - 2; kk <= reach + 2; ++kk) {
        const DyadicCube J{1, -k, {kk}};
        const Rational r = to_rational(rdist(I.to_cube(), J.to_cube()));
        if (r >= m && r < m + 1) scan.insert(J);
      }
      family_mismatch += std::set<DyadicCube>(fam.begin(), fam.end()) != scan;
      const double ratio = static_cast<double>(fam.size()) / family_Ikm_count_formula(1, k, m);
      lo_ratio = std::min(lo_ratio, ratio);
      hi_ratio = std::max(hi_ratio, ratio);
    }
  out.note << "I_km scan mismatches=" << family_mismatch << " count ratio in [" << format_real(lo_ratio) << ", "
           << format_real(hi_ratio) << "]";
  out.require(family_mismatch == 0, "I_km brute force");
  out.require(lo_ratio >= 1.0 / 16 && hi_ratio <= 16, "I_km cardinality");
}

// 6 ---------------------------------------------------------------------------
HaarCoefficients random_symbol(const GridSpec& s, std::mt19937_64& gen, int terms) {
  HaarCoefficients b(s);
  for (int n = 0; n < terms; ++n) {
    const int j = b.min_scale() + static_cast<int>(gen() % static_cast<std::uint64_t>(b.max_scale() - b.min_scale() + 1));
    const ScaleLayout lay{s, j};
    b.set(lay.cube(gen() % lay.count()), 1 + static_cast<int>(gen() % static_cast<std::uint64_t>(b.types())),
          complex(2 * unit(gen) - 1, 2 * unit(gen) - 1));
  }
  return b;
}

void paraproduct(Outcome& out) {
  std::mt19937_64 gen(6);
  double ident = 0, annihil = 0, adjoint = 0, commute = 0;
  for (int n = 0; n < 50; ++n) {
    const int d = 1 + n % 2;
    const GridSpec s{d, 3, 2};
    const ParaproductSymbol sym{random_symbol(s, gen, 40), {}};
    GridFunction one(s);
    for (std::size_t i = 0; i < one.size(); ++i) one[i] = 1.0;
    const auto f = random_function(s, gen), g = random_function(s, gen);
    ident = std::max(ident, std::abs(inner_product(apply(sym, one), g) - inner_product(synthesize(sym.b), g)));
    annihil = std::max(annihil, std::abs(inner_product(apply(sym, f), one)));
    const complex lhs = inner_product(apply(sym, f), g);
    adjoint = std::max(adjoint, std::abs(lhs - inner_product(f, apply_adjoint(sym, g))) / std::max(1.0, std::abs(lhs)));
  }
  for (int M = 1; M <= 3; ++M)
    for (int d = 1; d <= 2; ++d) {
      const GridSpec s{d, M + 2, 2};
      for (int n = 0; n < 5; ++n) {
        const ParaproductSymbol sym{random_symbol(s, gen, 60), {}};
        const auto f = random_function(s, gen);
        commute = std::max(commute, lagom_commutation_check(sym, M, f) / lp_norm(f, 2));
      }
    }
  out.note << "<T1,g>-<b,g>=" << format_real(ident) << " <Tf,1>=" << format_real(annihil)
           << " adjoint rel=" << format_real(adjoint) << " commutation rel=" << format_real(commute);
  out.require(ident < 1e-10, "T_b(1) = b");
  out.require(annihil < 1e-10, "<T_b f, 1> = 0");
  out.require(adjoint < 1e-10, "adjoint pairing");
  out.require(commute < 1e-10, "lagom commutation");
}

// same diagonal treatment as the CLI
DiagonalRule rule_for(const CompactCZKernel& k) {
  return k.antisymmetric ? DiagonalRule{} : DiagonalRule{DiagonalPolicy::ExcludeRing, 1};
}

// 7 ---------------------------------------------------------------------------
void compactness_trend(Outcome& out) {
  const GridSpec s{1, 8, 6};
  double c[3], k[3];
  {
    const auto k1 = make_kernel("compact-1d");
    const DiscretizedOperator T(k1, s, rule_for(k1));
    for (int M = 1; M <= 3; ++M) c[M - 1] = lagom_tail_norm(T, M).sigma;
  }
  {
    const auto k2 = make_kernel("control-1d");
    const DiscretizedOperator T(k2, s, rule_for(k2));
    for (int M = 1; M <= 3; ++M) k[M - 1] = lagom_tail_norm(T, M).sigma;
  }
  out.note << "compact-1d " << format_real(c[0]) << ", " << format_real(c[1]) << ", " << format_real(c[2])
           << " (M=3/M=1 " << format_real(c[2] / c[0]) << "); control-1d " << format_real(k[0]) << ", "
           << format_real(k[1]) << ", " << format_real(k[2]) << " (M=3/M=1 " << format_real(k[2] / k[0]) << "); ";
  out.require(c[1] < c[0] && c[2] < c[1], "compact strictly decreasing");
  out.require(c[2] < 0.5 * c[0], "compact halves by M=3");
  out.require(k[2] > 0.5 * k[0], "control stays above half");
}

// 8 ---------------------------------------------------------------------------
void decay(Outcome& out) {
  const auto k = make_kernel("compact-1d");
  const DiscretizedOperator T(k, GridSpec{1, 5, 6}, rule_for(k));
  const auto rep = decay_fit(T);
  out.note << "rdist slope=" << format_real(rep.rdist_fit.slope) << " rms=" << format_real(rep.rdist_fit.rms)
           << " ecc slope=" << format_real(rep.ecc_fit.slope);
  out.require(rep.rdist_fit.slope <= -1.0, "rdist slope");
  out.require(rep.rdist_fit.rms < 0.2, "rdist residual");
  out.require(rep.ecc_fit.slope >= 0.5, "ecc slope");
}

// 9 ---------------------------------------------------------------------------
void sweeps(Outcome& out) {
  SweepConfig cfg;
  cfg.d = 1;
  const auto inter = sweep_interaction(cfg), atom = sweep_atom(cfg);
  bool finite = true;
  for (const auto& r : inter) finite = finite && std::isfinite(r.ratio) && std::isfinite(r.lhs);
  for (const auto& r : atom) finite = finite && std::isfinite(r.ratio) && std::isfinite(r.lhs);
  const double want = 0.5 + 1.0 / cfg.d;
  const double tail = sweep_fit(inter, "interaction-ecc", 2).slope, full = sweep_fit(inter, "interaction-ecc").slope;
  out.note << "rows=" << inter.size() + atom.size() << " ecc exponent (k>=2)=" << format_real(tail)
           << " (all k)=" << format_real(full) << " want>=" << format_real(want) << "-0.1";
  out.require(finite, "finite ratios");
  out.require(tail >= want - 0.1, "mean-zero ecc exponent");
}

// 10 --------------------------------------------------------------------------
std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void determinism(Outcome& out) {
  const auto dir = std::filesystem::temp_directory_path() / "lagom_acceptance_determinism";
  std::filesystem::create_directories(dir);
  {
    std::ofstream cfg(dir / "run.cfg");
    cfg << "kernel.name = compact-1d\ngrid.B = 4\ngrid.R = 3\nprofile.M = 1..3\nseed = 7\n";
  }
  for (const char* name : {"a.csv", "b.csv"}) {
    const std::string cmd = std::string("\"") + LAGOM_CLI + "\" --config \"" + (dir / "run.cfg").string() +
                            "\" profile --out \"" + (dir / name).string() + "\" > \"" + (dir / "log.txt").string() + "\" 2>&1";
    const int rc = std::system(cmd.c_str());
    out.require(rc != -1 && std::filesystem::exists(dir / name), std::string("cli run producing ") + name);
  }
  const std::string a = slurp(dir / "a.csv"), b = slurp(dir / "b.csv");
  out.note << "csv bytes=" << a.size();
  out.require(!a.empty() && a == b, "byte-identical CSV");
  std::filesystem::remove_all(dir);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  std::vector<int> only;
  app.add_option("--criterion", only, "criterion number, repeatable")->check(CLI::Range(1, 10));
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> all = {
      {1, "counterexample closed form and weak norm, M = 1..6", 5, counterexample},
      {2, "Haar orthonormality and Parseval", 10, haar_system},
      {3, "lagom projection algebra", 10, projection_algebra},
      {4, "CZ decomposition invariants", 30, cz_invariants},
      {5, "geometry against rational oracle, I_km scans", 30, geometry},
      {6, "paraproduct identities and lagom commutation", 20, paraproduct},
      {7, "compactness trend of P_M^perp T, compact vs control", 120, compactness_trend},
      {8, "decay exponent fit", 60, decay},
      {9, "interaction and atom sweeps", 60, sweeps},
      {10, "profile CSV determinism", 60, determinism},
  };
  bool ok = true;
  for (const auto& c : all) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    Outcome out;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.run(out);
    } catch (const std::exception& e) {
      out.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out.require(secs < c.budget_s, "runtime budget");
    std::printf("%s criterion %d: %s [%.2f s of %.0f s] %s\n", out.pass ? "PASS" : "FAIL", c.id, c.title.c_str(), secs,
                c.budget_s, out.note.str().c_str());
    std::fflush(stdout);
    ok = ok && out.pass;
  }
  return ok ? 0 : 1;
}
