// Command line front end. Each subcommand runs one experiment, prints a
// summary and exits 0 only when every check it asserts holds.
#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "lagom/config.hpp"
#include "lagom/czd.hpp"
#include "lagom/diagnostics.hpp"
#include "lagom/error.hpp"
#include "lagom/kernel.hpp"
#include "lagom/paraproduct.hpp"

using namespace lagom;

namespace {

struct Check {
  bool ok = true;
  void operator()(bool pass, const std::string& what) {
    std::cout << (pass ? "PASS " : "FAIL ") << what << '\n';
    ok = ok && pass;
  }
};

// Command line value if given, else the config key, else the fallback.
template <class T>
T pick(const CLI::Option* opt, const T& cli, const Config& cfg, const std::string& key, const T& fallback) {
  if (opt->count() > 0) return cli;
  if constexpr (std::is_same_v<T, int>) {
    if (auto v = cfg.get_int(key)) return *v;
  } else if constexpr (std::is_same_v<T, double>) {
    if (auto v = cfg.get_real(key)) return *v;
  } else {
    if (auto v = cfg.get(key)) return *v;
  }
  return fallback;
}

DiagonalRule rule_for(const CompactCZKernel& k) {
  return k.antisymmetric ? DiagonalRule{} : DiagonalRule{DiagonalPolicy::ExcludeRing, 1};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dyadic lagom projections, CZ decompositions and compactness diagnostics"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "key = value file")->check(CLI::ExistingFile);

  // profile
  auto* prof = app.add_subcommand("profile", "norms of P_M^perp T over M");
  std::string p_kernel, p_M, p_out, p_svg;
  int p_B = 0, p_R = 0, p_seed = 1;
  bool p_timing = false;
  auto* o_pk = prof->add_option("--kernel", p_kernel, "compact-1d, control-1d, compact-2d or counterexample");
  auto* o_pB = prof->add_option("--B", p_B, "box exponent");
  auto* o_pR = prof->add_option("--R", p_R, "resolution exponent");
  auto* o_pM = prof->add_option("--M", p_M, "M values, 1..6 or 1,2,3");
  auto* o_po = prof->add_option("--out", p_out, "profile CSV");
  auto* o_ps = prof->add_option("--svg", p_svg, "profile chart");
  auto* o_pseed = prof->add_option("--seed", p_seed, "seed of the start vector and test family");
  prof->add_flag("--timing", p_timing, "record runtimes instead of NA");

  // czd
  auto* czd = app.add_subcommand("czd", "Calderon-Zygmund decomposition of a binary grid function");
  std::string c_input, c_cubes, c_good, c_bad;
  double c_threshold = 0.0;
  czd->add_option("--input", c_input, "binary grid function")->required()->check(CLI::ExistingFile);
  auto* o_ct = czd->add_option("--threshold", c_threshold, "selection level");
  czd->add_option("--cubes", c_cubes, "CSV of selected cubes");
  czd->add_option("--good", c_good, "binary good part");
  czd->add_option("--bad", c_bad, "binary sum of bad parts");

  // counterexample
  auto* cex = app.add_subcommand("counterexample", "P_M^perp of f -> <f, psi_[0,1)> chi_[0,1)");
  std::string x_M;
  auto* o_xM = cex->add_option("--M", x_M, "M value or list");

  // decayfit
  auto* dfit = app.add_subcommand("decayfit", "decay of <T psi_I, psi_J> in rdist and ecc");
  std::string f_kernel, f_out;
  int f_B = 0, f_R = 0;
  auto* o_fk = dfit->add_option("--kernel", f_kernel, "kernel name");
  auto* o_fB = dfit->add_option("--B", f_B, "box exponent");
  auto* o_fR = dfit->add_option("--R", f_R, "resolution exponent");
  auto* o_fo = dfit->add_option("--out", f_out, "ecc,rdist,value CSV");

  // sweeps
  int s_d = 1;
  std::string s_out;
  auto* s31 = app.add_subcommand("sweep-lemma31", "bump interaction sweeps");
  auto* s32 = app.add_subcommand("sweep-lemma32", "atom against bump sweeps");
  CLI::Option* o_sd[2];
  CLI::Option* o_so[2];
  int i = 0;
  for (auto* s : {s31, s32}) {
    o_sd[i] = s->add_option("--d", s_d, "dimension, 1 or 2");
    o_so[i] = s->add_option("--out", s_out, "sweep CSV");
    ++i;
  }

  CLI11_PARSE(app, argc, argv);

  try {
    Config cfg;
    if (!config_path.empty()) cfg = Config::load(config_path);
    Check check;

    if (*prof) {
      const std::string name = pick(o_pk, p_kernel, cfg, "kernel.name", std::string("compact-1d"));
      const std::vector<int> Ms = parse_int_list(pick(o_pM, p_M, cfg, "profile.M", std::string("1..6")));
      const int seed = pick(o_pseed, p_seed, cfg, "seed", 1);
      const int maxM = Ms.back();
      const int B = pick(o_pB, p_B, cfg, "grid.B", std::max(8, maxM));
      const int R = pick(o_pR, p_R, cfg, "grid.R", 6);
      ProfileOptions opt;
      opt.power.seed = static_cast<std::uint64_t>(seed);
      opt.timing = p_timing || cfg.get("timing").value_or("false") == "true";
      CompactnessProfile profile;
      bool standard = false, counter = false;
      if (name == "counterexample") {
        counter = true;
        const GridSpec spec{1, B, R};
        const auto T = counterexample_operator(spec);
        const auto family = default_test_family(spec, opt.power.seed);
        profile = compactness_profile(T, Ms, family, opt);
      } else {
        Config kc = cfg;
        kc.set("kernel.name", name);
        const CompactCZKernel k = kernel_from_config(kc);
        standard = k.standard_only;
        const GridSpec spec{k.d, B, R};
        const DiscretizedOperator T(k, spec, rule_for(k));
        const auto family = default_test_family(spec, opt.power.seed);
        profile = compactness_profile(T, Ms, family, opt);
      }
      const std::string out = pick(o_po, p_out, cfg, "profile.out", std::string());
      if (out.empty()) write_profile_csv(std::cout, profile);
      else write_profile_csv(out, profile);
      const std::string svg = pick(o_ps, p_svg, cfg, "profile.svg", std::string());
      if (!svg.empty()) write_profile_svg(svg, profile);

      const auto& rows = profile.rows;
      if (counter) {
        bool all = true;
        for (const auto& r : rows) all = all && r.weak11_sup >= 1.0 - 1e-12;
        check(all, "weak-type sup of P_M^perp T stays >= 1");
      } else if (rows.size() >= 2) {
        const double ratio = rows.back().l2_opnorm / rows.front().l2_opnorm;
        if (standard) {
          check(ratio > 0.5, "control: last/first = " + format_real(ratio) + " > 1/2");
        } else {
          bool dec = true;
          for (std::size_t r = 1; r < rows.size(); ++r) dec = dec && rows[r].l2_opnorm < rows[r - 1].l2_opnorm;
          check(dec, "l2 norm strictly decreasing in M");
          check(ratio < 0.5, "last/first = " + format_real(ratio) + " < 1/2");
        }
      }
    } else if (*czd) {
      const GridFunction f = read_binary(c_input);
      const double thr = pick(o_ct, c_threshold, cfg, "czd.threshold", 0.0);
      const auto dec = decompose(f, thr);
      for (const auto& w : dec.warnings) std::cerr << "warning: " << w << '\n';
      const auto m = exceptional_measures(dec);
      std::cout << "cubes " << dec.cubes.size() << "\nmE " << format_real(m.E) << "\nmE10 " << format_real(m.E_tilde)
                << '\n';
      if (!c_cubes.empty()) write_cubes_csv(c_cubes, dec);
      if (!c_good.empty() || !c_bad.empty())
        write_parts(c_good.empty() ? "good.bin" : c_good, c_bad.empty() ? "bad.bin" : c_bad, dec);

      check(reconstruction_defect(dec, f) <= 1.0, "f = good + sum of bad parts on every cell");
      double worst = 0.0;
      for (std::size_t b = 0; b < dec.bad.size(); ++b) {
        const GridFunction fb = dec.bad_part(b);
        const double n1 = lp_norm(fb, 1.0);
        if (n1 > 0) worst = std::max(worst, std::abs(integral(fb)) / n1);
      }
      check(worst < 1e-12, "bad parts have mean zero");
      const double l1 = lp_norm(f, 1.0);
      check(lp_norm(dec.good, INFINITY) <= std::ldexp(thr, f.spec().d) * (1 + 1e-12),
            "sup of the good part <= 2^d threshold");
      check(lp_norm(dec.good, 1.0) <= l1 * (1 + 1e-12), "L1 norm of the good part <= L1 norm of f");
      check(m.E <= l1 / thr * (1 + 1e-12), "m(E) <= |f|_1 / threshold");
    } else if (*cex) {
      for (int M : parse_int_list(pick(o_xM, x_M, cfg, "counterexample.M", std::string("1..6")))) {
        const auto r = run_counterexample(M);
        std::cout << "M=" << M << " max_cell_error=" << format_real(r.max_cell_error)
                  << " weak_quasinorm=" << format_real(r.weak_quasinorm) << '\n';
        check(r.max_cell_error < 1e-12, "M=" + std::to_string(M) + " image = 2^-M chi_(0,2^M)");
        check(std::abs(r.weak_quasinorm - 1.0) < 1e-12, "M=" + std::to_string(M) + " weak quasinorm = 1");
      }
    } else if (*dfit) {
      Config kc = cfg;
      kc.set("kernel.name", pick(o_fk, f_kernel, cfg, "kernel.name", std::string("compact-1d")));
      const CompactCZKernel k = kernel_from_config(kc);
      const GridSpec spec{k.d, pick(o_fB, f_B, cfg, "grid.B", 5), pick(o_fR, f_R, cfg, "grid.R", 6)};
      const DiscretizedOperator T(k, spec, rule_for(k));
      const auto rep = decay_fit(T);
      const std::string out = pick(o_fo, f_out, cfg, "decayfit.out", std::string());
      if (out.empty()) {
        write_decay_csv(std::cout, rep);
      } else {
        std::ofstream os(out);
        write_decay_csv(os, rep);
      }
      std::cout << "rdist_slope " << format_real(rep.rdist_fit.slope) << " rms " << format_real(rep.rdist_fit.rms)
                << "\necc_slope " << format_real(rep.ecc_fit.slope) << " rms " << format_real(rep.ecc_fit.rms) << '\n';
      for (int M = 1; M <= 3; ++M)
        std::cout << "escape_scan M=" << M << ' ' << format_real(weak_compactness_scan(T, M)) << '\n';
      check(rep.rdist_fit.slope <= -k.d, "rdist slope <= -d");
      check(rep.rdist_fit.rms < 0.2, "rdist fit residual < 0.2");
      check(rep.ecc_fit.slope >= 0.5, "ecc slope >= 1/2");
    } else {
      const bool lemma31 = static_cast<bool>(*s31);
      const int sel = lemma31 ? 0 : 1;
      SweepConfig sc;
      sc.d = pick(o_sd[sel], s_d, cfg, "sweep.d", 1);
      const auto rows = lemma31 ? sweep_interaction(sc) : sweep_atom(sc);
      const std::string out = pick(o_so[sel], s_out, cfg, "sweep.out", std::string());
      if (out.empty()) {
        write_sweep_csv(std::cout, rows);
      } else {
        std::ofstream os(out);
        write_sweep_csv(os, rows);
      }
      bool finite = true;
      for (const auto& r : rows) finite = finite && std::isfinite(r.ratio);
      check(finite, "all ratios finite");
      // decay per halving of the small cube, in log2 units, past the first two steps
      if (lemma31) {
        const double per_k = sc.d * sweep_fit(rows, "interaction-ecc", 2).slope;
        const double want = sc.d * (0.5 + 1.0 / sc.d);
        check(per_k >= want - 0.1, "mean-zero decay per k " + format_real(per_k) + " >= " + format_real(want) + " - 0.1");
      } else {
        const double per_e = sc.d * sweep_fit(rows, "atom-scale", 2).slope;
        check(per_e >= 1 - 0.2, "atom decay per e " + format_real(per_e) + " >= 1 - 0.2");
      }
    }
    return check.ok ? 0 : 1;
  } catch (const Error& e) {
    std::cerr << "lagom: " << e.what() << '\n';
    return 2;
  }
}
