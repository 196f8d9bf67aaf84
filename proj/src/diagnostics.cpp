#include "lagom/diagnostics.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "lagom/czd.hpp"
#include "lagom/error.hpp"
#include "lagom/haar.hpp"

namespace lagom {

namespace {

double unit(std::mt19937_64& gen) { return static_cast<double>(gen() >> 11) * 0x1p-53; }

GridFunction l1_normalized(GridFunction f) {
  const double n = lp_norm(f, 1.0);
  if (n > 0.0) f *= 1.0 / n;
  return f;
}

bool fits(const GridSpec& spec, const DyadicCube& c) {
  if (c.j < 1 - spec.R || c.j > spec.B) return false;
  const Dyadic edge = Dyadic::pow2(spec.B);
  for (int a = 0; a < spec.d; ++a)
    if (c.lower(a) < -edge || c.lower(a) + c.side() > edge) return false;
  return true;
}

}  // namespace

std::vector<GridFunction> default_test_family(const GridSpec& spec, std::uint64_t seed) {
  spec.validate();
  std::vector<GridFunction> out;
  for (int j = -1; j <= 1; ++j)
    for (std::int64_t k = -1; k <= 1; ++k) {
      const DyadicCube c{spec.d, j, {k, 0, 0}};
      if (fits(spec, c)) out.push_back(l1_normalized(haar_function(spec, c, 1)));
    }
  if (spec.R < 0) return out;
  const Cube core{spec.d, {}, Dyadic(2)};
  const GridFunction mask = indicator(core, spec);
  for (std::uint64_t s = 0; s < 4; ++s) {
    std::mt19937_64 gen(seed + s);
    GridFunction f(spec);
    for (std::size_t i = 0; i < f.size(); ++i) {
      const double u = unit(gen);
      f[i] = mask[i] * (8.0 * u * u * u);
    }
    const double mean = integral(f).real() / core.volume().to_double();
    if (!(mean > 0.0)) continue;
    const GridFunction bad = decompose(f, 2.0 * mean).bad_sum();
    if (lp_norm(bad, 1.0) > 0.0) out.push_back(l1_normalized(bad));
  }
  return out;
}

PowerIterationResult lagom_tail_norm(const GridOperator& A, int M, const PowerIterationOptions& opt) {
  const GridSpec& spec = A.spec();
  const LagomProjector P(spec, M);
  std::mt19937_64 gen(opt.seed);
  GridFunction v(spec);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = unit(gen) - 0.5;
  v *= 1.0 / lp_norm(v, 2.0);
  PowerIterationResult r;
  double prev = -1.0;
  for (int step = 1; step <= opt.max_steps; ++step) {
    GridFunction w = A.apply_adjoint(P.complement(A.apply(v)));
    const double lambda = lp_norm(w, 2.0);
    r.steps = step;
    if (lambda == 0.0) {
      r.sigma = 0.0;
      return r;
    }
    r.sigma = std::sqrt(lambda);
    if (std::abs(r.sigma - prev) <= opt.tolerance * r.sigma) return r;
    prev = r.sigma;
    w *= 1.0 / lambda;
    v = std::move(w);
  }
  throw Error(ErrorKind::NonConvergence,
              "power iteration did not settle in " + std::to_string(opt.max_steps) + " steps");
}

CompactnessProfile compactness_profile(const GridOperator& A, std::span<const int> Ms,
                                       std::span<const GridFunction> family, const ProfileOptions& opt) {
  CompactnessProfile p;
  p.kernel = A.id();
  p.spec = A.spec();
  for (std::size_t i = 1; i < Ms.size(); ++i)
    if (Ms[i] <= Ms[i - 1]) throw Error(ErrorKind::InvalidArgument, "M values must increase");
  std::vector<GridFunction> images;
  images.reserve(family.size());
  for (const auto& f : family) images.push_back(A.apply(f));
  for (int M : Ms) {
    const auto t0 = std::chrono::steady_clock::now();
    ProfileRow row;
    row.M = M;
    row.l2_opnorm = lagom_tail_norm(A, M, opt.power).sigma;
    const LagomProjector P(p.spec, M);
    for (const auto& g : images) row.weak11_sup = std::max(row.weak11_sup, weak_l1_quasinorm(P.complement(g)));
    if (opt.timing)
      row.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    p.rows.push_back(row);
  }
  return p;
}

DecayFitReport decay_fit(const GridOperator& T) {
  const GridSpec& spec = T.spec();
  const int d = spec.d;
  if (spec.R < 5 || spec.B < 4)
    throw Error(ErrorKind::BoxTooSmall, "the decay sweep needs B >= 4 and R >= 5");
  const DyadicCube I{d, 0, {0, 0, 0}};
  const GridFunction TI = T.apply(haar_function(spec, I, 1));
  DecayFitReport r;
  r.sweep = "psi_I type 1 on [0,1)^d; rdist: J = I + m e0, m = 2..15; ecc: l(J) = 2^-k, k = 0..4, rdist = 4";
  auto add = [&](const DyadicCube& J) {
    const double v = std::abs(inner_product(TI, haar_function(spec, J, 1)));
    r.rows.push_back({ecc(I.to_cube(), J.to_cube()).to_double(), rdist(I.to_cube(), J.to_cube()).to_double(), v});
  };
  for (std::int64_t m = 2; m <= 15; ++m) add(DyadicCube{d, 0, {m, 0, 0}});
  for (int k = 0; k <= 4; ++k) add(DyadicCube{d, -k, {(std::int64_t(4) << k) - 1, 0, 0}});

  if (std::all_of(r.rows.begin(), r.rows.end(), [](const DecayRow& x) { return x.value < 1e-14; }))
    throw Error(ErrorKind::DegenerateSweep, "every pairing is below 1e-14");
  std::vector<double> x, y;
  auto fit = [&](auto pick) {
    x.clear();
    y.clear();
    for (const auto& row : r.rows) {
      const auto [keep, coord] = pick(row);
      if (keep && row.value >= 1e-14) {
        x.push_back(std::log(coord));
        y.push_back(std::log(row.value));
      }
    }
    if (x.size() < 2) throw Error(ErrorKind::DegenerateSweep, "too few nonzero pairings to fit");
    return fit_line(x, y);
  };
  r.rdist_fit = fit([](const DecayRow& row) { return std::pair{row.ecc == 1.0 && row.rdist >= 3.0, row.rdist}; });
  r.ecc_fit = fit([](const DecayRow& row) { return std::pair{row.rdist == 4.0, row.ecc}; });
  return r;
}

std::string format_real(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

void write_profile_csv(std::ostream& out, const CompactnessProfile& p) {
  out << "M,l2_opnorm,weak11_sup,runtime_ms\n";
  for (const auto& r : p.rows)
    out << r.M << ',' << format_real(r.l2_opnorm) << ',' << format_real(r.weak11_sup) << ','
        << (r.runtime_ms ? format_real(*r.runtime_ms) : std::string("NA")) << '\n';
}

void write_profile_csv(const std::filesystem::path& path, const CompactnessProfile& p) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot open " + path.string());
  write_profile_csv(out, p);
  if (!out) throw Error(ErrorKind::Io, "write failed for " + path.string());
}

std::vector<ProfileRow> read_profile_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "M,l2_opnorm,weak11_sup,runtime_ms")
    throw Error(ErrorKind::Parse, "missing profile header");
  std::vector<ProfileRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
    if (f.size() != 4) throw Error(ErrorKind::Parse, "bad profile row '" + line + "'");
    ProfileRow r;
    try {
      r.M = std::stoi(f[0]);
      r.l2_opnorm = std::stod(f[1]);
      r.weak11_sup = std::stod(f[2]);
      if (f[3] != "NA") r.runtime_ms = std::stod(f[3]);
    } catch (const std::logic_error&) {
      throw Error(ErrorKind::Parse, "bad profile row '" + line + "'");
    }
    rows.push_back(r);
  }
  return rows;
}

void write_profile_svg(const std::filesystem::path& path, const CompactnessProfile& p) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot open " + path.string());
  constexpr double W = 640, H = 400, pad = 40;
  double lo = 1e300, hi = -1e300;
  for (const auto& r : p.rows)
    for (double v : {r.l2_opnorm, r.weak11_sup})
      if (v > 0) {
        lo = std::min(lo, std::log10(v));
        hi = std::max(hi, std::log10(v));
      }
  if (lo > hi) lo = hi = 0;
  if (hi - lo < 1e-9) {
    lo -= 0.5;
    hi += 0.5;
  }
  const int m0 = p.rows.empty() ? 0 : p.rows.front().M, m1 = p.rows.empty() ? 1 : p.rows.back().M;
  auto px = [&](int M) { return pad + (W - 2 * pad) * (m1 == m0 ? 0.5 : double(M - m0) / (m1 - m0)); };
  auto py = [&](double v) { return H - pad - (H - 2 * pad) * (std::log10(v) - lo) / (hi - lo); };
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
  out << "<title>" << p.kernel << " B=" << p.spec.B << " R=" << p.spec.R << "</title>\n";
  out << "<rect x=\"" << pad << "\" y=\"" << pad << "\" width=\"" << W - 2 * pad << "\" height=\"" << H - 2 * pad
      << "\" fill=\"none\" stroke=\"#888\"/>\n";
  auto line = [&](auto get, const char* colour) {
    out << "<polyline fill=\"none\" stroke=\"" << colour << "\" points=\"";
    for (const auto& r : p.rows)
      if (get(r) > 0) out << px(r.M) << ',' << py(get(r)) << ' ';
    out << "\"/>\n";
  };
  line([](const ProfileRow& r) { return r.l2_opnorm; }, "#1f77b4");
  line([](const ProfileRow& r) { return r.weak11_sup; }, "#d62728");
  for (const auto& r : p.rows)
    out << "<text x=\"" << px(r.M) << "\" y=\"" << H - pad / 3 << "\" font-size=\"12\">" << r.M << "</text>\n";
  out << "</svg>\n";
  if (!out) throw Error(ErrorKind::Io, "write failed for " + path.string());
}

void write_decay_csv(std::ostream& out, const DecayFitReport& r) {
  out << "ecc,rdist,value\n";
  for (const auto& row : r.rows)
    out << format_real(row.ecc) << ',' << format_real(row.rdist) << ',' << format_real(row.value) << '\n';
}

}  // namespace lagom
