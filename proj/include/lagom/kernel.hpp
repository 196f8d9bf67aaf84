#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lagom/bump.hpp"
#include "lagom/geometry.hpp"
#include "lagom/grid.hpp"
#include "lagom/kernels.hpp"
#include "lagom/operator.hpp"

namespace lagom {

enum class AdmissibleFamily {
  PowerDecay,      // (1 + x)^-gamma
  PowerGrowthCap,  // x^gamma / (1 + x^gamma)
  Constant,        // 1
};

struct AdmissibleFunction {
  AdmissibleFamily family = AdmissibleFamily::Constant;
  double gamma = 1.0;

  double operator()(double x) const;
  std::string to_string() const;  // "power-decay:0.5", "constant"
  static AdmissibleFunction parse(std::string_view text);

  static AdmissibleFunction power_decay(double g) { return {AdmissibleFamily::PowerDecay, g}; }
  static AdmissibleFunction power_growth_cap(double g) { return {AdmissibleFamily::PowerGrowthCap, g}; }
  static AdmissibleFunction constant() { return {AdmissibleFamily::Constant, 1.0}; }
};

struct AdmissibleTriple {
  AdmissibleFunction L = AdmissibleFunction::constant();
  AdmissibleFunction S = AdmissibleFunction::constant();
  AdmissibleFunction D = AdmissibleFunction::constant();
};

struct AdmissibleReport {
  double bound = 0.0;      // max over the sample points of all three functions
  double L_tail = 0.0;     // L(2^40)
  double S_tail = 0.0;     // S(2^-40)
  double D_tail = 0.0;     // D(2^40)
  bool L_ok = false, S_ok = false, D_ok = false;
  bool admissible() const { return L_ok && S_ok && D_ok; }
};

inline constexpr double kAdmissibleTailTolerance = 1e-3;

/// Samples at 2^k, |k| <= 40; throws NonFinite on a non-finite value.
AdmissibleReport check_admissible(const AdmissibleTriple& t);

using KernelFn = std::function<double(const Point& t, const Point& x)>;
using ScalarFn = std::function<double(double)>;

/// Kernel K(t, x) with its smoothness data. One-dimensional kernels that
/// factor as g(t - x) w(t + x) carry the factors, which the discretization
/// uses for matrix-free products.
struct CompactCZKernel {
  std::string name;
  int d = 1;
  double delta = 0.25;
  double C = 1.0;
  AdmissibleTriple triple;
  bool standard_only = false;  // F == 1: a classical kernel used as a control
  bool antisymmetric = false;
  KernelFn eval;
  ScalarFn diff_factor;  // g
  ScalarFn sum_factor;   // w, empty when w == 1

  double operator()(const Point& t, const Point& x) const { return eval(t, x); }
  /// F(t, x) = L(|t-x|) S(|t-x|) D(|t+x|).
  double F(const Point& t, const Point& x) const;
  bool separable() const { return static_cast<bool>(diff_factor); }
};

/// compact-1d, control-1d and compact-2d with their default parameters.
std::vector<CompactCZKernel> builtin_kernels();
/// A built-in by name, optionally with a replaced triple and delta.
CompactCZKernel make_kernel(std::string_view name, const std::optional<AdmissibleTriple>& triple = {},
                            std::optional<double> delta = {});

/// Triple of compact-1d, also the default weak triple.
AdmissibleTriple default_triple();

struct SmoothnessReport {
  double constant = 0.0;
  std::size_t samples = 0;
};

/// max |K(t,x) - K(t',x')| / ((|t-t'| + |x-x'|)^delta |t-x|^{-d-delta} F(t,x)) over
/// seeded random quadruples with 2(|t-t'| + |x-x'|) < |t-x|.
SmoothnessReport check_smoothness(const CompactCZKernel& k, std::size_t n_samples, std::uint64_t seed = 1);

/// L_K(l) S_K(l) D_K(rdist(I,B)) + L_W(l/2^M) S_W(2^M l) D_W(rdist(I, B_{2^M}) / M).
double F_single(const Cube& cube, int M, const AdmissibleTriple& kernel, const AdmissibleTriple& weak);
/// Products of sums over the cubes, kernel part plus weak part with rdist(I_i, B) / M.
double F_six(std::span<const Cube> cubes, int M, const AdmissibleTriple& kernel, const AdmissibleTriple& weak);

/// Cubes outside D_M along three routes, four each: side 2^{M+1..M+4} and
/// 2^{-M-1..-M-4} with corner at the origin, and unit cubes at distance
/// (M+1..M+4) 2^M along axis 0. Version tag kEscapeFamilyVersion.
std::vector<DyadicCube> escape_family(int M, int d);
inline constexpr const char* kEscapeFamilyVersion = "escape-v1";

/// max over the escape family at M of F_six with all six cubes equal, the
/// weak parameter held at weak_M.
double F_six_escape_sup(int M, const AdmissibleTriple& kernel, const AdmissibleTriple& weak, int weak_M = 1);

enum class DiagonalPolicy { Zero, ExcludeRing };

struct DiagonalRule {
  DiagonalPolicy policy = DiagonalPolicy::Zero;
  int ring = 0;  // cells with |i - j|_inf <= ring are zeroed under ExcludeRing
  std::string to_string() const;
};

inline constexpr std::size_t kDenseEntryLimit = std::size_t(1) << 26;

/// Midpoint discretization of K on a grid: (T f)(x_i) = h^d sum_j K(t_j, x_i) f(t_j).
class DiscretizedOperator final : public GridOperator {
 public:
  enum class Storage { Dense, ToeplitzHankel, ToeplitzFft };

  DiscretizedOperator(const CompactCZKernel& kernel, const GridSpec& spec, DiagonalRule rule = {},
                      Exec exec = Exec::Parallel);

  const GridSpec& spec() const override { return spec_; }
  GridFunction apply(const GridFunction& f) const override;
  GridFunction apply_adjoint(const GridFunction& f) const override;
  std::string id() const override { return name_; }

  Storage storage() const noexcept { return storage_; }
  const DiagonalRule& rule() const noexcept { return rule_; }
  /// Table entry A[i][j] = K(t_j, x_i) (or zero under the diagonal rule).
  double entry(std::size_t i, std::size_t j) const;
  /// Operator with the transposed table.
  DiscretizedOperator transpose() const;
  void set_exec(Exec e) { exec_ = e; }

  /// Row-major table as little-endian doubles after an int32 d, B, R header.
  void write_table(const std::filesystem::path& path) const;

 private:
  DiscretizedOperator() = default;
  void apply_real(std::span<const double> x, std::span<double> y, bool adjoint) const;

  GridSpec spec_;
  std::string name_;
  DiagonalRule rule_;
  Storage storage_ = Storage::Dense;
  Exec exec_ = Exec::Parallel;
  std::size_t n_ = 0;
  std::vector<double> dense_;
  std::vector<double> g_, g_adj_, w_;  // Toeplitz / Hankel symbols, length 2n - 1
  std::shared_ptr<kernels::ToeplitzFft> fft_, fft_adj_;
};

/// max over the escape family (cubes resolved by at least four cells per side
/// and inside the box) of |<T phi_I, psi_I>| with phi_I a polydecay and psi_I
/// a mean-zero polydecay bump, both L^2-normalized.
double weak_compactness_scan(const GridOperator& op, int M, int order = 4);

}  // namespace lagom
