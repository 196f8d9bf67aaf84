#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "lagom/geometry.hpp"
#include "lagom/grid.hpp"

namespace lagom {

using Point = std::array<double, kMaxDim>;
using MultiIndex = std::array<int, kMaxDim>;

enum class ProfileKind {
  Polydecay,          // prod_a (1 + u_a^2)^{-N/2}
  MeanZeroPolydecay,  // difference of two polydecay profiles shifted by +-1/4 along axis 0
};

struct BumpProfile {
  ProfileKind kind = ProfileKind::Polydecay;
  int order = 4;   // N
  double p = 2.0;  // normalization exponent, infinity allowed

  std::string name() const;
  static ProfileKind parse_kind(std::string_view text);
};

/// L^p-normalized bump adapted to a cube, with analytic derivatives up to
/// second order along each axis.
class Bump {
 public:
  Bump(const Cube& cube, const BumpProfile& profile);

  const Cube& cube() const noexcept { return cube_; }
  const BumpProfile& profile() const noexcept { return profile_; }

  double operator()(const Point& x) const { return derivative(x, {}); }
  /// d^alpha phi at x; each alpha_a in 0..2.
  double derivative(const Point& x, const MultiIndex& alpha) const;

  GridFunction sample(const GridSpec& spec) const;

 private:
  Cube cube_;
  BumpProfile profile_;
  Point center_{};
  double side_ = 1.0;
  double amplitude_ = 1.0;
};

/// Bump sampled at cell centres. The cube must lie inside the grid box.
GridFunction make_bump(const Cube& cube, const BumpProfile& profile, const GridSpec& spec);

/// Derivative oracle: (x, alpha) -> d^alpha f(x).
using DerivativeOracle = std::function<double(const Point&, const MultiIndex&)>;

struct AdaptednessReport {
  double constant = 0.0;
  std::size_t points = 0;
  Point worst_point{};
  MultiIndex worst_alpha{};
};

/// Smallest C with |d^alpha f(x)| <= C |I|^{-1/p} l(I)^{-|alpha|} (1 + |x - c(I)|_inf / l(I))^{-N}
/// over a fixed lattice of sample points around I and all |alpha| <= max_order (<= 2).
AdaptednessReport adaptedness_constant(const DerivativeOracle& f, const Cube& cube, double p, int N,
                                       int max_order = 2);
AdaptednessReport adaptedness_constant(const Bump& bump, int N, int max_order = 2);

struct BoundCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
};

/// |<phi_I, psi_J>| against C^2 (|J|/|I|)^{1/2} (1 + |c(I)-c(J)|_inf/l(I))^{-N}, or with
/// exponents 1/2 + 1/d and -N + d when psi_J has mean zero. Requires l(J) <= l(I).
BoundCheck check_interaction_bound(const Bump& phi_i, const Bump& psi_j, bool mean_zero,
                                   const GridSpec& spec, double constant);

/// |<f, phi_J>| |J|^{1/2} for f supported in I with mean zero, against
/// C ||f||_1 (1 + |c(I)-c(J)|_inf / l(I))^{-N} when l(J) <= l(I) and against
/// C ||f||_1 (l(I)/l(J)) (1 + |c(I)-c(J)|_inf / l(J))^{-N} otherwise.
BoundCheck check_atom_bound(const GridFunction& f, const Cube& support, const Bump& phi_j,
                            double constant);

struct SweepRow {
  std::string lemma;
  int d = 1;
  int k = 0;  // scale gap l(I) / l(J) = 2^k
  int m = 0;  // separation in units of the larger cube
  int e = 0;  // l(J) / l(I) = 2^e
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
};

struct SweepConfig {
  int d = 1;
  int order = 4;
  int max_k = 5;
  int max_m = 16;
  int max_e = 5;
};

/// Interaction sweeps: "interaction-ecc" (mean-zero psi_J nested in I, l(J) = 2^-k)
/// and "interaction-sep" (equal sizes, J shifted by m l(I)).
std::vector<SweepRow> sweep_interaction(const SweepConfig& cfg, Exec exec = Exec::Parallel);
/// Atom sweeps: "atom-scale" (Haar atom on I, l(J) = 2^e l(I)) and "atom-sep"
/// (equal sizes, J shifted by m l(I)).
std::vector<SweepRow> sweep_atom(const SweepConfig& cfg, Exec exec = Exec::Parallel);

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double rms = 0.0;
};

/// Least squares y = slope x + intercept.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

/// log lhs against log ecc for "interaction-ecc" (ecc = 2^-dk) and
/// "atom-scale" (ecc = 2^-de), or against log(1 + m) for the separation sweeps.
/// Rows whose swept parameter (k, e or m) is below from are left out.
LineFit sweep_fit(const std::vector<SweepRow>& rows, std::string_view lemma, int from = 0);

}  // namespace lagom
