#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lagom/bump.hpp"
#include "lagom/grid.hpp"
#include "lagom/operator.hpp"

namespace lagom {

inline constexpr const char* kTestFamilyVersion = "tf-v1";

/// L^1-normalized inputs for the weak-type sup: Haar atoms psi_I for sides
/// 2^-1, 1, 2 and corners -1, 0, 1 (in units of the side, axis 0) that fit
/// the grid, plus the summed bad parts of four seeded random functions
/// decomposed at twice their mean on [-1, 1)^d.
std::vector<GridFunction> default_test_family(const GridSpec& spec, std::uint64_t seed = 1);

struct PowerIterationOptions {
  double tolerance = 1e-6;
  int max_steps = 10000;
  std::uint64_t seed = 1;
};

struct PowerIterationResult {
  double sigma = 0.0;
  int steps = 0;
};

/// Largest singular value of P_M^perp A by power iteration on A^* P_M^perp A,
/// started from a seeded uniform vector. Throws NonConvergence.
PowerIterationResult lagom_tail_norm(const GridOperator& A, int M, const PowerIterationOptions& opt = {});

struct ProfileRow {
  int M = 0;
  double l2_opnorm = 0.0;
  double weak11_sup = 0.0;
  std::optional<double> runtime_ms;
};

struct CompactnessProfile {
  std::string kernel;
  GridSpec spec;
  std::string family_version = kTestFamilyVersion;
  std::vector<ProfileRow> rows;
};

struct ProfileOptions {
  PowerIterationOptions power;
  bool timing = false;
};

CompactnessProfile compactness_profile(const GridOperator& A, std::span<const int> Ms,
                                       std::span<const GridFunction> family, const ProfileOptions& opt = {});

struct DecayRow {
  double ecc = 0.0;
  double rdist = 0.0;
  double value = 0.0;
};

struct DecayFitReport {
  std::vector<DecayRow> rows;
  LineFit rdist_fit;  // log value against log rdist at ecc = 1
  LineFit ecc_fit;    // log value against log ecc at rdist = 4
  std::string sweep;
};

/// |<T psi_I, psi_J>| with I = [0, 1)^d and type-1 Haar functions. rdist sweep:
/// J = I + m e_0 for m = 2..15 (rdist 3..16). ecc sweep: l(J) = 2^-k, k = 0..4,
/// with J flush against the far face of [0, 4) so that rdist = 4. Throws
/// DegenerateSweep when every value is below 1e-14.
DecayFitReport decay_fit(const GridOperator& T);

void write_profile_csv(std::ostream& out, const CompactnessProfile& p);
void write_profile_csv(const std::filesystem::path& path, const CompactnessProfile& p);
std::vector<ProfileRow> read_profile_csv(std::istream& in);
void write_profile_svg(const std::filesystem::path& path, const CompactnessProfile& p);
void write_decay_csv(std::ostream& out, const DecayFitReport& r);

/// Shortest round-trip decimal form used in every CSV.
std::string format_real(double x);

}  // namespace lagom
