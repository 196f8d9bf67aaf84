#pragma once

#include <optional>

#include "lagom/bump.hpp"
#include "lagom/haar.hpp"
#include "lagom/operator.hpp"

namespace lagom {

/// Symbol b of T_b f = sum_J <b, psi_J> <f, phi_J> psi_J. Without a profile
/// phi_J = |J|^-1 chi_J; otherwise phi_J is the L^1-normalized bump on J.
/// Scaling coefficients of b play no part.
struct ParaproductSymbol {
  HaarCoefficients b;
  std::optional<BumpProfile> smoothing;

  const GridSpec& spec() const { return b.spec(); }
};

GridFunction apply(const ParaproductSymbol& sym, const GridFunction& f, Exec exec = Exec::Parallel);
/// T_b^* g = sum_J conj(<b, psi_J>) <g, psi_J> phi_J.
GridFunction apply_adjoint(const ParaproductSymbol& sym, const GridFunction& g, Exec exec = Exec::Parallel);

/// ||P_M^perp T_b f - T_{P_M^perp b} f||_2.
double lagom_commutation_check(const ParaproductSymbol& sym, int M, const GridFunction& f,
                               Exec exec = Exec::Parallel);

/// Number of nonzero wavelet coefficients, an upper bound for the rank of T_b.
std::size_t rank_bound(const ParaproductSymbol& sym);

class ParaproductOperator final : public GridOperator {
 public:
  explicit ParaproductOperator(ParaproductSymbol sym, bool adjoint = false, std::string id = "paraproduct")
      : sym_(std::move(sym)), adjoint_(adjoint), id_(std::move(id)) {}

  const GridSpec& spec() const override { return sym_.spec(); }
  GridFunction apply(const GridFunction& f) const override;
  GridFunction apply_adjoint(const GridFunction& f) const override;
  std::string id() const override { return id_; }

  const ParaproductSymbol& symbol() const noexcept { return sym_; }

 private:
  ParaproductSymbol sym_;
  bool adjoint_;
  std::string id_;
};

/// f -> <f, psi_[0,1)> chi_[0,1) on a one-dimensional grid, i.e. T_b^* with b = psi_[0,1).
ParaproductOperator counterexample_operator(const GridSpec& spec);

struct CounterexampleReport {
  int M = 0;
  GridFunction image;            // P_M^perp T psi_[0,1)
  GridFunction expected;         // 2^-M chi_(0, 2^M)
  double max_cell_error = 0.0;
  double weak_quasinorm = 0.0;   // of image
};

/// Runs the counterexample on the grid B = M + 2, R = 4 unless a spec is given.
CounterexampleReport run_counterexample(int M, std::optional<GridSpec> spec = {});

}  // namespace lagom
