#pragma once

#include <string>

#include "lagom/grid.hpp"

namespace lagom {

/// Linear map on grid functions of one GridSpec.
class GridOperator {
 public:
  virtual ~GridOperator() = default;

  virtual const GridSpec& spec() const = 0;
  virtual GridFunction apply(const GridFunction& f) const = 0;
  virtual GridFunction apply_adjoint(const GridFunction& f) const = 0;
  virtual std::string id() const = 0;
};

class ZeroOperator final : public GridOperator {
 public:
  explicit ZeroOperator(GridSpec spec) : spec_(spec) {}
  const GridSpec& spec() const override { return spec_; }
  GridFunction apply(const GridFunction& f) const override;
  GridFunction apply_adjoint(const GridFunction& f) const override { return apply(f); }
  std::string id() const override { return "zero"; }

 private:
  GridSpec spec_;
};

/// <T f, g> = integral of (T f) conj(g).
complex pairing(const GridOperator& op, const GridFunction& f, const GridFunction& g);

}  // namespace lagom
