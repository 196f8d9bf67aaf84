#include "lagom/operator.hpp"

namespace lagom {

GridFunction ZeroOperator::apply(const GridFunction& f) const {
  check_same_spec(spec_, f.spec());
  return GridFunction(spec_);
}

complex pairing(const GridOperator& op, const GridFunction& f, const GridFunction& g) {
  check_same_spec(op.spec(), f.spec());
  check_same_spec(op.spec(), g.spec());
  return inner_product(op.apply(f), g);
}

}  // namespace lagom
