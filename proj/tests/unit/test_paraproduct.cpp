#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>

#include "../common.hpp"
#include "lagom/paraproduct.hpp"

using namespace lagom;
using testing::max_abs_diff;
using testing::random_function;
using testing::thrown_kind;
using testing::unit;

namespace {

// Random wavelet coefficients on a few cubes, scaling part zero.
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

GridFunction ones(const GridSpec& s) {
  GridFunction f(s);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = 1.0;
  return f;
}

const BumpProfile kSmooth{ProfileKind::Polydecay, 4, 1.0};

}  // namespace

TEST_CASE("action on constants") {
  std::mt19937_64 gen(1);
  for (int d = 1; d <= 2; ++d) {
    const GridSpec s{d, 2, 2};
    const ParaproductSymbol sym{random_symbol(s, gen, 20), {}};
    const auto bfun = synthesize(sym.b);
    for (int n = 0; n < 5; ++n) {
      const auto g = random_function(s, gen);
      const complex lhs = inner_product(apply(sym, ones(s)), g), rhs = inner_product(bfun, g);
      CHECK(std::abs(lhs - rhs) <= 1e-10 * std::max(1.0, std::abs(rhs)));
      const auto f = random_function(s, gen);
      CHECK(std::abs(inner_product(apply(sym, f), ones(s))) <= 1e-10 * lp_norm(f, 2));
    }
  }
}

TEST_CASE("one-term symbols") {
  std::mt19937_64 gen(2);
  const GridSpec s{1, 2, 3};
  const DyadicCube J{1, -1, {3}};
  const complex beta(0.75, -0.5);
  HaarCoefficients b(s);
  b.set(J, 1, beta);
  const auto f = random_function(s, gen);
  const auto psi = haar_function(s, J, 1);

  const auto phi = (1.0 / J.to_cube().volume().to_double()) * indicator(J.to_cube(), s);
  CHECK(max_abs_diff(apply(ParaproductSymbol{b, {}}, f), beta * inner_product(f, phi) * psi) < 1e-14);

  const auto smooth = Bump(J.to_cube(), kSmooth).sample(s);
  CHECK(max_abs_diff(apply(ParaproductSymbol{b, kSmooth}, f), beta * inner_product(f, smooth) * psi) < 1e-13);
  // T_b^* g = conj(beta) <g, psi_J> phi_J
  CHECK(max_abs_diff(apply_adjoint(ParaproductSymbol{b, {}}, f), std::conj(beta) * inner_product(f, psi) * phi) < 1e-14);

  CHECK(lp_norm(apply(ParaproductSymbol{HaarCoefficients(s), {}}, f), 2) == 0.0);
  CHECK(lp_norm(apply_adjoint(ParaproductSymbol{HaarCoefficients(s), kSmooth}, f), 2) == 0.0);
  CHECK(rank_bound(ParaproductSymbol{b, {}}) == 1);
  CHECK(thrown_kind([&] { apply(ParaproductSymbol{b, {}}, GridFunction(GridSpec{1, 2, 2})); }) == ErrorKind::SpecMismatch);
  CHECK(thrown_kind([&] {
          apply(ParaproductSymbol{b, BumpProfile{ProfileKind::MeanZeroPolydecay, 4, 1.0}}, f);
        }) == ErrorKind::InvalidArgument);
}

TEST_CASE("adjoint pairing on random pairs") {
  std::mt19937_64 gen(3);
  for (int n = 0; n < 50; ++n) {
    const int d = 1 + n % 2;
    const GridSpec s{d, 1, 2};
    const ParaproductSymbol sym{random_symbol(s, gen, 12), n % 5 == 0 ? std::optional(kSmooth) : std::nullopt};
    const auto f = random_function(s, gen), g = random_function(s, gen);
    const complex a = inner_product(apply(sym, f), g), b = inner_product(f, apply_adjoint(sym, g));
    REQUIRE(std::abs(a - b) <= 1e-10 * std::max(1.0, std::abs(a)));
    const ParaproductOperator T(sym);
    REQUIRE(std::abs(pairing(T, f, g) - std::conj(pairing(ParaproductOperator(sym, true), g, f))) <=
            1e-10 * std::max(1.0, std::abs(a)));
  }
}

TEST_CASE("rank is at most the number of coefficients") {
  std::mt19937_64 gen(4);
  const GridSpec s{1, 2, 2};
  const ParaproductSymbol sym{random_symbol(s, gen, 5), {}};
  const std::size_t n = s.cell_count();
  Eigen::MatrixXcd A(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    GridFunction e(s);
    e[j] = 1.0;
    const auto col = apply(sym, e);
    for (std::size_t i = 0; i < n; ++i) A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = col[i];
  }
  Eigen::FullPivLU<Eigen::MatrixXcd> lu(A);
  lu.setThreshold(1e-12);
  CHECK(static_cast<std::size_t>(lu.rank()) <= rank_bound(sym));
  CHECK(rank_bound(sym) <= 5);
}

TEST_CASE("lagom commutation") {
  std::mt19937_64 gen(5);
  for (int d = 1; d <= 2; ++d)
    for (int M = 1; M <= 2; ++M) {
      const GridSpec s{d, M + 1, 2};
      for (int n = 0; n < 5; ++n) {
        const ParaproductSymbol sym{random_symbol(s, gen, 30), n == 4 ? std::optional(kSmooth) : std::nullopt};
        const auto f = random_function(s, gen);
        CHECK(lagom_commutation_check(sym, M, f) < 1e-10 * lp_norm(f, 2));
      }
      // symbol supported in D_M: both sides vanish
      const LagomProjector P(s, M);
      const ParaproductSymbol inside{P.restrict(random_symbol(s, gen, 40), true), {}};
      const auto f = random_function(s, gen);
      CHECK(lp_norm(P.complement(apply(inside, f)), 2) < 1e-12 * lp_norm(f, 2));
      CHECK(lagom_commutation_check(inside, M, f) < 1e-12 * lp_norm(f, 2));
    }
  CHECK(thrown_kind([] {
          const GridSpec s{1, 1, 2};
          lagom_commutation_check(ParaproductSymbol{HaarCoefficients(s), {}}, 3, GridFunction(s));
        }) == ErrorKind::BoxTooSmall);
}

TEST_CASE("counterexample operator") {
  const GridSpec s{1, 3, 4};
  const auto T = counterexample_operator(s);
  std::mt19937_64 gen(6);
  const auto f = random_function(s, gen);
  const auto psi = haar_function(s, DyadicCube{1, 0, {0}}, 1);
  const auto chi = indicator(DyadicCube{1, 0, {0}}.to_cube(), s);
  CHECK(max_abs_diff(T.apply(f), inner_product(f, psi) * chi) < 1e-14);
  CHECK(max_abs_diff(T.apply(psi), chi) == 0.0);
  CHECK(T.id() == "counterexample");
  CHECK(thrown_kind([] { counterexample_operator(GridSpec{2, 3, 4}); }) == ErrorKind::DimensionMismatch);
  CHECK(thrown_kind([] { counterexample_operator(GridSpec{1, 3, 0}); }) == ErrorKind::InvalidArgument);

  for (int M = 2; M <= 6; ++M) {
    const auto rep = run_counterexample(M);
    CHECK(rep.image.spec() == GridSpec{1, M + 2, 4});
    CHECK(rep.max_cell_error < 1e-12);
    CHECK(rep.weak_quasinorm == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(lp_norm(rep.expected, 1) == 1.0);
  }
}

TEST_CASE("counterexample closed form at M = 1" * doctest::should_fail()) {
  // (0,2) is not in D_1, so P_1^perp keeps its coefficient and the image is chi_[0,1) / 2 + chi_(0,2) / 2.
  const auto rep = run_counterexample(1);
  CHECK(rep.max_cell_error < 1e-12);
}

TEST_CASE("counterexample at M = 1 keeps unit weak norm") {
  const auto rep = run_counterexample(1);
  CHECK(rep.max_cell_error == doctest::Approx(0.5));
  CHECK(rep.weak_quasinorm == doctest::Approx(1.0).epsilon(1e-12));
}
