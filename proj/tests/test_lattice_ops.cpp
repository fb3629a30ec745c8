#include "doctest.h"
#include "lpkdv/errors.hpp"
#include "lpkdv/lattice_ops.hpp"

using namespace lpkdv;
using namespace lpkdv::ops;

namespace {

Sequence1D seq(long first, std::initializer_list<long> v) {
  std::vector<Rational> r;
  for (long x : v) r.emplace_back(x);
  return Sequence1D(first, std::move(r));
}

Sequence1D seq_r(long first, std::vector<Rational> v) { return Sequence1D(first, std::move(v)); }

}  // namespace

TEST_SUITE("lattice_ops") {
  TEST_CASE("sequence window and indexing") {
    const auto s = seq(3, {5, 6, 7});
    CHECK(s.first() == 3);
    CHECK(s.last() == 5);
    CHECK(s.at(4) == 6);
    CHECK_THROWS_AS(s.at(6), IndexError);
    CHECK_THROWS_AS(s.at(2), IndexError);
    CHECK_THROWS_AS(Sequence1D(0, {}), PreconditionError);
  }

  TEST_CASE("forward differences") {
    CHECK(forward_difference(seq(0, {0, 1, 2, 3}), 1) == seq(0, {1, 1, 1}));
    CHECK(forward_difference(seq(0, {0, 1, 4, 9}), 2) == seq(0, {2, 2}));
    CHECK(forward_difference(seq(0, {1, 2, 4, 8, 16}), 3) == seq(0, {1, 2}));
    CHECK(forward_difference(seq(0, {4, 7}), 0) == seq(0, {4, 7}));
    try {
      (void)forward_difference(seq(0, {1, 2, 3}), 3);
      FAIL("expected a domain error");
    } catch (const DomainError& e) {
      CHECK(std::string(e.what()).find("need at least 4") != std::string::npos);
    }
    CHECK_THROWS_AS(forward_difference(seq(0, {1, 2}), -1), DomainError);
  }

  TEST_CASE("slowness order") {
    CHECK(slowness_order(seq(0, {3, 3, 3, 3}), 2).order() == 0);
    CHECK(slowness_order(seq(0, {0, 1, 2, 3, 4}), 3).order() == 1);
    const auto inf = slowness_order(seq(0, {1, 2, 4, 8, 16, 32, 64, 128}), 5);
    CHECK_FALSE(inf.is_finite());
    CHECK(inf.describe() == "infinite (beyond 5)");
    CHECK_THROWS_AS((void)inf.order(), DomainError);
    CHECK_THROWS_AS(slowness_order(seq(0, {1, 2, 3}), 2), PreconditionError);
  }

  TEST_CASE("formal derivative") {
    CHECK(formal_derivative(seq(0, {0, 1, 2, 3}), SlownessOrder::finite(1)) == seq(0, {1, 1, 1}));
    // u_n = n^2: 2n.
    CHECK(formal_derivative(seq(0, {0, 1, 4, 9, 16}), SlownessOrder::finite(2)) == seq(0, {0, 2, 4}));
    CHECK(formal_derivative(seq(0, {5, 5, 5}), SlownessOrder::finite(0)) == seq(0, {0, 0, 0}));
    try {
      (void)formal_derivative(seq(0, {1, 2, 4}), SlownessOrder::beyond(1));
      FAIL("expected a domain error");
    } catch (const DomainError& e) {
      CHECK(std::string(e.what()).find("truncation order required") != std::string::npos);
    }
  }

  TEST_CASE("formal derivative matches the continuum derivative on polynomials") {
    for (int d = 1; d <= 6; ++d) {
      std::vector<Rational> c;
      for (int k = 0; k <= d; ++k) c.emplace_back(Rational(k * k - 3, 2 * k + 1));
      const Polynomial P(c);
      const auto s = P.sample(-4, static_cast<std::size_t>(d + 6));
      CHECK(formal_derivative(s, SlownessOrder::finite(d)) == P.derivative().sample(-4, 6));
    }
  }

  TEST_CASE("Stirling tables") {
    const auto t = stirling_tables(8);
    CHECK(t.second_kind(4, 2) == 7);
    CHECK(t.first_kind(2, 1) == -1);
    CHECK(t.first_kind(2, 2) == 1);
    CHECK(t.first_kind(1, 1) == 1);
    CHECK(t.second_kind(1, 1) == 1);
    for (int i = 1; i <= 8; ++i) {
      CHECK(t.first_kind(i, i) == 1);
      CHECK(t.second_kind(i, i) == 1);
      CHECK(t.second_kind(i, 1) == 1);
      for (int k = 1; k <= i; ++k) {
        // Signed convention: sign (-1)^(i-k).
        CHECK((t.first_kind(i, k) == 0 || (t.first_kind(i, k) > 0) == ((i - k) % 2 == 0)));
        if (i >= 2) {
          CHECK(t.first_kind(i, k) == t.first_kind(i - 1, k - 1) - Integer(i - 1) * t.first_kind(i - 1, k));
          CHECK(t.second_kind(i, k) == Integer(k) * t.second_kind(i - 1, k) + t.second_kind(i - 1, k - 1));
        }
      }
    }
    // The two kinds are inverse matrices.
    for (int i = 0; i <= 8; ++i)
      for (int j = 0; j <= 8; ++j) {
        Integer s = 0;
        for (int k = 0; k <= 8; ++k) s += t.first_kind(i, k) * t.second_kind(k, j);
        CHECK(s == (i == j ? 1 : 0));
      }
    CHECK_THROWS_AS(t.first_kind(9, 1), IndexError);
    CHECK_THROWS_AS(StirlingTable(0), DomainError);
  }

  TEST_CASE("scale ratio") {
    CHECK(ScaleRatio(2, 5).value() == Rational(2, 5));
    CHECK(ScaleRatio(1, 3).is_sublattice());
    CHECK_FALSE(ScaleRatio(2, 5).is_sublattice());
    CHECK_THROWS_AS(ScaleRatio(3, 2), DomainError);
    CHECK_THROWS_AS(ScaleRatio(0, 2), DomainError);
  }

  TEST_CASE("P coefficients") {
    const auto t = stirling_tables(6);
    for (auto [M, N] : {std::pair{1L, 1L}, {1L, 2L}, {1L, 3L}, {2L, 5L}}) {
      const ScaleRatio h(M, N);
      const Rational hv = h.value();
      CHECK(p_coefficient(1, 1, h, t) == hv);
      CHECK(p_coefficient(2, 1, h, t) == hv * hv - hv);
      Rational hi = 1;
      for (int i = 1; i <= 6; ++i) {
        hi *= hv;
        CHECK(p_coefficient(i, i, h, t) == hi);
      }
    }
    CHECK_THROWS_AS(p_coefficient(2, 3, ScaleRatio(1, 2), t), IndexError);
    CHECK_THROWS_AS(p_coefficient(7, 1, ScaleRatio(1, 2), t), IndexError);
  }

  TEST_CASE("cross-lattice differences") {
    const ScaleRatio half(1, 2);
    CHECK(cross_lattice_difference(seq(0, {0, 1, 2, 3}), half, 1, 1) == seq_r(0, {Rational(1, 2), Rational(1, 2), Rational(1, 2)}));
    // u = n1^2: n1 + 1/4.
    CHECK(cross_lattice_difference(seq(0, {0, 1, 4, 9, 16}), half, 1, 2) ==
          seq_r(0, {Rational(1, 4), Rational(5, 4), Rational(9, 4)}));
    for (int j = 1; j <= 3; ++j) CHECK(cross_lattice_difference(seq(0, {7, 7, 7, 7}), ScaleRatio(2, 5), j, 0).identically_zero());
    CHECK_THROWS_AS(cross_lattice_difference(seq(0, {1, 2}), half, 1, 3), DomainError);
    CHECK_THROWS_AS(cross_lattice_difference(seq(0, {1, 2, 4, 8, 16}), half, 1, 1), PreconditionError);
  }

  TEST_CASE("cross-lattice difference with h = 1 is the plain forward difference") {
    const auto s = seq(0, {0, 1, 8, 27, 64, 125});
    const auto got = cross_lattice_difference(s, ScaleRatio(1, 1), 2, 3);
    CHECK(got == seq(0, {6, 12, 18}));
  }

  TEST_CASE("shift decomposition") {
    const Rational one = 1;
    CHECK(verify_shift_decomposition({{1, 0, one}, {0, 1, one}}, ScaleRatio(1, 2)));
    CHECK(verify_shift_decomposition({{0, 2, one}}, ScaleRatio(1, 3)));
    CHECK(verify_shift_decomposition({{1, 1, one}}, ScaleRatio(1, 2)));
    for (int d = 0; d <= 5; ++d)
      for (auto [M, N] : {std::pair{1L, 1L}, {1L, 2L}, {1L, 3L}, {2L, 5L}}) CHECK(verify_shift_decomposition(d, ScaleRatio(M, N)));
  }
}
