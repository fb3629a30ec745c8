#pragma once

// Exact finite-difference calculus on a lattice and between a lattice and
// its dilation. Everything here is rational arithmetic; no floating point.

#include <boost/multiprecision/cpp_int.hpp>

#include <optional>
#include <string>
#include <vector>

namespace lpkdv::ops {

using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Values u_n on the contiguous window [first, first + size).
class Sequence1D {
 public:
  /// Throws PreconditionError on an empty value list.
  Sequence1D(long first, std::vector<Rational> values);

  long first() const noexcept { return first_; }
  long last() const noexcept { return first_ + static_cast<long>(values_.size()) - 1; }
  std::size_t size() const noexcept { return values_.size(); }
  const std::vector<Rational>& values() const noexcept { return values_; }
  /// u_n for first() <= n <= last(); IndexError otherwise.
  const Rational& at(long n) const;

  bool identically_zero() const;
  friend bool operator==(const Sequence1D&, const Sequence1D&) = default;

 private:
  long first_;
  std::vector<Rational> values_;
};

/// Dense polynomial c_0 + c_1 x + ... with rational coefficients.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<Rational> coefficients);

  int degree() const noexcept;
  const std::vector<Rational>& coefficients() const noexcept { return coeffs_; }
  Rational operator()(const Rational& x) const;
  Polynomial derivative() const;

  /// Samples p(n) for n in [first, first + count).
  Sequence1D sample(long first, std::size_t count) const;
  /// Samples p(n * h) for n in [first, first + count).
  Sequence1D sample_scaled(long first, std::size_t count, const Rational& h) const;

 private:
  std::vector<Rational> coeffs_;
};

/// h = M/N with 0 < h <= 1.
class ScaleRatio {
 public:
  ScaleRatio(long M, long N);
  long M() const noexcept { return M_; }
  long N() const noexcept { return N_; }
  const Rational& value() const noexcept { return h_; }
  /// True when the coarse lattice is an integer sublattice (h = 1/M').
  bool is_sublattice() const;

 private:
  long M_, N_;
  Rational h_;
};

/// Order l of a slow-varying sequence: Delta^{l+1} u == 0. Empty order
/// means no such l was found up to tested_up_to().
class SlownessOrder {
 public:
  static SlownessOrder finite(int order);
  static SlownessOrder beyond(int max_tested);

  bool is_finite() const noexcept { return order_.has_value(); }
  /// Throws DomainError when infinite.
  int order() const;
  int tested_up_to() const noexcept { return tested_; }
  std::string describe() const;

  friend bool operator==(const SlownessOrder&, const SlownessOrder&) = default;

 private:
  std::optional<int> order_;
  int tested_ = 0;
};

/// Signed Stirling numbers of the first kind s(i, k) and Stirling numbers
/// of the second kind S(k, j), 0 <= k, j <= i <= max_order.
class StirlingTable {
 public:
  explicit StirlingTable(int max_order);

  int max_order() const noexcept { return max_order_; }
  const Integer& first_kind(int i, int k) const;
  const Integer& second_kind(int k, int j) const;

 private:
  int max_order_;
  std::vector<std::vector<Integer>> first_;
  std::vector<std::vector<Integer>> second_;
};

/// Delta^j u, window shrinks by j on the right.
Sequence1D forward_difference(const Sequence1D& seq, int j);

/// Smallest l <= max_test with Delta^{l+1} u == 0 on the window.
SlownessOrder slowness_order(const Sequence1D& seq, int max_test);

/// delta_n u = sum_{i=1}^{l} (-1)^{i-1} Delta^i u / i. Output window shrinks
/// by l on the right.
Sequence1D formal_derivative(const Sequence1D& seq, const SlownessOrder& order);

StirlingTable stirling_tables(int max_order);

/// P_{i,j} = sum_{k=j}^{i} h^k s(i,k) S(k,j).
Rational p_coefficient(int i, int j, const ScaleRatio& h, const StirlingTable& tables);

/// Fine-lattice difference Delta_n^j u at the coarse points n1 of u_slow,
/// where the fine lattice is n1 = n h:
///   Delta_n^j u = j! sum_{i=j}^{l} P_{i,j}/i! Delta_{n1}^i u.
/// Output window shrinks by l.
Sequence1D cross_lattice_difference(const Sequence1D& u_slow, const ScaleRatio& h, int j,
                                    int order);

/// Checks T_n u = T_fast * T_slow^{(h)} u exactly for u(n; n1) a polynomial of
/// total degree poly_degree, with the slow partial shift built from the
/// truncated series exp(h delta_{n1}).
bool verify_shift_decomposition(int poly_degree, const ScaleRatio& h);

/// Bivariate polynomial sum c_{a,b} n^a n1^b used by the shift check.
struct BivariateTerm {
  int fast_power;
  int slow_power;
  Rational coefficient;
};

/// As verify_shift_decomposition, for one explicit test function.
bool verify_shift_decomposition(const std::vector<BivariateTerm>& u, const ScaleRatio& h);

}  // namespace lpkdv::ops
