#include "lpkdv/lattice_ops.hpp"

#include <algorithm>

#include "lpkdv/errors.hpp"

namespace lpkdv::ops {

namespace {

Rational factorial(int n) {
  Rational f = 1;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

Rational power(const Rational& x, int k) {
  Rational r = 1;
  for (int i = 0; i < k; ++i) r *= x;
  return r;
}

Sequence1D zeros_like(long first, std::size_t count) {
  return Sequence1D(first, std::vector<Rational>(count, Rational(0)));
}

}  // namespace

// ---------------------------------------------------------------------------

Sequence1D::Sequence1D(long first, std::vector<Rational> values)
    : first_(first), values_(std::move(values)) {
  if (values_.empty()) throw PreconditionError("Sequence1D: empty window");
}

const Rational& Sequence1D::at(long n) const {
  if (n < first_ || n > last())
    throw IndexError("Sequence1D: index " + std::to_string(n) + " outside [" +
                     std::to_string(first_) + ", " + std::to_string(last()) + "]");
  return values_[static_cast<std::size_t>(n - first_)];
}

bool Sequence1D::identically_zero() const {
  return std::all_of(values_.begin(), values_.end(), [](const Rational& v) { return v == 0; });
}

// ---------------------------------------------------------------------------

Polynomial::Polynomial(std::vector<Rational> coefficients) : coeffs_(std::move(coefficients)) {
  while (!coeffs_.empty() && coeffs_.back() == 0) coeffs_.pop_back();
}

int Polynomial::degree() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }

Rational Polynomial::operator()(const Rational& x) const {
  Rational acc = 0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + *it;
  return acc;
}

Polynomial Polynomial::derivative() const {
  std::vector<Rational> d;
  for (std::size_t k = 1; k < coeffs_.size(); ++k) d.push_back(coeffs_[k] * static_cast<long>(k));
  return Polynomial(std::move(d));
}

Sequence1D Polynomial::sample(long first, std::size_t count) const {
  return sample_scaled(first, count, Rational(1));
}

Sequence1D Polynomial::sample_scaled(long first, std::size_t count, const Rational& h) const {
  std::vector<Rational> v;
  v.reserve(count);
  for (std::size_t k = 0; k < count; ++k) v.push_back((*this)(h * (first + static_cast<long>(k))));
  return Sequence1D(first, std::move(v));
}

// ---------------------------------------------------------------------------

ScaleRatio::ScaleRatio(long M, long N) : M_(M), N_(N) {
  if (M <= 0 || N <= 0) throw DomainError("ScaleRatio: M and N must be positive");
  h_ = Rational(M, N);
  if (h_ > 1) throw DomainError("ScaleRatio: M/N must not exceed 1");
}

bool ScaleRatio::is_sublattice() const { return numerator(h_) == 1; }

// ---------------------------------------------------------------------------

SlownessOrder SlownessOrder::finite(int order) {
  if (order < 0) throw DomainError("SlownessOrder: negative order");
  SlownessOrder s;
  s.order_ = order;
  s.tested_ = order;
  return s;
}

SlownessOrder SlownessOrder::beyond(int max_tested) {
  SlownessOrder s;
  s.tested_ = max_tested;
  return s;
}

int SlownessOrder::order() const {
  if (!order_) throw DomainError("slowness order is infinite (beyond " + std::to_string(tested_) + ")");
  return *order_;
}

std::string SlownessOrder::describe() const {
  if (order_) return std::to_string(*order_);
  return "infinite (beyond " + std::to_string(tested_) + ")";
}

// ---------------------------------------------------------------------------

StirlingTable::StirlingTable(int max_order) : max_order_(max_order) {
  if (max_order < 1) throw DomainError("StirlingTable: max_order must be >= 1");
  const auto n = static_cast<std::size_t>(max_order + 1);
  first_.assign(n, std::vector<Integer>(n, 0));
  second_.assign(n, std::vector<Integer>(n, 0));
  first_[0][0] = 1;
  second_[0][0] = 1;
  for (std::size_t i = 1; i < n; ++i) {
    for (std::size_t k = 1; k <= i; ++k) {
      first_[i][k] = first_[i - 1][k - 1] - Integer(i - 1) * first_[i - 1][k];
      second_[i][k] = Integer(k) * second_[i - 1][k] + second_[i - 1][k - 1];
    }
  }
}

const Integer& StirlingTable::first_kind(int i, int k) const {
  if (i < 0 || k < 0 || i > max_order_ || k > max_order_)
    throw IndexError("StirlingTable: first_kind index out of range");
  return first_[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
}

const Integer& StirlingTable::second_kind(int k, int j) const {
  if (k < 0 || j < 0 || k > max_order_ || j > max_order_)
    throw IndexError("StirlingTable: second_kind index out of range");
  return second_[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)];
}

StirlingTable stirling_tables(int max_order) { return StirlingTable(max_order); }

// ---------------------------------------------------------------------------

Sequence1D forward_difference(const Sequence1D& seq, int j) {
  if (j < 0) throw DomainError("forward_difference: negative order");
  if (seq.size() <= static_cast<std::size_t>(j))
    throw DomainError("forward_difference: window of " + std::to_string(seq.size()) +
                      " points too short, need at least " + std::to_string(j + 1));
  std::vector<Rational> v = seq.values();
  for (int step = 0; step < j; ++step) {
    for (std::size_t k = 0; k + 1 < v.size(); ++k) v[k] = v[k + 1] - v[k];
    v.pop_back();
  }
  return Sequence1D(seq.first(), std::move(v));
}

SlownessOrder slowness_order(const Sequence1D& seq, int max_test) {
  if (max_test < 0 || static_cast<std::size_t>(max_test) + 1 >= seq.size())
    throw PreconditionError("slowness_order: max_test must be below window length - 1");
  Sequence1D diff = seq;
  for (int l = 0; l <= max_test; ++l) {
    diff = forward_difference(diff, 1);
    if (diff.identically_zero()) return SlownessOrder::finite(l);
  }
  return SlownessOrder::beyond(max_test);
}

Sequence1D formal_derivative(const Sequence1D& seq, const SlownessOrder& order) {
  if (!order.is_finite()) throw DomainError("formal_derivative: truncation order required");
  const int l = order.order();
  if (seq.size() <= static_cast<std::size_t>(l))
    throw DomainError("formal_derivative: window too short for order " + std::to_string(l));
  const std::size_t out = seq.size() - static_cast<std::size_t>(l);
  std::vector<Rational> acc(out, Rational(0));
  Sequence1D diff = seq;
  for (int i = 1; i <= l; ++i) {
    diff = forward_difference(diff, 1);
    const Rational c = Rational(i % 2 == 1 ? 1 : -1, i);
    for (std::size_t k = 0; k < out; ++k) acc[k] += c * diff.values()[k];
  }
  return Sequence1D(seq.first(), std::move(acc));
}

Rational p_coefficient(int i, int j, const ScaleRatio& h, const StirlingTable& tables) {
  if (j < 1 || j > i || i > tables.max_order())
    throw IndexError("p_coefficient: need 1 <= j <= i <= " + std::to_string(tables.max_order()));
  Rational sum = 0;
  Rational hk = power(h.value(), j);
  for (int k = j; k <= i; ++k) {
    sum += hk * Rational(tables.first_kind(i, k) * tables.second_kind(k, j));
    hk *= h.value();
  }
  return sum;
}

Sequence1D cross_lattice_difference(const Sequence1D& u_slow, const ScaleRatio& h, int j,
                                    int order) {
  if (j < 1) throw DomainError("cross_lattice_difference: j must be >= 1");
  if (order < 0) throw DomainError("cross_lattice_difference: negative slowness order");
  if (u_slow.size() <= static_cast<std::size_t>(order))
    throw DomainError("cross_lattice_difference: slowness order " + std::to_string(order) +
                      " exceeds the available window");
  if (u_slow.size() > static_cast<std::size_t>(order) + 1 &&
      !forward_difference(u_slow, order + 1).identically_zero())
    throw PreconditionError("cross_lattice_difference: sequence is not slow-varying of order " +
                            std::to_string(order));

  const std::size_t out = u_slow.size() - static_cast<std::size_t>(order);
  if (j > order) return zeros_like(u_slow.first(), out);

  const StirlingTable tables(std::max(order, 1));
  std::vector<Rational> acc(out, Rational(0));
  const Rational jfact = factorial(j);
  for (int i = j; i <= order; ++i) {
    const Rational c = jfact * p_coefficient(i, j, h, tables) / factorial(i);
    const Sequence1D d = forward_difference(u_slow, i);
    for (std::size_t k = 0; k < out; ++k) acc[k] += c * d.values()[k];
  }
  return Sequence1D(u_slow.first(), std::move(acc));
}

// ---------------------------------------------------------------------------

namespace {

Rational eval_bivariate(const std::vector<BivariateTerm>& u, const Rational& fast,
                        const Rational& slow) {
  Rational acc = 0;
  for (const auto& t : u) acc += t.coefficient * power(fast, t.fast_power) * power(slow, t.slow_power);
  return acc;
}

/// Coefficients e_k of exp(step * delta) = sum_k e_k Delta^k, where
/// delta = log(1 + Delta) and both series are truncated at Delta^degree,
/// which is exact on polynomials of degree <= degree.
std::vector<Rational> exponential_shift_coefficients(const Rational& step, int degree) {
  const auto n = static_cast<std::size_t>(degree + 1);
  std::vector<Rational> log_series(n, Rational(0));
  for (int k = 1; k <= degree; ++k) log_series[static_cast<std::size_t>(k)] = Rational(k % 2 == 1 ? 1 : -1, k);
  std::vector<Rational> result(n, Rational(0)), term(n, Rational(0));
  result[0] = 1;
  term[0] = 1;
  for (int i = 1; i <= degree; ++i) {
    std::vector<Rational> next(n, Rational(0));
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 1; a + b < n; ++b) next[a + b] += term[a] * log_series[b];
    for (auto& v : next) v *= step / i;
    term = std::move(next);
    for (std::size_t k = 0; k < n; ++k) result[k] += term[k];
  }
  return result;
}

/// sum_k e_k (Delta^k g)(first) for g sampled on degree + 1 points.
Rational apply_shift(const Sequence1D& g, const std::vector<Rational>& e) {
  Rational acc = 0;
  for (std::size_t k = 0; k < e.size(); ++k)
    acc += e[k] * forward_difference(g, static_cast<int>(k)).values().front();
  return acc;
}

}  // namespace

bool verify_shift_decomposition(const std::vector<BivariateTerm>& u, const ScaleRatio& h) {
  int fast_degree = 0, slow_degree = 0;
  for (const auto& t : u) {
    fast_degree = std::max(fast_degree, t.fast_power);
    slow_degree = std::max(slow_degree, t.slow_power);
  }
  const auto window = [](int degree) { return static_cast<std::size_t>(degree + 1); };
  const auto slow_e = exponential_shift_coefficients(h.value(), slow_degree);
  const auto fast_e = exponential_shift_coefficients(Rational(1), fast_degree);

  for (long n = -2; n <= 3; ++n) {
    for (long n1 = -2; n1 <= 3; ++n1) {
      const Rational direct = eval_bivariate(u, Rational(n + 1), Rational(n1) + h.value());

      // Slow partial shift at each fast sample, then the fast partial shift.
      std::vector<Rational> slow_shifted;
      for (std::size_t a = 0; a < window(fast_degree); ++a) {
        std::vector<Rational> g;
        for (std::size_t b = 0; b < window(slow_degree); ++b)
          g.push_back(eval_bivariate(u, Rational(n + static_cast<long>(a)),
                                     Rational(n1 + static_cast<long>(b))));
        slow_shifted.push_back(apply_shift(Sequence1D(n1, std::move(g)), slow_e));
      }
      const Rational composed = apply_shift(Sequence1D(n, std::move(slow_shifted)), fast_e);
      if (composed != direct) return false;
    }
  }
  return true;
}

bool verify_shift_decomposition(int poly_degree, const ScaleRatio& h) {
  if (poly_degree < 0) throw DomainError("verify_shift_decomposition: negative degree");
  for (int a = 0; a <= poly_degree; ++a)
    for (int b = 0; a + b <= poly_degree; ++b)
      if (!verify_shift_decomposition({{a, b, Rational(1)}}, h)) return false;

  // One dense mixed polynomial with non-trivial rational coefficients.
  std::vector<BivariateTerm> mixed;
  for (int a = 0; a <= poly_degree; ++a)
    for (int b = 0; a + b <= poly_degree; ++b)
      mixed.push_back({a, b, Rational(2 * a - 3 * b + 1, a + 2 * b + 2)});
  return verify_shift_decomposition(mixed, h);
}

}  // namespace lpkdv::ops
