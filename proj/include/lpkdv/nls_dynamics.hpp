#pragma once

#include <complex>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

namespace lpkdv {

using cplx = std::complex<double>;

/// rho1, rho2 of  i u_tau = rho1 u_xixi + rho2 |u|^2 u.
struct NlsCoefficients {
  double rho1 = 0.0;
  double rho2 = 0.0;
  /// DomainError if rho1 == 0 or either value is not finite.
  void validate() const;
  /// rho1 rho2 < 0 is the defocusing regime.
  bool defocusing() const noexcept { return rho1 * rho2 < 0.0; }
};

/// Complex samples on the periodic grid xi_j = xi_min + j dxi, j < L, at slow
/// time tau. The grid excludes the duplicate endpoint xi_min + L dxi.
class Envelope {
 public:
  Envelope() = default;
  Envelope(double xi_min, double dxi, std::vector<cplx> values, double tau = 0.0);

  std::size_t size() const noexcept { return values_.size(); }
  double xi_min() const noexcept { return xi_min_; }
  double dxi() const noexcept { return dxi_; }
  double period() const noexcept { return dxi_ * static_cast<double>(values_.size()); }
  double xi(std::size_t j) const noexcept { return xi_min_ + dxi_ * static_cast<double>(j); }
  double tau() const noexcept { return tau_; }
  void set_tau(double t) noexcept { tau_ = t; }
  const std::vector<cplx>& values() const noexcept { return values_; }
  std::vector<cplx>& values() noexcept { return values_; }

 private:
  double xi_min_ = 0.0, dxi_ = 1.0, tau_ = 0.0;
  std::vector<cplx> values_;
};

Envelope gaussian_envelope(std::size_t L, double dxi, double amplitude, double width, double center);
Envelope sech_envelope(std::size_t L, double dxi, double amplitude, double width, double center);
/// A e^{i k xi}; k should be a multiple of 2 pi / (L dxi) for periodicity.
Envelope plane_envelope(std::size_t L, double dxi, cplx amplitude, double k);

/// d u / d tau = -i (rho1 u_xixi + rho2 |u|^2 u), spectral derivatives.
std::vector<cplx> nls_rhs(const Envelope& env, const NlsCoefficients& c);

/// Advances env to the absolute slow time tau_final in ceil((tau_final -
/// tau)/dtau) equal steps, landing exactly on tau_final.
///
/// Scheme: fourth-order Yoshida composition of the Strang splitting into the
/// exact linear flow (Fourier multiplier e^{i rho1 k^2 h}) and the exact
/// nonlinear flow (pointwise phase e^{-i rho2 |u|^2 h}). Both substeps are
/// unitary, so the scheme is unconditionally stable and conserves the
/// discrete mass to round-off; accuracy needs |rho1| k_max^2 dtau and
/// |rho2| max|u|^2 dtau well below 1. Plane waves are reproduced exactly.
/// NumericalError on a non-finite value.
Envelope nls_evolve(const Envelope& env, const NlsCoefficients& c, double tau_final, double dtau);

/// sum |u|^2 dxi.
double mass(const Envelope& env);

enum class Flow { h1, h2, h3, h4 };
std::string to_string(Flow f);
Flow flow_from_string(const std::string& s);

/// h1 = i u, h2 = u_xi, h3 = nls_rhs, h4 = rho1 u_xixixi + 3 rho2 |u|^2 u_xi.
std::vector<cplx> symmetry_rhs(const Envelope& env, const NlsCoefficients& c, Flow which);

/// Fraction of spectral energy in the top third of |k|.
double high_mode_fraction(const Envelope& env);

/// A vector field on envelopes.
using FlowMap = std::function<std::vector<cplx>(const Envelope&)>;
FlowMap flow_map(const NlsCoefficients& c, Flow which);

/// Max norm of [K_A, K_B](u) = K_A'[u] K_B(u) - K_B'[u] K_A(u), Frechet
/// derivatives by central differences of step eps along the normalised real
/// and imaginary parts of the direction separately.
double commutator_norm(const NlsCoefficients& c, const Envelope& env, Flow a, Flow b, double eps);

struct CommutatorReport {
  std::string a, b;
  std::vector<double> eps;
  std::vector<double> norm;
  std::vector<double> ratio;  // norm[i] / norm[i+1]
  /// Round-off level at each eps, estimated from D(e) - 5 D(e/2) + 4 D(e/4)
  /// (the combination that cancels both the limit and the eps^2 term).
  std::vector<double> noise;
  double floor = 0.0;         // discretisation floor
  int checked_halvings = 0;   // halvings where the decrease was above noise and floor
  bool pass = false;
  std::string verdict;
  nlohmann::json to_json() const;
};

/// Commutator with an eps sweep of successive halvings (at least three).
/// A halving passes when the norm decreases by >= 3.5x, or when the smaller
/// norm is already within max(floor, 3 noise) of zero. PreconditionError if
/// the envelope is not spectrally resolved (high_mode_fraction >= 1e-10) or
/// the eps list is not a halving sequence.
CommutatorReport commutator_test(const NlsCoefficients& c, const Envelope& env, Flow a, Flow b,
                                 const std::vector<double>& eps = {1e-3, 5e-4, 2.5e-4, 1.25e-4},
                                 double floor = 1e-10);
/// Same for arbitrary vector fields.
CommutatorReport commutator_test(const FlowMap& A, const FlowMap& B, const Envelope& env,
                                 const std::vector<double>& eps = {1e-3, 5e-4, 2.5e-4, 1.25e-4},
                                 double floor = 1e-10, const std::string& name_a = "A",
                                 const std::string& name_b = "B");

void write_envelope_csv(const Envelope& env, std::ostream& os);
Envelope read_envelope_csv(std::istream& is);
nlohmann::json envelope_to_json(const Envelope& env);

}  // namespace lpkdv
