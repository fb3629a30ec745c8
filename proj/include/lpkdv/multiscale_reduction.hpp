#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "lpkdv/fft.hpp"
#include "lpkdv/lattice_field.hpp"
#include "lpkdv/lpkdv_model.hpp"
#include "lpkdv/nls_dynamics.hpp"

namespace lpkdv {

/// Carrier, slow-scale and NLS data of the reduction to first order in 1/N.
///
/// theta is chosen so that M1_tilde > 0 and branch so that M1 > 0. branch =
/// +1 selects the upper signs (n2 = n1 - m1, tau1 with +), -1 the lower.
struct ReductionCoefficients {
  LpkdvParams params{1.5, 0.5};
  CarrierWave carrier{params, 1.0};
  int branch = 1;
  double r = 1.0;
  double theta = 0.0;
  cplx S;
  double M1 = 0.0;
  double M1_tilde = 0.0;
  double M2_tilde = 1.0;
  cplx tau1, tau2, tau3;
  std::optional<cplx> tau4;  // only with the alpha -> zeta, beta -> mu reading
  double rho1 = 0.0;
  double rho2 = 0.0;
  /// |Im| / |Re| of the complex M1, M1_tilde evaluations and of tau1.
  double im_ratio_M1 = 0.0, im_ratio_M1_tilde = 0.0, im_ratio_tau1 = 0.0;

  NlsCoefficients nls() const { return {rho1, rho2}; }
  nlohmann::json to_json() const;
};

/// DomainError when zeta cos(kappa) - mu vanishes or kappa is outside
/// (0, pi); ConsistencyError when M1 or M1_tilde fail the realness check
/// (|Im| <= 1e-10 |M|); PreconditionError when a requested branch gives M1 <= 0.
ReductionCoefficients compute_coefficients(const LpkdvParams& params, double kappa, double r = 1.0,
                                           double M2_tilde = 1.0, std::optional<int> branch = {},
                                           bool interpret_tau4 = false);

/// d omega / d kappa by Richardson-refined central differences (h = 1e-6).
double group_velocity(const LpkdvParams& params, double kappa);
/// Closed form -(zeta^2 - mu^2) / (zeta^2 + mu^2 - 2 zeta mu cos kappa).
double group_velocity_exact(const LpkdvParams& params, double kappa);

/// xi = xi0 + (M1 n - branch M1_tilde m)/N, tau = tau0 + M2_tilde m / N^2.
struct SlowCoordinates {
  long N = 1;
  double M1 = 0.0, M1_tilde = 0.0, M2_tilde = 1.0;
  int branch = 1;
  double xi0 = 0.0, tau0 = 0.0;

  SlowCoordinates() = default;
  SlowCoordinates(const ReductionCoefficients& c, long N, double xi0 = 0.0, double tau0 = 0.0);
  double xi(double n, double m) const noexcept {
    return xi0 + (M1 * n - branch * M1_tilde * m) / static_cast<double>(N);
  }
  double tau(double m) const noexcept {
    return tau0 + M2_tilde * m / (static_cast<double>(N) * static_cast<double>(N));
  }
};

/// u1^(0)(xi) = Re(tau1) * integral_{xi_min}^{xi} |u(s)|^2 ds. The integral is
/// done spectrally: the mean of |u|^2 is integrated exactly and the periodic
/// part through its Fourier antiderivative.
class ZerothHarmonic {
 public:
  ZerothHarmonic() = default;
  double operator()(double xi) const;
  /// Im(tau1) * total integral: the part dropped by taking the real part.
  double imag_diagnostic() const noexcept { return imag_diag_; }
  /// Integral of |u|^2 over the whole period.
  double total_integral() const noexcept { return mean_ * period_; }

 private:
  friend ZerothHarmonic build_zeroth_harmonic(const Envelope&, const ReductionCoefficients&);
  double re_tau1_ = 0.0, mean_ = 0.0, xi_min_ = 0.0, period_ = 1.0, base_ = 0.0, imag_diag_ = 0.0;
  TrigInterpolant periodic_;
};

/// PreconditionError unless |u| < 1e-6 at the left end of the grid.
ZerothHarmonic build_zeroth_harmonic(const Envelope& env, const ReductionCoefficients& c);

/// tau2 u^2 pointwise.
std::vector<cplx> build_second_harmonic(const Envelope& env, const ReductionCoefficients& c);

struct AnsatzOptions {
  bool include_zeroth = true;
  bool include_second = true;
  /// Keep the envelope at its initial tau instead of evolving it by the NLS.
  bool frozen = false;
  /// Slow coordinate of (n, m) = (0, 0). Default centres the window on the
  /// envelope period.
  std::optional<double> xi0;
  /// Largest NLS step between rows.
  double nls_dtau = 2e-3;
};

struct AnsatzField {
  long N = 0;
  SlowCoordinates coords;
  LatticeField assembled;       // real
  LatticeField first_harmonic;  // u1^(1)(xi(n,m), tau(m)), complex
  double imag_diagnostic = 0.0; // largest |Im(tau1) int |u|^2| over rows
};

/// u = (1/N)[u1^(0) + u1^(1) e^{i phi} + c.c.] + (1/N^2)[u2^(2) e^{2 i phi} + c.c.],
/// phi = kappa n - omega m, on [0, Nn] x [0, Nm]. The envelope is evaluated
/// off-grid by trigonometric interpolation and stepped by the NLS to each
/// row's tau exactly. DomainError (with the offending site) when a slow
/// coordinate leaves [xi_min, xi_min + period].
AnsatzField assemble_ansatz(const Envelope& env, const ReductionCoefficients& c, long N, long Nn, long Nm,
                            const AnsatzOptions& opts = {});

struct ScalingOptions {
  /// Window (Nn, Nm) = (per_N_n N, per_N_m N) unless fixed_Nn/Nm are > 0.
  double per_N_n = 4.0, per_N_m = 4.0;
  long fixed_Nn = 0, fixed_Nm = 0;
  long margin = 5;
  AnsatzOptions ansatz;
};

struct ScalingReport {
  std::vector<long> N;
  std::vector<double> residual;
  std::vector<std::pair<long, long>> window;
  std::optional<double> exponent;  // empty when "exact"
  double fit_r2 = 0.0;
  std::string status;  // "fit" or "exact"
  nlohmann::json to_json() const;
  std::string to_csv() const;
};

/// R(N) = max interior |quad residual| of the ansatz, fitted as R ~ N^-exponent.
/// PreconditionError unless N_list is ascending with >= 3 entries;
/// NumericalError when fewer than 3 residuals are usable for the fit.
ScalingReport residual_scaling(const Envelope& env, const ReductionCoefficients& c,
                               const std::vector<long>& N_list, const ScalingOptions& opts = {});

/// Continued-fraction report on M1 / M1_tilde: both become integers for some
/// r exactly when the ratio is rational.
struct IntegerEmbedding {
  double ratio = 0.0;
  std::vector<std::pair<long, long>> convergents;  // (a, b) with a/b -> ratio
  bool rational = false;                           // last convergent matches to 1e-12
  double r_for_integers = 0.0;                     // r giving M1 = a, M1_tilde = b
  nlohmann::json to_json() const;
};
IntegerEmbedding integer_embedding(const ReductionCoefficients& c, long max_denominator = 1000);

}  // namespace lpkdv
