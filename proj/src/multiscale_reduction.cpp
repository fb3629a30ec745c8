#include "lpkdv/multiscale_reduction.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "lpkdv/errors.hpp"
#include "lpkdv/parallel.hpp"
#include "lpkdv/scaling_fit.hpp"

namespace lpkdv {

namespace {

constexpr double kPi = std::numbers::pi;

double im_ratio(cplx z) { return z.real() == 0.0 ? INFINITY : std::abs(z.imag()) / std::abs(z.real()); }

void check_real(cplx z, const char* name) {
  if (std::abs(z.imag()) > 1e-10 * std::abs(z))
    throw ConsistencyError(std::string("compute_coefficients: ") + name + " not real, Im/Re = " +
                           std::to_string(im_ratio(z)));
}

nlohmann::json cjson(cplx z) { return nlohmann::json{{"re", z.real()}, {"im", z.imag()}}; }

}  // namespace

ReductionCoefficients compute_coefficients(const LpkdvParams& params, double kappa, double r,
                                           double M2_tilde, std::optional<int> branch,
                                           bool interpret_tau4) {
  if (!(r > 0.0)) throw DomainError("compute_coefficients: r must be positive");
  if (!(M2_tilde > 0.0)) throw DomainError("compute_coefficients: M2_tilde must be positive");
  if (branch && *branch != 1 && *branch != -1) throw DomainError("compute_coefficients: branch must be +1 or -1");
  ReductionCoefficients c;
  c.params = params;
  c.carrier = CarrierWave(params, kappa);
  const double mu = params.mu(), zeta = params.zeta();
  const double den = zeta * std::cos(kappa) - mu;
  if (std::abs(den) < 1e-12 * (1.0 + std::abs(mu)))
    throw DomainError("compute_coefficients: zeta cos(kappa) - mu = 0, theta undefined");
  const cplx E = std::polar(1.0, kappa);

  double theta = -std::atan(zeta * std::sin(kappa) / den);
  auto m1t = [&](double th) {
    return std::polar(r, th) * E * (zeta * zeta - mu * mu) / (mu * E - zeta);
  };
  if (m1t(theta).real() < 0.0) theta += kPi;
  const cplx S = std::polar(r, theta);
  const cplx M1t = m1t(theta);
  const cplx M1_upper = -S * (mu - zeta * E);

  int sgn = M1_upper.real() > 0.0 ? 1 : -1;
  if (branch) {
    if (*branch != sgn)
      throw PreconditionError("compute_coefficients: branch " + std::to_string(*branch) +
                              " gives M1 <= 0 at these parameters");
    sgn = *branch;
  }
  const cplx M1 = static_cast<double>(sgn) * M1_upper;
  check_real(M1, "M1");
  check_real(M1t, "M1_tilde");

  c.branch = sgn;
  c.r = r;
  c.theta = theta;
  c.S = S;
  c.M1 = M1.real();
  c.M1_tilde = M1t.real();
  c.M2_tilde = M2_tilde;
  c.im_ratio_M1 = im_ratio(M1);
  c.im_ratio_M1_tilde = im_ratio(M1t);

  c.tau1 = static_cast<double>(sgn) * 2.0 * (1.0 + E) * (1.0 + E) / (S * E * (mu + zeta) * (mu - zeta * E));
  c.tau2 = (1.0 + E) / ((1.0 - E) * (mu + zeta));
  c.tau3 = cplx(0.0, 2.0 * std::sin(kappa)) / (mu + zeta);
  if (interpret_tau4)
    c.tau4 = static_cast<double>(sgn) * 2.0 * S * E * (zeta + mu * E) / ((E - 1.0) * (E - 1.0) * (mu + zeta));
  c.im_ratio_tau1 = im_ratio(c.tau1);

  const double D = zeta * zeta + mu * mu - 2.0 * zeta * mu * std::cos(kappa);
  c.rho1 = -mu * zeta * r * r * (zeta * zeta - mu * mu) * std::sin(kappa) / (M2_tilde * D);
  const double cp = 1.0 + std::cos(kappa);
  c.rho2 = 8.0 * zeta * mu * (zeta - mu) * cp * cp * std::sin(kappa) / (M2_tilde * (mu + zeta) * D * D);
  return c;
}

nlohmann::json ReductionCoefficients::to_json() const {
  nlohmann::json j = {{"p", params.p()},
                      {"q", params.q()},
                      {"lattice_mu", params.mu()},
                      {"zeta", params.zeta()},
                      {"kappa", carrier.kappa()},
                      {"omega", carrier.omega()},
                      {"branch", branch},
                      {"r", r},
                      {"theta", theta},
                      {"S", cjson(S)},
                      {"M1", M1},
                      {"M1_tilde", M1_tilde},
                      {"M2_tilde", M2_tilde},
                      {"tau1", cjson(tau1)},
                      {"tau2", cjson(tau2)},
                      {"tau3", cjson(tau3)},
                      {"rho1", rho1},
                      {"rho2", rho2},
                      {"defocusing", rho1 * rho2 < 0.0},
                      {"diagnostics",
                       {{"im_over_re_M1", im_ratio_M1},
                        {"im_over_re_M1_tilde", im_ratio_M1_tilde},
                        {"im_over_re_tau1", im_ratio_tau1}}}};
  if (tau4)
    j["tau4"] = cjson(*tau4), j["tau4_interpretation"] = "alpha->zeta, beta->mu";
  else
    j["tau4"] = "unavailable";
  return j;
}

double group_velocity(const LpkdvParams& params, double kappa) {
  const double h = 1e-6;
  auto d = [&](double s) { return (dispersion(params, kappa + s) - dispersion(params, kappa - s)) / (2.0 * s); };
  return (4.0 * d(h / 2.0) - d(h)) / 3.0;
}

double group_velocity_exact(const LpkdvParams& params, double kappa) {
  const double mu = params.mu(), zeta = params.zeta();
  return -(zeta * zeta - mu * mu) / (zeta * zeta + mu * mu - 2.0 * zeta * mu * std::cos(kappa));
}

SlowCoordinates::SlowCoordinates(const ReductionCoefficients& c, long N_, double xi0_, double tau0_)
    : N(N_), M1(c.M1), M1_tilde(c.M1_tilde), M2_tilde(c.M2_tilde), branch(c.branch), xi0(xi0_), tau0(tau0_) {
  if (N_ <= 0) throw DomainError("SlowCoordinates: N must be positive");
}

// ---------------------------------------------------------------------------

double ZerothHarmonic::operator()(double xi) const {
  const double integral = periodic_(xi).real() - base_ + mean_ * (xi - xi_min_);
  return re_tau1_ * integral;
}

ZerothHarmonic build_zeroth_harmonic(const Envelope& env, const ReductionCoefficients& c) {
  if (std::abs(env.values().front()) >= 1e-6)
    throw PreconditionError("build_zeroth_harmonic: envelope does not decay at the left edge (|u| = " +
                            std::to_string(std::abs(env.values().front())) + ")");
  const std::size_t L = env.size();
  std::vector<cplx> dens(L);
  for (std::size_t j = 0; j < L; ++j) dens[j] = std::norm(env.values()[j]);
  auto coef = dft(dens);
  const auto k = wavenumbers(L, env.period());
  ZerothHarmonic z;
  z.mean_ = coef[0].real() / static_cast<double>(L);
  for (std::size_t j = 0; j < L; ++j) {
    coef[j] /= static_cast<double>(L);
    if (j == 0 || (L % 2 == 0 && j == L / 2))
      coef[j] = 0.0;
    else
      coef[j] /= cplx(0.0, k[j]);
  }
  z.periodic_ = TrigInterpolant::from_coefficients(std::move(coef), env.xi_min(), env.period());
  z.re_tau1_ = c.tau1.real();
  z.xi_min_ = env.xi_min();
  z.period_ = env.period();
  z.base_ = z.periodic_(env.xi_min()).real();
  z.imag_diag_ = c.tau1.imag() * z.mean_ * z.period_;
  return z;
}

std::vector<cplx> build_second_harmonic(const Envelope& env, const ReductionCoefficients& c) {
  std::vector<cplx> out(env.size());
  for (std::size_t j = 0; j < env.size(); ++j) out[j] = c.tau2 * env.values()[j] * env.values()[j];
  return out;
}

// ---------------------------------------------------------------------------

AnsatzField assemble_ansatz(const Envelope& env, const ReductionCoefficients& c, long N, long Nn, long Nm,
                            const AnsatzOptions& opts) {
  if (N <= 0) throw DomainError("assemble_ansatz: N must be positive");
  if (Nn < 1 || Nm < 0) throw DomainError("assemble_ansatz: bad window");
  const double lo = env.xi_min(), hi = env.xi_min() + env.period();
  const double xi0 = opts.xi0 ? *opts.xi0
                              : lo + 0.5 * env.period() -
                                    (c.M1 * static_cast<double>(Nn) - c.branch * c.M1_tilde * static_cast<double>(Nm)) /
                                        (2.0 * static_cast<double>(N));
  AnsatzField out;
  out.N = N;
  out.coords = SlowCoordinates(c, N, xi0, env.tau());
  // xi is affine in (n, m): checking the four corners covers the window.
  for (long m : {0L, Nm})
    for (long n : {0L, Nn}) {
      const double x = out.coords.xi(static_cast<double>(n), static_cast<double>(m));
      if (x < lo || x > hi)
        throw DomainError("assemble_ansatz: slow coordinate xi = " + std::to_string(x) + " outside [" +
                          std::to_string(lo) + ", " + std::to_string(hi) + "] at " + to_string(Site{n, m}));
    }

  out.assembled = LatticeField(Nn, Nm, FieldKind::real);
  out.first_harmonic = LatticeField(Nn, Nm, FieldKind::complex);
  const double kappa = c.carrier.kappa(), omega = c.carrier.omega();
  const double invN = 1.0 / static_cast<double>(N);
  const NlsCoefficients nls = c.nls();

  Envelope cur = env;
  for (long m = 0; m <= Nm; ++m) {
    const double tau = out.coords.tau(static_cast<double>(m));
    if (!opts.frozen && tau > cur.tau()) cur = nls_evolve(cur, nls, tau, opts.nls_dtau);
    const TrigInterpolant u(cur.values(), cur.xi_min(), cur.period());
    ZerothHarmonic zeroth;
    if (opts.include_zeroth) {
      zeroth = build_zeroth_harmonic(cur, c);
      out.imag_diagnostic = std::max(out.imag_diagnostic, std::abs(zeroth.imag_diagnostic()));
    }
    parallel_for(0, Nn + 1, [&](std::ptrdiff_t nn) {
      const auto n = static_cast<long>(nn);
      const double x = out.coords.xi(static_cast<double>(n), static_cast<double>(m));
      const cplx u11 = u(x);
      const cplx ph = std::polar(1.0, kappa * static_cast<double>(n) - omega * static_cast<double>(m));
      double v = 2.0 * (u11 * ph).real() * invN;
      if (opts.include_zeroth) v += zeroth(x) * invN;
      if (opts.include_second) v += 2.0 * (c.tau2 * u11 * u11 * ph * ph).real() * invN * invN;
      out.assembled(n, m) = cplx(v, 0.0);
      out.first_harmonic(n, m) = u11;
    });
  }
  return out;
}

// ---------------------------------------------------------------------------

ScalingReport residual_scaling(const Envelope& env, const ReductionCoefficients& c, const std::vector<long>& N_list,
                               const ScalingOptions& opts) {
  if (N_list.size() < 3) throw PreconditionError("residual_scaling: need at least three N values");
  for (std::size_t i = 1; i < N_list.size(); ++i)
    if (N_list[i] <= N_list[i - 1]) throw PreconditionError("residual_scaling: N_list must be ascending");
  ScalingReport rep;
  for (long N : N_list) {
    const long Nn = opts.fixed_Nn > 0 ? opts.fixed_Nn : std::lround(opts.per_N_n * static_cast<double>(N));
    const long Nm = opts.fixed_Nm > 0 ? opts.fixed_Nm : std::lround(opts.per_N_m * static_cast<double>(N));
    const AnsatzField a = assemble_ansatz(env, c, N, Nn, Nm, opts.ansatz);
    rep.N.push_back(N);
    rep.window.emplace_back(Nn, Nm);
    rep.residual.push_back(max_residual(a.assembled, c.params, opts.margin).max_abs);
  }
  std::vector<double> h;
  for (long N : rep.N) h.push_back(1.0 / static_cast<double>(N));
  const PowerFit fit = fit_power_law(h, rep.residual, 0.0, 3);
  if (fit.status == "exact") {
    rep.status = "exact";
    rep.fit_r2 = 1.0;
    return rep;
  }
  if (!fit.exponent) throw NumericalError("residual_scaling: fewer than three usable residuals for the fit");
  rep.status = "fit";
  rep.exponent = fit.exponent;
  rep.fit_r2 = fit.r2;
  return rep;
}

nlohmann::json ScalingReport::to_json() const {
  nlohmann::json j = {{"N", N}, {"residual", residual}, {"fit_r2", fit_r2}, {"status", status}};
  j["exponent"] = exponent ? nlohmann::json(*exponent) : nlohmann::json("exact");
  nlohmann::json w = nlohmann::json::array();
  for (const auto& [a, b] : window) w.push_back({a, b});
  j["window"] = w;
  return j;
}

std::string ScalingReport::to_csv() const {
  std::ostringstream os;
  os << "N,Nn,Nm,residual\n";
  char buf[128];
  for (std::size_t i = 0; i < N.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%ld,%ld,%ld,%.17g\n", N[i], window[i].first, window[i].second, residual[i]);
    os << buf;
  }
  return os.str();
}

// ---------------------------------------------------------------------------

IntegerEmbedding integer_embedding(const ReductionCoefficients& c, long max_denominator) {
  IntegerEmbedding e;
  e.ratio = c.M1 / c.M1_tilde;
  // Convergents h_k / k_k of the continued fraction of ratio.
  long h_prev = 1, h = 0, k_prev = 0, k = 1;
  double x = e.ratio;
  for (int it = 0; it < 40; ++it) {
    const double a = std::floor(x);
    if (std::abs(a) > 1e12) break;
    const long ai = static_cast<long>(a);
    const long h_new = ai * h_prev + h, k_new = ai * k_prev + k;
    if (k_new > max_denominator) break;
    h = h_prev;
    k = k_prev;
    h_prev = h_new;
    k_prev = k_new;
    e.convergents.emplace_back(h_new, k_new);
    const double frac = x - a;
    if (std::abs(static_cast<double>(h_new) / static_cast<double>(k_new) - e.ratio) <= 1e-12 * e.ratio) {
      e.rational = true;
      break;
    }
    if (frac < 1e-15) break;
    x = 1.0 / frac;
  }
  if (!e.convergents.empty()) {
    const auto [a, b] = e.convergents.back();
    e.r_for_integers = c.r * static_cast<double>(a) / c.M1;
    (void)b;
  }
  return e;
}

nlohmann::json IntegerEmbedding::to_json() const {
  nlohmann::json cv = nlohmann::json::array();
  for (const auto& [a, b] : convergents) cv.push_back({a, b});
  return {{"ratio_M1_over_M1_tilde", ratio}, {"convergents", cv}, {"rational", rational},
          {"r_for_integers", rational ? nlohmann::json(r_for_integers) : nlohmann::json(nullptr)}};
}

}  // namespace lpkdv
