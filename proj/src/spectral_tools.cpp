#include "lpkdv/spectral_tools.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>

#include "lpkdv/errors.hpp"
#include "lpkdv/fft.hpp"
#include "lpkdv/parallel.hpp"

namespace lpkdv {

namespace {

bool less_complex(const cplx& a, const cplx& b) {
  if (a.real() != b.real()) return a.real() < b.real();
  return a.imag() < b.imag();
}

}  // namespace

SpectralProblem spectral_problem_from_row(const std::vector<cplx>& u, double p, long m, SpectralBoundary boundary,
                                          CoefficientForm form) {
  if (u.size() < 4) throw PreconditionError("build_spectral_problem: row needs at least four sites");
  const long Nn = static_cast<long>(u.size()) - 1;
  SpectralProblem sp;
  sp.n_first = 1;
  sp.boundary = boundary;
  const double sgn = form == CoefficientForm::difference ? -1.0 : 1.0;
  const double tol = 1e-10 * std::abs(p);
  for (long n = 1; n <= Nn - 2; ++n) {
    const auto at = [&](long k) { return u[static_cast<std::size_t>(k)]; };
    const cplx f1 = 2.0 * p - (at(n + 2) + sgn * at(n));
    const cplx f2 = 2.0 * p - (at(n + 1) + sgn * at(n - 1));
    if (std::abs(f1) <= tol || std::abs(f2) <= tol)
      throw SingularPotentialError("build_spectral_problem: vanishing denominator of a_n", Site{n, m});
    sp.a.push_back(4.0 * p * p / (f1 * f2));
  }
  return sp;
}

SpectralProblem build_spectral_problem(const LatticeField& field, const LpkdvParams& params, long m,
                                       SpectralBoundary boundary, CoefficientForm form) {
  return spectral_problem_from_row(field.row(m), params.p(), m, boundary, form);
}

std::vector<cplx> eigenvalues(const SpectralProblem& sp, const EigenOptions& opts) {
  const auto L = static_cast<Eigen::Index>(sp.a.size());
  if (L < 8) throw PreconditionError("eigenvalues: problem size must be at least 8");
  const bool periodic = sp.boundary == SpectralBoundary::periodic;
  bool positive = std::all_of(sp.a.begin(), sp.a.end(), [](cplx z) { return z.imag() == 0.0 && z.real() > 0.0; });
  if (positive && periodic) {
    double log_prod = 0.0;
    for (const auto& z : sp.a) log_prod += std::log(z.real());
    positive = std::abs(log_prod) < 1e-12;
  }
  std::vector<cplx> out;
  if (positive && !opts.force_dense) {
    if (!periodic) {
      Eigen::VectorXd diag = Eigen::VectorXd::Zero(L), sub(L - 1);
      for (Eigen::Index i = 0; i + 1 < L; ++i) sub(i) = std::sqrt(sp.a[static_cast<std::size_t>(i)].real());
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
      es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
      if (es.info() != Eigen::Success)
        throw NumericalError("eigenvalues: tridiagonal solver did not converge (size " + std::to_string(L) + ")");
      for (Eigen::Index i = 0; i < L; ++i) out.emplace_back(es.eigenvalues()(i), 0.0);
    } else {
      Eigen::MatrixXd M = Eigen::MatrixXd::Zero(L, L);
      for (Eigen::Index i = 0; i < L; ++i) {
        const Eigen::Index j = (i + 1) % L;
        const double s = std::sqrt(sp.a[static_cast<std::size_t>(i)].real());
        M(i, j) += s;
        M(j, i) += s;
      }
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M, Eigen::EigenvaluesOnly);
      if (es.info() != Eigen::Success) throw NumericalError("eigenvalues: symmetric solver did not converge");
      for (Eigen::Index i = 0; i < L; ++i) out.emplace_back(es.eigenvalues()(i), 0.0);
    }
  } else {
    Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(L, L);
    for (Eigen::Index i = 0; i < L; ++i) {
      if (i > 0) M(i, i - 1) += 1.0;
      if (i + 1 < L) M(i, i + 1) += sp.a[static_cast<std::size_t>(i)];
    }
    if (periodic) {
      M(0, L - 1) += 1.0;
      M(L - 1, 0) += sp.a[static_cast<std::size_t>(L - 1)];
    }
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(M, false);
    if (es.info() != Eigen::Success)
      throw NumericalError("eigenvalues: dense solver did not converge (size " + std::to_string(L) + ")");
    for (Eigen::Index i = 0; i < L; ++i) out.push_back(es.eigenvalues()(i));
  }
  std::sort(out.begin(), out.end(), less_complex);
  return out;
}

// ---------------------------------------------------------------------------

DriftReport isospectral_drift(const LatticeField& field, const LpkdvParams& params, const std::vector<long>& m_list,
                              const DriftOptions& opts) {
  if (m_list.empty()) throw PreconditionError("isospectral_drift: empty m_list");
  const ResidualScan res = max_residual(field, params, 0);
  if (res.max_abs > opts.residual_tol)
    throw PreconditionError("isospectral_drift: field does not solve the quad equation (residual " +
                            std::to_string(res.max_abs) + " at " + to_string(res.where) + ")");
  const long Nn = field.Nn();
  for (long m : m_list) {
    if (m < 0 || m > field.Nm()) throw PreconditionError("isospectral_drift: row " + std::to_string(m) + " outside window");
    for (long k = 0; k <= opts.edge_columns; ++k) {
      if (std::abs(field(k, m) - field(0, m)) >= opts.edge_tol ||
          std::abs(field(Nn - k, m) - field(Nn, m)) >= opts.edge_tol)
        throw PreconditionError("isospectral_drift: row " + std::to_string(m) +
                                " is not flat near the window edges (potential leaks out of the window)");
    }
  }
  DriftReport rep;
  rep.m_list = m_list;
  rep.bound_states.resize(m_list.size());
  parallel_for(0, static_cast<std::ptrdiff_t>(m_list.size()), [&](std::ptrdiff_t i) {
    const auto ev = eigenvalues(build_spectral_problem(field, params, m_list[static_cast<std::size_t>(i)],
                                                       SpectralBoundary::dirichlet, opts.form));
    auto& bs = rep.bound_states[static_cast<std::size_t>(i)];
    for (const auto& z : ev)
      if (std::abs(z) > 2.0 + 1e-8) bs.push_back(z.real());
    std::sort(bs.begin(), bs.end());
  });
  const auto& ref = rep.bound_states.front();
  if (ref.empty()) {
    rep.status = "no discrete spectrum";
    return rep;
  }
  rep.status = "ok";
  for (const auto& bs : rep.bound_states) {
    if (bs.size() != ref.size()) {
      rep.drift = INFINITY;
      rep.status = "bound-state count changed";
      return rep;
    }
    for (std::size_t j = 0; j < bs.size(); ++j) rep.drift = std::max(rep.drift, std::abs(bs[j] - ref[j]));
  }
  return rep;
}

nlohmann::json DriftReport::to_json() const {
  return {{"m_list", m_list}, {"bound_states", bound_states}, {"drift", std::isfinite(drift) ? nlohmann::json(drift) : nlohmann::json("inf")},
          {"status", status}};
}

// ---------------------------------------------------------------------------

ZsProblem zs_problem_for_window(const Envelope& env, const ReductionCoefficients& c, const SlowCoordinates& coords,
                                long n_a, long n_b) {
  ZsProblem zs;
  const TrigInterpolant u(env.values(), env.xi_min(), env.period());
  zs.potential = [u](double x) { return u(x); };
  zs.xi_a = coords.xi(static_cast<double>(n_a), 0.0);
  zs.xi_b = coords.xi(static_cast<double>(n_b), 0.0);
  zs.kappa = c.carrier.kappa();
  zs.p = c.params.p();
  zs.scale = c.M1;
  zs.n_a = n_a;
  zs.n_b = n_b;
  return zs;
}

namespace {

/// Chebyshev differentiation matrix on t_j = cos(pi j / K).
void chebyshev(int K, Eigen::MatrixXd& D, Eigen::VectorXd& t) {
  t.resize(K + 1);
  for (int j = 0; j <= K; ++j) t(j) = std::cos(std::numbers::pi * j / K);
  Eigen::VectorXd cw(K + 1);
  for (int j = 0; j <= K; ++j) cw(j) = ((j == 0 || j == K) ? 2.0 : 1.0) * ((j % 2) ? -1.0 : 1.0);
  D.resize(K + 1, K + 1);
  for (int i = 0; i <= K; ++i) {
    double rowsum = 0.0;
    for (int j = 0; j <= K; ++j) {
      if (i == j) continue;
      D(i, j) = cw(i) / cw(j) / (t(i) - t(j));
      rowsum += D(i, j);
    }
    D(i, i) = -rowsum;
  }
}

std::vector<double> zs_solve(const ZsProblem& zs, int K) {
  Eigen::MatrixXd D;
  Eigen::VectorXd t;
  chebyshev(K, D, t);
  const double len = zs.xi_b - zs.xi_a;
  D *= 2.0 / len;
  const int Kp = K + 1;
  const double cc = 2.0 * std::pow(std::cos(zs.kappa / 2.0), 2) / zs.p;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(2 * Kp, 2 * Kp), B = Eigen::MatrixXd::Zero(2 * Kp, 2 * Kp);
  A.topLeftCorner(Kp, Kp) = zs.scale * D;
  A.bottomRightCorner(Kp, Kp) = zs.scale * D;
  for (int j = 0; j < Kp; ++j) {
    const double x = zs.xi_a + 0.5 * (t(j) + 1.0) * len;
    const cplx u = zs.potential(x);
    A(j, j) += cc * u.real();
    A(j, Kp + j) += cc * u.imag();
    A(Kp + j, j) += cc * u.imag();
    A(Kp + j, Kp + j) -= cc * u.real();
    B(j, Kp + j) = 1.0;
    B(Kp + j, j) = -1.0;
  }
  // Node 0 is xi_b, node K is xi_a.
  const double th_b = zs.kappa * static_cast<double>(zs.n_b) / 2.0;
  const double th_a = zs.kappa * static_cast<double>(zs.n_a) / 2.0;
  for (auto [row, node, th] : {std::tuple<int, int, double>{0, 0, th_b}, {Kp + K, K, th_a}}) {
    A.row(row).setZero();
    B.row(row).setZero();
    A(row, node) = std::cos(th);
    A(row, Kp + node) = -std::sin(th);
  }
  Eigen::GeneralizedEigenSolver<Eigen::MatrixXd> ges(A, B, false);
  if (ges.info() != Eigen::Success) throw NumericalError("zs_eigenvalues: QZ did not converge (K = " + std::to_string(K) + ")");
  std::vector<double> nu;
  const auto& al = ges.alphas();
  const auto& be = ges.betas();
  for (Eigen::Index i = 0; i < al.size(); ++i) {
    if (std::abs(be(i)) < 1e-12 * std::abs(al(i)) || be(i) == 0.0) continue;
    const cplx v = al(i) / be(i);
    if (!std::isfinite(v.real()) || std::abs(v.imag()) > 1e-6 * (1.0 + std::abs(v.real()))) continue;
    nu.push_back(v.real());
  }
  std::sort(nu.begin(), nu.end());
  return nu;
}

}  // namespace

ZsResult zs_eigenvalues(const ZsProblem& zs) {
  if (!zs.potential) throw PreconditionError("zs_eigenvalues: no potential");
  if (!(zs.xi_b > zs.xi_a)) throw PreconditionError("zs_eigenvalues: empty interval");
  if (zs.K < 8) throw PreconditionError("zs_eigenvalues: K must be at least 8");
  if (std::abs(zs.potential(zs.xi_a)) >= 1e-6 || std::abs(zs.potential(zs.xi_b)) >= 1e-6)
    throw PreconditionError("zs_eigenvalues: potential does not decay at the interval ends");
  std::vector<std::vector<double>> runs(2);
  parallel_for(0, 2, [&](std::ptrdiff_t i) { runs[static_cast<std::size_t>(i)] = zs_solve(zs, i == 0 ? zs.K : 2 * zs.K); });
  const double factor = 2.0 * std::sin(zs.kappa / 2.0);
  ZsResult r;
  for (double v : runs[1]) {
    double best = INFINITY;
    for (double w : runs[0]) best = std::min(best, std::abs(v - w));
    if (best < zs.stability_tol) r.mu1.push_back(factor * v);
  }
  std::sort(r.mu1.begin(), r.mu1.end());
  r.diagnostic = r.mu1.empty() ? "no refinement-stable eigenvalues"
                               : std::to_string(r.mu1.size()) + " stable of " + std::to_string(runs[1].size());
  return r;
}

cplx third_harmonic(cplx phi1, cplx u1, double kappa) {
  const cplx E = std::polar(1.0, kappa);
  if (std::abs(1.0 - E) < 1e-12) throw DomainError("third_harmonic: kappa = 0 makes 1 - e^{i kappa} vanish");
  return (E * E + E) / (1.0 - E) * u1 * phi1;
}

// ---------------------------------------------------------------------------

LimitReport spectral_limit_check(const Envelope& env, const ReductionCoefficients& c, const std::vector<long>& N_list,
                                 const LimitOptions& opts) {
  if (N_list.empty()) throw PreconditionError("spectral_limit_check: empty N_list");
  for (std::size_t i = 1; i < N_list.size(); ++i)
    if (N_list[i] <= N_list[i - 1]) throw PreconditionError("spectral_limit_check: N_list must be ascending");
  const double mu0 = 2.0 * std::cos(c.carrier.kappa() / 2.0);
  LimitReport rep;
  for (long N : N_list) {
    LimitEntry e;
    e.N = N;
    const long Nn = std::lround(opts.window_per_N * static_cast<double>(N));
    const AnsatzField a = assemble_ansatz(env, c, N, Nn, 0);
    const auto ev = eigenvalues(build_spectral_problem(a.assembled, c.params, 0));
    for (const auto& z : ev)
      if (std::abs(z.real() - mu0) < opts.bracket / static_cast<double>(N) && std::abs(z.imag()) < 1e-12)
        e.lattice_mu1.push_back(static_cast<double>(N) * (z.real() - mu0));
    // Sites 1 .. Nn-2 carry the Dirichlet problem; 0 and Nn-1 are its zero ends.
    ZsProblem zs = zs_problem_for_window(env, c, a.coords, 0, Nn - 1);
    zs.K = opts.K;
    for (double v : zs_eigenvalues(zs).mu1)
      if (std::abs(v) < opts.bracket) e.zs_mu1.push_back(v);
    if (e.lattice_mu1.empty()) {
      e.note = "no near-band-edge eigenvalue";
    } else {
      e.nearest_zero = *std::min_element(e.lattice_mu1.begin(), e.lattice_mu1.end(),
                                         [](double x, double y) { return std::abs(x) < std::abs(y); });
      double d = -1.0;
      for (double v : e.lattice_mu1) {
        if (std::abs(v) > opts.compare_halfwidth) continue;
        double best = INFINITY;
        for (double w : e.zs_mu1) best = std::min(best, std::abs(v - w));
        d = std::max(d, best);
      }
      if (d >= 0.0) e.discrepancy = d;
      else e.note = "no lattice estimate within the comparison half-width";
    }
    rep.entries.push_back(std::move(e));
  }
  rep.non_increasing = true;
  for (std::size_t i = 0; i < rep.entries.size(); ++i) {
    if (!rep.entries[i].discrepancy || !std::isfinite(*rep.entries[i].discrepancy)) {
      rep.non_increasing = false;
      continue;
    }
    if (i > 0 && rep.entries[i - 1].discrepancy && *rep.entries[i].discrepancy > *rep.entries[i - 1].discrepancy * (1.0 + 1e-9))
      rep.non_increasing = false;
  }
  if (rep.entries.size() >= 2) {
    const auto& x = rep.entries[rep.entries.size() - 2];
    const auto& y = rep.entries.back();
    if (x.nearest_zero && y.nearest_zero && *y.nearest_zero != 0.0) {
      rep.cauchy_ratio = *x.nearest_zero / *y.nearest_zero;
      rep.cauchy_ok = std::abs(*rep.cauchy_ratio - 1.0) <= 0.25;
    }
  }
  rep.pass = rep.non_increasing && rep.cauchy_ok;
  return rep;
}

nlohmann::json LimitReport::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& e : entries) {
    nlohmann::json r = {{"N", e.N}, {"lattice_mu1", e.lattice_mu1}, {"zs_mu1", e.zs_mu1}, {"note", e.note}};
    r["discrepancy"] = e.discrepancy ? nlohmann::json(*e.discrepancy) : nlohmann::json(nullptr);
    r["nearest_zero"] = e.nearest_zero ? nlohmann::json(*e.nearest_zero) : nlohmann::json(nullptr);
    rows.push_back(r);
  }
  return {{"entries", rows},
          {"non_increasing", non_increasing},
          {"cauchy_ratio", cauchy_ratio ? nlohmann::json(*cauchy_ratio) : nlohmann::json(nullptr)},
          {"cauchy_ok", cauchy_ok},
          {"pass", pass}};
}

void write_spectrum_csv(const std::vector<cplx>& ev, std::ostream& os) {
  os << "index,re,im\n";
  char buf[96];
  for (std::size_t i = 0; i < ev.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g\n", i, ev[i].real(), ev[i].imag());
    os << buf;
  }
}

}  // namespace lpkdv
