#include "lpkdv/nls_dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <cstdio>
#include <istream>
#include <ostream>
#include <string>

#include "lpkdv/errors.hpp"
#include "lpkdv/fft.hpp"
#include "lpkdv/parallel.hpp"

namespace lpkdv {

void NlsCoefficients::validate() const {
  if (!std::isfinite(rho1) || !std::isfinite(rho2)) throw DomainError("NlsCoefficients: non-finite value");
  if (rho1 == 0.0) throw DomainError("NlsCoefficients: rho1 must be nonzero");
}

Envelope::Envelope(double xi_min, double dxi, std::vector<cplx> values, double tau)
    : xi_min_(xi_min), dxi_(dxi), tau_(tau), values_(std::move(values)) {
  if (!(dxi > 0.0)) throw DomainError("Envelope: dxi must be positive");
  if (values_.empty()) throw PreconditionError("Envelope: no samples");
}

namespace {

Envelope sample(std::size_t L, double dxi, const std::function<cplx(double)>& f) {
  std::vector<cplx> v(L);
  for (std::size_t j = 0; j < L; ++j) v[j] = f(dxi * static_cast<double>(j));
  return Envelope(0.0, dxi, std::move(v));
}

void require_size(const Envelope& env) {
  if (env.size() < 16) throw PreconditionError("envelope needs at least 16 grid points");
}

double max_abs(const std::vector<cplx>& v) {
  double m = 0.0;
  for (const auto& z : v) m = std::max(m, std::abs(z));
  return m;
}

}  // namespace

Envelope gaussian_envelope(std::size_t L, double dxi, double amplitude, double width, double center) {
  return sample(L, dxi, [&](double x) {
    const double s = (x - center) / width;
    return cplx(amplitude * std::exp(-s * s), 0.0);
  });
}

Envelope sech_envelope(std::size_t L, double dxi, double amplitude, double width, double center) {
  return sample(L, dxi, [&](double x) { return cplx(amplitude / std::cosh((x - center) / width), 0.0); });
}

Envelope plane_envelope(std::size_t L, double dxi, cplx amplitude, double k) {
  return sample(L, dxi, [&](double x) { return amplitude * std::polar(1.0, k * x); });
}

// ---------------------------------------------------------------------------

std::vector<cplx> nls_rhs(const Envelope& env, const NlsCoefficients& c) {
  require_size(env);
  const auto& u = env.values();
  const auto uxx = spectral_derivative(u, env.period(), 2);
  std::vector<cplx> out(u.size());
  const cplx mi(0.0, -1.0);
  for (std::size_t j = 0; j < u.size(); ++j)
    out[j] = mi * (c.rho1 * uxx[j] + c.rho2 * std::norm(u[j]) * u[j]);
  return out;
}

Envelope nls_evolve(const Envelope& env, const NlsCoefficients& c, double tau_final, double dtau) {
  c.validate();
  if (!(dtau > 0.0)) throw DomainError("nls_evolve: dtau must be positive");
  const double span = tau_final - env.tau();
  if (span < 0.0) throw DomainError("nls_evolve: tau_final lies before the envelope time");
  Envelope out = env;
  if (span == 0.0) return out;
  const auto steps = static_cast<long>(std::ceil(span / dtau - 1e-12));
  const double h = span / static_cast<double>(steps);

  const std::size_t L = env.size();
  const auto k = wavenumbers(L, env.period());
  const double w1 = 1.0 / (2.0 - std::cbrt(2.0));
  const double w0 = -std::cbrt(2.0) * w1;
  // Linear multipliers for the three Strang substeps of sizes w1 h, w0 h, w1 h.
  auto multiplier = [&](double step) {
    std::vector<cplx> m(L);
    for (std::size_t j = 0; j < L; ++j) m[j] = std::polar(1.0, c.rho1 * k[j] * k[j] * step);
    return m;
  };
  const auto lin1 = multiplier(w1 * h), lin0 = multiplier(w0 * h);
  auto& u = out.values();
  auto nonlinear = [&](double step) {
    for (auto& z : u) z *= std::polar(1.0, -c.rho2 * std::norm(z) * step);
  };
  auto linear = [&](const std::vector<cplx>& m) {
    auto f = dft(u);
    for (std::size_t j = 0; j < L; ++j) f[j] *= m[j];
    u = idft(f);
  };
  auto strang = [&](double step, const std::vector<cplx>& m) {
    nonlinear(0.5 * step);
    linear(m);
    nonlinear(0.5 * step);
  };
  for (long s = 0; s < steps; ++s) {
    strang(w1 * h, lin1);
    strang(w0 * h, lin0);
    strang(w1 * h, lin1);
    for (const auto& z : u)
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
        throw NumericalError("nls_evolve: non-finite value after step " + std::to_string(s + 1) +
                             " (tau = " + std::to_string(env.tau() + h * static_cast<double>(s + 1)) + ")");
  }
  out.set_tau(tau_final);
  return out;
}

double mass(const Envelope& env) {
  double m = 0.0;
  for (const auto& z : env.values()) m += std::norm(z);
  return m * env.dxi();
}

// ---------------------------------------------------------------------------

std::string to_string(Flow f) {
  switch (f) {
    case Flow::h1: return "h1";
    case Flow::h2: return "h2";
    case Flow::h3: return "nls";
    case Flow::h4: return "h4";
  }
  return "?";
}

Flow flow_from_string(const std::string& s) {
  if (s == "h1") return Flow::h1;
  if (s == "h2") return Flow::h2;
  if (s == "h3" || s == "nls" || s == "nls_rhs") return Flow::h3;
  if (s == "h4") return Flow::h4;
  throw PreconditionError("unknown flow '" + s + "' (expected h1, h2, nls, h4)");
}

std::vector<cplx> symmetry_rhs(const Envelope& env, const NlsCoefficients& c, Flow which) {
  require_size(env);
  const auto& u = env.values();
  std::vector<cplx> out(u.size());
  switch (which) {
    case Flow::h1:
      for (std::size_t j = 0; j < u.size(); ++j) out[j] = cplx(0.0, 1.0) * u[j];
      return out;
    case Flow::h2:
      return spectral_derivative(u, env.period(), 1);
    case Flow::h3:
      return nls_rhs(env, c);
    case Flow::h4: {
      const auto u1 = spectral_derivative(u, env.period(), 1);
      const auto u3 = spectral_derivative(u, env.period(), 3);
      for (std::size_t j = 0; j < u.size(); ++j)
        out[j] = c.rho1 * u3[j] + 3.0 * c.rho2 * std::norm(u[j]) * u1[j];
      return out;
    }
  }
  return out;
}

double high_mode_fraction(const Envelope& env) {
  const auto f = dft(env.values());
  const auto k = wavenumbers(env.size(), env.period());
  double kmax = 0.0;
  for (double x : k) kmax = std::max(kmax, std::abs(x));
  double total = 0.0, top = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) {
    const double e = std::norm(f[j]);
    total += e;
    if (std::abs(k[j]) > 2.0 * kmax / 3.0) top += e;
  }
  return total == 0.0 ? 0.0 : top / total;
}

FlowMap flow_map(const NlsCoefficients& c, Flow which) {
  return [c, which](const Envelope& e) { return symmetry_rhs(e, c, which); };
}

namespace {

/// K'[u] v by central differences, real and imaginary parts of v handled
/// as two separate normalised directions.
std::vector<cplx> frechet(const FlowMap& K, const Envelope& env, const std::vector<cplx>& v, double eps) {
  const std::size_t L = env.size();
  std::vector<cplx> acc(L, 0.0);
  for (int part = 0; part < 2; ++part) {
    std::vector<cplx> dir(L);
    for (std::size_t j = 0; j < L; ++j) dir[j] = part == 0 ? cplx(v[j].real(), 0.0) : cplx(0.0, v[j].imag());
    const double scale = max_abs(dir);
    if (scale == 0.0) continue;
    Envelope plus = env, minus = env;
    for (std::size_t j = 0; j < L; ++j) {
      plus.values()[j] += eps * dir[j] / scale;
      minus.values()[j] -= eps * dir[j] / scale;
    }
    const auto kp = K(plus);
    const auto km = K(minus);
    for (std::size_t j = 0; j < L; ++j) acc[j] += (kp[j] - km[j]) * (scale / (2.0 * eps));
  }
  return acc;
}

std::vector<cplx> commutator(const FlowMap& A, const FlowMap& B, const Envelope& env, double eps) {
  const auto ka = A(env);
  const auto kb = B(env);
  auto out = frechet(A, env, kb, eps);
  const auto db = frechet(B, env, ka, eps);
  for (std::size_t j = 0; j < out.size(); ++j) out[j] -= db[j];
  return out;
}

}  // namespace

double commutator_norm(const NlsCoefficients& c, const Envelope& env, Flow a, Flow b, double eps) {
  if (!(eps > 0.0)) throw DomainError("commutator_norm: eps must be positive");
  return max_abs(commutator(flow_map(c, a), flow_map(c, b), env, eps));
}

CommutatorReport commutator_test(const NlsCoefficients& c, const Envelope& env, Flow a, Flow b,
                                 const std::vector<double>& eps, double floor) {
  c.validate();
  return commutator_test(flow_map(c, a), flow_map(c, b), env, eps, floor, to_string(a), to_string(b));
}

CommutatorReport commutator_test(const FlowMap& A, const FlowMap& B, const Envelope& env,
                                 const std::vector<double>& eps, double floor, const std::string& name_a,
                                 const std::string& name_b) {
  require_size(env);
  if (eps.size() < 3) throw PreconditionError("commutator_test: need at least three eps values");
  for (std::size_t i = 0; i + 1 < eps.size(); ++i)
    if (!(eps[i] > 0.0) || std::abs(eps[i] / eps[i + 1] - 2.0) > 1e-12)
      throw PreconditionError("commutator_test: eps values must halve successively");
  const double hf = high_mode_fraction(env);
  if (hf >= 1e-10)
    throw PreconditionError("commutator_test: envelope not spectrally resolved (top-third energy fraction " +
                            std::to_string(hf) + ")");
  CommutatorReport r;
  r.a = name_a;
  r.b = name_b;
  r.eps = eps;
  r.floor = floor;
  const std::size_t n = eps.size();
  std::vector<std::vector<cplx>> D(n);
  parallel_for(0, static_cast<std::ptrdiff_t>(n), [&](std::ptrdiff_t i) {
    D[static_cast<std::size_t>(i)] = commutator(A, B, env, eps[static_cast<std::size_t>(i)]);
  });
  for (const auto& d : D) r.norm.push_back(max_abs(d));

  // Round-off grows like 1/eps; scale the estimate at the smallest eps.
  std::vector<cplx> R(env.size());
  for (std::size_t j = 0; j < env.size(); ++j) R[j] = D[n - 3][j] - 5.0 * D[n - 2][j] + 4.0 * D[n - 1][j];
  const double noise_last = max_abs(R) / 4.8;
  for (std::size_t i = 0; i < n; ++i) r.noise.push_back(noise_last * eps[n - 1] / eps[i]);

  bool ok = true;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double q = r.norm[i + 1] > 0.0 ? r.norm[i] / r.norm[i + 1] : INFINITY;
    r.ratio.push_back(q);
    if (r.norm[i + 1] <= std::max(floor, 3.0 * r.noise[i + 1])) continue;
    ++r.checked_halvings;
    if (q < 3.5) ok = false;
  }
  r.pass = ok;
  if (!ok)
    r.verdict = "no O(eps^2) decrease";
  else if (r.checked_halvings == 0)
    r.verdict = "at floor";
  else
    r.verdict = "O(eps^2) until floor";
  return r;
}

nlohmann::json CommutatorReport::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < eps.size(); ++i)
    rows.push_back({{"eps", eps[i]}, {"norm", norm[i]}, {"noise", noise[i]}});
  return {{"flowA", a},         {"flowB", b},       {"sweep", rows},
          {"ratios", ratio},    {"floor", floor},   {"checked_halvings", checked_halvings},
          {"pass", pass},       {"verdict", verdict}};
}

// ---------------------------------------------------------------------------

void write_envelope_csv(const Envelope& env, std::ostream& os) {
  os << "xi,re,im\n";
  char buf[96];
  for (std::size_t j = 0; j < env.size(); ++j) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", env.xi(j), env.values()[j].real(),
                  env.values()[j].imag());
    os << buf;
  }
}

Envelope read_envelope_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("xi,re,im", 0) != 0)
    throw PreconditionError("envelope CSV: missing header xi,re,im");
  std::vector<double> xs;
  std::vector<cplx> vs;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    double x, re, im;
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &x, &re, &im) != 3)
      throw PreconditionError("envelope CSV: malformed line '" + line + "'");
    xs.push_back(x);
    vs.emplace_back(re, im);
  }
  if (xs.size() < 2) throw PreconditionError("envelope CSV: need at least two samples");
  const double dxi = xs[1] - xs[0];
  for (std::size_t j = 1; j < xs.size(); ++j)
    if (std::abs(xs[j] - xs[0] - dxi * static_cast<double>(j)) > 1e-9 * (1.0 + std::abs(xs[j])))
      throw PreconditionError("envelope CSV: grid is not uniform");
  return Envelope(xs[0], dxi, std::move(vs));
}

nlohmann::json envelope_to_json(const Envelope& env) {
  std::vector<double> re, im;
  for (const auto& z : env.values()) {
    re.push_back(z.real());
    im.push_back(z.imag());
  }
  return {{"xi_min", env.xi_min()}, {"dxi", env.dxi()}, {"L", env.size()},
          {"tau", env.tau()},       {"re", re},         {"im", im}};
}

}  // namespace lpkdv
