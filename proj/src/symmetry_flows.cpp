#include "lpkdv/symmetry_flows.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "lpkdv/errors.hpp"
#include "lpkdv/parallel.hpp"
#include "lpkdv/scaling_fit.hpp"

namespace lpkdv {

std::string to_string(FlowId f) {
  switch (f) {
    case FlowId::flow1: return "flow1";
    case FlowId::flow2: return "flow2";
    case FlowId::negative_control: return "negative_control";
  }
  return "?";
}

FlowId flow_id_from_string(const std::string& s) {
  if (s == "flow1") return FlowId::flow1;
  if (s == "flow2") return FlowId::flow2;
  if (s == "negative_control" || s == "control") return FlowId::negative_control;
  throw PreconditionError("unknown flow '" + s + "' (expected flow1, flow2, negative_control)");
}

namespace {

bool finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

const cplx kNaN(NAN, NAN);

}  // namespace

LatticeField flow_rhs(const LatticeField& u, const LpkdvParams& params, FlowId which) {
  const long Nn = u.Nn(), Nm = u.Nm();
  if (Nn < 2 * kFlowMargin) throw PreconditionError("flow_rhs: window too narrow for the flow stencil");
  const double p = params.p();
  const double tol = 1e-10 * std::abs(p);
  LatticeField out(Nn, Nm, u.kind());
  for (auto& z : out.data()) z = kNaN;
  parallel_for(0, Nm + 1, [&](std::ptrdiff_t mm) {
    const auto m = static_cast<long>(mm);
    auto den = [&](cplx d, long n) {
      if (finite(d) && std::abs(d) <= tol) throw SingularFlowError("flow_rhs: vanishing denominator", Site{n, m});
      return d;
    };
    for (long n = kFlowMargin; n <= Nn - kFlowMargin; ++n) {
      cplx v;
      switch (which) {
        case FlowId::flow1:
          v = 1.0 / den(2.0 * p + u(n - 1, m) - u(n + 1, m), n) - 1.0 / (2.0 * p);
          break;
        case FlowId::negative_control:
          v = 1.0 / den(2.0 * p + u(n + 1, m) - u(n + 2, m), n) - 1.0 / (2.0 * p);
          break;
        case FlowId::flow2: {
          const cplx a = den(2.0 * p + u(n - 1, m) - u(n + 1, m), n);
          const cplx b = den(2.0 * p + u(n, m) - u(n + 2, m), n);
          const cplx c = den(2.0 * p + u(n - 2, m) - u(n, m), n);
          v = 1.0 / (a * a) * (1.0 / b + 1.0 / c) - 1.0 / (4.0 * p * p * p);
          break;
        }
      }
      out(n, m) = finite(v) ? v : kNaN;
    }
  });
  return out;
}

FlowState flow_step(const FlowState& s, const LpkdvParams& params, FlowId which, double h) {
  const LatticeField& u = s.field;
  auto axpy = [&](const LatticeField& k, double a) {
    LatticeField r = u;
    for (std::size_t i = 0; i < r.size(); ++i) r.data()[i] += a * k.data()[i];
    return r;
  };
  int stage = 1;
  try {
    const LatticeField k1 = flow_rhs(u, params, which);
    stage = 2;
    const LatticeField k2 = flow_rhs(axpy(k1, h / 2.0), params, which);
    stage = 3;
    const LatticeField k3 = flow_rhs(axpy(k2, h / 2.0), params, which);
    stage = 4;
    const LatticeField k4 = flow_rhs(axpy(k3, h), params, which);
    FlowState out{u, s.lambda + h, s.invalid_margin + 4 * kFlowMargin};
    for (std::size_t i = 0; i < out.field.size(); ++i)
      out.field.data()[i] += h / 6.0 * (k1.data()[i] + 2.0 * k2.data()[i] + 2.0 * k3.data()[i] + k4.data()[i]);
    // Anything inside the invalid margin is stale, mark it.
    for (long m = 0; m <= out.field.Nm(); ++m)
      for (long n = 0; n <= out.field.Nn(); ++n)
        if (n < out.invalid_margin || n > out.field.Nn() - out.invalid_margin) out.field(n, m) = kNaN;
    return out;
  } catch (const SingularFlowError& e) {
    throw SingularFlowError(std::string(e.what()) + " (RK4 stage " + std::to_string(stage) + ")", e.site());
  }
}

// ---------------------------------------------------------------------------

namespace {

double interior_residual(const LatticeField& f, const LpkdvParams& params, long margin) {
  double mx = 0.0;
  for (long m = 0; m < f.Nm(); ++m)
    for (long n = margin; n + 1 <= f.Nn() - margin; ++n) {
      const double r = std::abs(quad_residual(params, f(n, m), f(n + 1, m), f(n, m + 1), f(n + 1, m + 1)));
      mx = std::isnan(r) ? INFINITY : std::max(mx, r);
    }
  return mx;
}

}  // namespace

SymmetryScalingReport symmetry_residual_scaling(const LatticeField& solution, const LpkdvParams& params, FlowId which,
                                                const std::vector<double>& lambda_list) {
  if (lambda_list.size() < 3) throw PreconditionError("symmetry_residual_scaling: need at least three lambda values");
  for (std::size_t i = 0; i < lambda_list.size(); ++i)
    if (!(lambda_list[i] > 0.0) || (i > 0 && lambda_list[i] <= lambda_list[i - 1]))
      throw PreconditionError("symmetry_residual_scaling: lambda_list must be positive and ascending");
  SymmetryScalingReport rep;
  rep.which = which;
  rep.lambda = lambda_list;
  rep.initial_residual = max_residual(solution, params, 0).max_abs;
  if (rep.initial_residual > 1e-11)
    throw PreconditionError("symmetry_residual_scaling: solution residual " + std::to_string(rep.initial_residual) +
                            " exceeds 1e-11");
  // Round-off level of the residual itself for fields of this size.
  const double A = solution.max_abs();
  rep.floor = std::max(10.0 * rep.initial_residual,
                       16.0 * DBL_EPSILON * (std::abs(params.mu()) + std::abs(params.zeta()) + 2.0 * A) * (2.0 * A + 1e-300));
  rep.residual.resize(lambda_list.size());
  parallel_for(0, static_cast<std::ptrdiff_t>(lambda_list.size()), [&](std::ptrdiff_t i) {
    const FlowState s = flow_step(FlowState{solution, 0.0, 0}, params, which, lambda_list[static_cast<std::size_t>(i)]);
    rep.residual[static_cast<std::size_t>(i)] = interior_residual(s.field, params, s.invalid_margin);
  });
  const PowerFit fit = fit_power_law(rep.lambda, rep.residual, rep.floor, 2);
  if (fit.status == "exact" || fit.status == "below floor" || fit.status == "insufficient data") {
    rep.status = "below measurement floor";
    rep.pass = true;
    return rep;
  }
  rep.exponent = fit.exponent;
  rep.fit_r2 = fit.r2;
  rep.pass = *fit.exponent >= 4.0;
  rep.status = rep.pass ? "pass" : "fail";
  return rep;
}

nlohmann::json SymmetryScalingReport::to_json() const {
  return {{"flow", to_string(which)},
          {"lambda", lambda},
          {"residual", residual},
          {"initial_residual", initial_residual},
          {"floor", floor},
          {"exponent", exponent ? nlohmann::json(*exponent) : nlohmann::json(nullptr)},
          {"fit_r2", fit_r2},
          {"status", status},
          {"pass", pass}};
}

std::string SymmetryScalingReport::to_csv() const {
  std::ostringstream os;
  os << "lambda,residual\n";
  char buf[96];
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", lambda[i], residual[i]);
    os << buf;
  }
  return os.str();
}

// ---------------------------------------------------------------------------

ProjectionReport harmonic_projection(const AnsatzField& ansatz, const ReductionCoefficients& c,
                                     const ProjectionOptions& opts) {
  const LatticeField& u = ansatz.assembled;
  const double kappa = c.carrier.kappa(), omega = c.carrier.omega(), p = c.params.p();
  ProjectionReport rep;
  rep.N = ansatz.N;
  rep.block = static_cast<long>(std::ceil(2.0 * std::numbers::pi / kappa));
  rep.ratio21_analytic = (1.0 + std::cos(kappa) / 2.0) / (p * p);
  const LatticeField f1 = flow_rhs(u, c.params, FlowId::flow1);
  const LatticeField f2 = flow_rhs(u, c.params, FlowId::flow2);
  const cplx coef(0.0, std::sin(kappa) / (2.0 * p * p));
  const double invN = 1.0 / static_cast<double>(ansatz.N);
  const long P = rep.block;
  const long n_lo = kFlowMargin + opts.edge, n_hi = u.Nn() - kFlowMargin - opts.edge;

  std::vector<cplx> ratio21;
  double err_sum = 0.0;
  for (long n0 = n_lo; n0 + P - 1 <= n_hi; n0 += opts.stride_n)
    for (long m0 = 0; m0 + P - 1 <= u.Nm(); m0 += opts.stride_m) {
      cplx g1 = 0.0, g2 = 0.0, ub = 0.0;
      for (long m = m0; m < m0 + P; ++m)
        for (long n = n0; n < n0 + P; ++n) {
          const cplx demod = std::polar(1.0, -(kappa * static_cast<double>(n) - omega * static_cast<double>(m)));
          g1 += f1(n, m) * demod;
          g2 += f2(n, m) * demod;
          ub += ansatz.first_harmonic(n, m);
        }
      const double w = 1.0 / static_cast<double>(P * P);
      g1 *= w;
      g2 *= w;
      ub *= w;
      if (std::abs(ub) <= opts.threshold || !finite(g1) || !finite(g2)) continue;
      const cplx pred = coef * ub * invN;
      const double err = std::abs(g1 / pred - 1.0);
      rep.coefficient_error_max = std::max(rep.coefficient_error_max, err);
      err_sum += err;
      ratio21.push_back(g2 / g1);
    }
  rep.points = ratio21.size();
  if (rep.points == 0) return rep;
  rep.coefficient_error_mean = err_sum / static_cast<double>(rep.points);
  cplx mean = 0.0;
  for (const auto& r : ratio21) mean += r;
  mean /= static_cast<double>(rep.points);
  double var = 0.0;
  for (const auto& r : ratio21) var += std::norm(r - mean);
  rep.ratio21_mean = mean;
  rep.ratio21_rel_std = std::sqrt(var / static_cast<double>(rep.points)) / std::abs(mean);
  return rep;
}

nlohmann::json ProjectionReport::to_json() const {
  return {{"N", N},
          {"block", block},
          {"points", points},
          {"coefficient_error_max", coefficient_error_max},
          {"coefficient_error_mean", coefficient_error_mean},
          {"ratio21_mean", {{"re", ratio21_mean.real()}, {"im", ratio21_mean.imag()}}},
          {"ratio21_rel_std", ratio21_rel_std},
          {"ratio21_analytic", ratio21_analytic}};
}

}  // namespace lpkdv
