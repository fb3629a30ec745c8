#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "lpkdv/lattice_field.hpp"
#include "lpkdv/lpkdv_model.hpp"
#include "lpkdv/multiscale_reduction.hpp"

namespace lpkdv {

/// flow1: 1/(2p + u_{n-1} - u_{n+1}) - 1/(2p).
/// flow2: 1/a^2 (1/b + 1/c) - 1/(4p^3) with a = 2p + u_{n-1} - u_{n+1},
///        b = 2p + u_n - u_{n+2}, c = 2p + u_{n-2} - u_n.
/// negative_control: flow1 with u_{n+1} - u_{n+2} in place of u_{n-1} - u_{n+1}.
enum class FlowId { flow1, flow2, negative_control };
std::string to_string(FlowId f);
FlowId flow_id_from_string(const std::string& s);

/// Columns lost on each side per RHS evaluation.
constexpr long kFlowMargin = 2;

/// RHS at every site with kFlowMargin <= n <= Nn - kFlowMargin; other
/// columns hold NaN. Sites whose stencil touches NaN give NaN.
/// SingularFlowError when a finite denominator has modulus <= 1e-10 p.
LatticeField flow_rhs(const LatticeField& field, const LpkdvParams& params, FlowId which);

struct FlowState {
  LatticeField field;
  double lambda = 0.0;
  /// Columns at each side of the window that no longer hold valid data.
  long invalid_margin = 0;
};

/// Classical RK4 in lambda, pointwise. The invalid margin grows by
/// 4 kFlowMargin per step. Singularities are rethrown with the stage index.
FlowState flow_step(const FlowState& state, const LpkdvParams& params, FlowId which, double dlambda);

struct SymmetryScalingReport {
  FlowId which = FlowId::flow1;
  std::vector<double> lambda;
  std::vector<double> residual;
  double initial_residual = 0.0;
  double floor = 0.0;
  std::optional<double> exponent;
  double fit_r2 = 0.0;
  std::string status;  // "pass", "fail", "below measurement floor"
  bool pass = false;
  nlohmann::json to_json() const;
  std::string to_csv() const;
};

/// One RK4 step per lambda, then R(lambda) = max |quad residual| over the
/// valid interior; R ~ lambda^exponent fitted over the values above the
/// round-off floor. PASS iff exponent >= 4, or every value is at the floor.
/// PreconditionError if the solution's own residual exceeds 1e-11 or
/// lambda_list is not ascending with >= 3 entries.
SymmetryScalingReport symmetry_residual_scaling(const LatticeField& solution, const LpkdvParams& params,
                                                FlowId which, const std::vector<double>& lambda_list);

struct ProjectionOptions {
  double threshold = 1e-8;  // blocks with |<u1>| below this are skipped
  long stride_n = 2, stride_m = 4;
  long edge = 4;            // extra columns skipped beyond the NaN margin
};

struct ProjectionReport {
  long N = 0;
  long block = 0;          // ceil(2 pi / kappa)
  std::size_t points = 0;
  double coefficient_error_max = 0.0;   // max |F1 / prediction - 1| for flow1
  double coefficient_error_mean = 0.0;
  cplx ratio21_mean;                    // flow2 / flow1 projections
  double ratio21_rel_std = 0.0;         // std |ratio| / |mean|
  double ratio21_analytic = 0.0;        // (1 + cos(kappa)/2) / p^2
  nlohmann::json to_json() const;
};

/// Demodulates flow_rhs by e^{-i(kappa n - omega m)}, averages over
/// block x block windows and compares with (1/N)(i sin kappa / 2p^2) u1^(1)
/// averaged over the same windows. points == 0 when no block passes the
/// threshold (e.g. a zero envelope).
ProjectionReport harmonic_projection(const AnsatzField& ansatz, const ReductionCoefficients& c,
                                     const ProjectionOptions& opts = {});

}  // namespace lpkdv
