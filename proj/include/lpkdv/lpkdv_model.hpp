#pragma once

#include <array>
#include <vector>

#include "lpkdv/errors.hpp"
#include "lpkdv/lattice_field.hpp"

namespace lpkdv {

/// p, q of the lpKdV quad equation with mu = p - q, zeta = p + q.
class LpkdvParams {
 public:
  /// DomainError if p == q or p == -q.
  LpkdvParams(double p, double q);
  double p() const noexcept { return p_; }
  double q() const noexcept { return q_; }
  double mu() const noexcept { return p_ - q_; }
  double zeta() const noexcept { return p_ + q_; }

 private:
  double p_, q_;
};

/// mu (u11 - u00) + zeta (u10 - u01) - (u10 - u01)(u11 - u00).
cplx quad_residual(const LpkdvParams& params, cplx u00, cplx u10, cplx u01, cplx u11);
/// Residual of the plaquette with lower-left corner (n, m); IndexError if it
/// does not fit in the window.
cplx quad_residual(const LatticeField& field, const LpkdvParams& params, long n, long m);

struct ResidualScan {
  double max_abs = 0.0;
  Site where;
};
/// Max |quad_residual| over plaquettes whose four corners keep `margin`
/// columns/rows away from the window edges.
ResidualScan max_residual(const LatticeField& field, const LpkdvParams& params, long margin = 0);

/// u11 = u00 + zeta w / (w - mu), w = u10 - u01. SingularCornerError when
/// |w - mu| < 1e-12 (1 + |mu|).
cplx corner_solve(const LpkdvParams& params, cplx u00, cplx u10, cplx u01, Site where = {});

enum class Corner { c00, c10, c01, c11 };
/// Solves the quad equation for one corner given the other three; the entry
/// of `corners` (ordered u00, u10, u01, u11) at the unknown position is ignored.
cplx solve_corner(const LpkdvParams& params, Corner unknown, const std::array<cplx, 4>& corners,
                  Site where = {});

/// Corner initial-value data: row m = 0 (Nn + 1 values) and column n = 0
/// (Nm + 1 values); row0[0] must equal col0[0].
struct CornerData {
  std::vector<cplx> row0;
  std::vector<cplx> col0;
};

/// Fills [0,Nn]x[0,Nm] by corner_solve, one anti-diagonal at a time.
/// Note: the linearised sweep amplifies by |zeta/mu| per step, so for
/// p q > 0 it is only usable on small windows.
LatticeField evolve_ivp(const CornerData& boundary, const LpkdvParams& params);

/// Row-by-row evolution in m: row m + 1 is solved right to left for u01
/// from the given right column u_{Nn, m}. Bounded for p q > 0.
LatticeField evolve_rows(const std::vector<cplx>& row0, const std::vector<cplx>& right_column,
                         const LpkdvParams& params);

/// omega(kappa) = -2 atan(((zeta + mu)/(zeta - mu)) tan(kappa/2)).
/// DomainError unless 0 < kappa < pi - 1e-8.
double dispersion(const LpkdvParams& params, double kappa);

class CarrierWave {
 public:
  CarrierWave(const LpkdvParams& params, double kappa);
  double kappa() const noexcept { return kappa_; }
  double omega() const noexcept { return omega_; }

 private:
  double kappa_, omega_;
};

/// mu (T_n T_m - 1) u + zeta (T_n - T_m) u for u = exp(i(kappa n - omega m)).
cplx linear_part_residual(const LpkdvParams& params, double kappa, double omega, long n, long m);

}  // namespace lpkdv
