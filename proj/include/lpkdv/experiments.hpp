#pragma once

// End-to-end checks shared by the command-line front-end and the acceptance
// suite. Each returns a PASS/FAIL verdict with a JSON report; none of them
// writes files.

#include <string>

#include "json.hpp"
#include "lpkdv/config.hpp"
#include "lpkdv/lattice_field.hpp"

namespace lpkdv {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string summary;  // one line for humans
  nlohmann::json report;
};

/// Exact rational suite: forward differences, formal derivatives, the
/// cross-lattice identity and the shift decomposition for all polynomial
/// degrees <= max_degree and h in {1, 1/2, 1/3, 2/5}.
CheckResult check_operator_calculus(int max_degree = 5);

/// Plane-wave linear residual <= tol ("dispersion", 1e-12) at the configured
/// point and for `draws` random (p, q, kappa).
CheckResult check_dispersion(const ExperimentConfig& cfg, int draws = 100);

/// Pinned reduction coefficients at (1.5, 0.5, pi/2, 1) and
/// |M1_tilde / M1| = |d omega / d kappa| on `draws` random points.
CheckResult check_coefficients(const ExperimentConfig& cfg, int draws = 20);

/// Lattice solution from cfg.lattice; residual <= tol ("simulate", 1e-9).
CheckResult check_lattice_simulation(const ExperimentConfig& cfg, LatticeField* solution = nullptr);

/// Ansatz residual exponent >= 2.7 over cfg.N_list, and dropping u1^(0) or
/// u2^(2) lowers it by >= 0.7.
CheckResult check_residual_scaling(const ExperimentConfig& cfg);

/// Constant and plane-wave NLS solutions, mass conservation, phase and
/// translation equivariance over cfg.nls.tau_final.
CheckResult check_nls_solver(const ExperimentConfig& cfg, Envelope* evolved = nullptr);

/// commutator_test for every pair of {nls, h1, h2, h4}, plus a perturbed h4
/// that must be rejected.
CheckResult check_commutators(const ExperimentConfig& cfg);

/// symmetry_residual_scaling for flow1, flow2 (exponent >= 4) and the
/// negative control (exponent < 2).
CheckResult check_symmetry_flows(const ExperimentConfig& cfg);

/// harmonic_projection at the last two N of cfg.N_list.
CheckResult check_harmonic_projection(const ExperimentConfig& cfg);

/// Free Dirichlet and periodic spectra against closed forms and the gauge
/// invariance of the symmetrised solver.
CheckResult check_free_spectra(const ExperimentConfig& cfg);

/// Isospectral drift of a kink solution for the two configured margins.
CheckResult check_isospectral(const ExperimentConfig& cfg);

/// spectral_limit_check over cfg.N_list.
CheckResult check_spectral_limit(const ExperimentConfig& cfg);

/// Library, compiler and backend versions for run manifests.
nlohmann::json build_info();

/// The lattice solution described by cfg.lattice.
LatticeField lattice_solution(const ExperimentConfig& cfg);

}  // namespace lpkdv
