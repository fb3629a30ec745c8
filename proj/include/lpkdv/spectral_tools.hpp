#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "lpkdv/lattice_field.hpp"
#include "lpkdv/lpkdv_model.hpp"
#include "lpkdv/multiscale_reduction.hpp"
#include "lpkdv/nls_dynamics.hpp"

namespace lpkdv {

enum class SpectralBoundary { dirichlet, periodic };

/// a_n = 4p^2 / ([2p - (T_n^2 -/+ 1) u][2p - (T_n -/+ T_n^{-1}) u]).
/// `difference` is the isospectral form; `literal` uses the sums
/// (T_n^2 + 1)u and (T_n + T_n^{-1})u.
enum class CoefficientForm { difference, literal };

/// (L phi)_n = phi_{n-1} + a_n phi_{n+1} for n = n_first .. n_first + size - 1.
struct SpectralProblem {
  long n_first = 0;
  std::vector<cplx> a;
  SpectralBoundary boundary = SpectralBoundary::dirichlet;
};

/// a_n for the sites n = 1 .. Nn - 2 of row m. SingularPotentialError when a
/// bracket has modulus <= 1e-10 p.
SpectralProblem build_spectral_problem(const LatticeField& field, const LpkdvParams& params, long m,
                                       SpectralBoundary boundary = SpectralBoundary::dirichlet,
                                       CoefficientForm form = CoefficientForm::difference);
/// Same from a bare row u_0 .. u_Nn.
SpectralProblem spectral_problem_from_row(const std::vector<cplx>& row, double p, long m,
                                          SpectralBoundary boundary = SpectralBoundary::dirichlet,
                                          CoefficientForm form = CoefficientForm::difference);

struct EigenOptions {
  /// Skip the symmetrised solver even when every a_n > 0.
  bool force_dense = false;
};

/// Eigenvalues (eigen_mu) sorted by real part, then imaginary part. With all
/// a_n > 0 (and, for periodic boundaries, prod a_n = 1) the operator is made
/// symmetric by the diagonal gauge d_{n+1}/d_n = a_n^{-1/2} and solved as a
/// real symmetric problem; otherwise a dense complex solver is used.
/// NumericalError if the solver does not converge.
std::vector<cplx> eigenvalues(const SpectralProblem& sp, const EigenOptions& opts = {});

struct DriftReport {
  std::vector<long> m_list;
  std::vector<std::vector<double>> bound_states;  // per m, sorted
  double drift = 0.0;                             // max |eigen_mu(m) - eigen_mu(m_list[0])|
  std::string status;                             // "ok" or "no discrete spectrum"
  nlohmann::json to_json() const;
};

struct DriftOptions {
  CoefficientForm form = CoefficientForm::difference;
  double residual_tol = 1e-9;
  double edge_tol = 1e-6;
  long edge_columns = 5;
};

/// Bound states |eigen_mu| > 2 + 1e-8 of the Dirichlet problem on each row
/// in m_list, and their largest drift from the first row. PreconditionError
/// if the field does not solve the quad equation to residual_tol or the
/// rows are not flat (within edge_tol) over edge_columns at each end.
DriftReport isospectral_drift(const LatticeField& field, const LpkdvParams& params,
                              const std::vector<long>& m_list, const DriftOptions& opts = {});

/// M1 phi' + (2 cos^2(kappa/2)/p) u conj(phi) = -i nu phi,  nu = mu1 / (2 sin(kappa/2)),
/// on [xi_a, xi_b] with Re(phi e^{i theta}) = 0 at each end, where
/// theta = kappa n_b / 2 for the lattice boundary site n_b of that end. With
/// n_a = n_b = 0 the ends are plain Re(phi) = 0.
struct ZsProblem {
  std::function<cplx(double)> potential;
  double xi_a = 0.0, xi_b = 1.0;
  double kappa = 1.0;
  double p = 1.0;
  double scale = 1.0;  // M1
  long n_a = 0, n_b = 0;
  int K = 160;                   // Chebyshev degree; refinement check uses 2K
  double stability_tol = 1e-3;
};

/// Builds the ZS problem for an envelope over the slow interval of a lattice
/// window's boundary sites n_a, n_b on the row m = 0.
ZsProblem zs_problem_for_window(const Envelope& env, const ReductionCoefficients& c, const SlowCoordinates& coords,
                                long n_a, long n_b);

struct ZsResult {
  std::vector<double> mu1;  // refinement-stable, sorted
  std::string diagnostic;
};

/// Real-form Chebyshev collocation of the (phi, conj phi) system, solved as
/// A v = nu B v; eigenvalues kept iff they move < stability_tol under 2K.
ZsResult zs_eigenvalues(const ZsProblem& zs);

/// ((e^{2 i kappa} + e^{i kappa}) / (1 - e^{i kappa})) u1 phi1.
cplx third_harmonic(cplx phi1, cplx u1, double kappa);

struct LimitOptions {
  double window_per_N = 16.0;
  double bracket = 10.0;          // eigenvalues with |eigen_mu - 2 cos(kappa/2)| < bracket / N
  double compare_halfwidth = 2.0; // discrepancy over |mu1| <= compare_halfwidth
  int K = 160;
};

struct LimitEntry {
  long N = 0;
  std::vector<double> lattice_mu1;  // N (eigen_mu - 2 cos(kappa/2)) in the bracket
  std::vector<double> zs_mu1;
  std::optional<double> discrepancy;
  std::optional<double> nearest_zero;  // lattice estimate closest to 0
  std::string note;
};

struct LimitReport {
  std::vector<LimitEntry> entries;
  bool non_increasing = false;
  std::optional<double> cauchy_ratio;  // nearest_zero ratio of the last two N
  bool cauchy_ok = false;
  bool pass = false;
  nlohmann::json to_json() const;
};

/// Compares the rescaled band-edge eigenvalues of the lattice problem on
/// the ansatz row m = 0 with the ZS eigenvalues on the same slow interval.
LimitReport spectral_limit_check(const Envelope& env, const ReductionCoefficients& c, const std::vector<long>& N_list,
                                 const LimitOptions& opts = {});

/// CSV `index,re,im`.
void write_spectrum_csv(const std::vector<cplx>& ev, std::ostream& os);

}  // namespace lpkdv
