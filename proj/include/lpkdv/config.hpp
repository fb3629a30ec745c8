#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "lpkdv/fft.hpp"
#include "lpkdv/lpkdv_model.hpp"
#include "lpkdv/multiscale_reduction.hpp"
#include "lpkdv/nls_dynamics.hpp"

namespace lpkdv {

/// Invalid or inconsistent experiment configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct EnvelopeSpec {
  std::string kind = "gaussian";  // gaussian | sech | plane | file
  double amplitude = 1.0;
  double width = 2.0;
  double center = -1.0;  // < 0: middle of the period
  double k = 0.0;        // plane wave number
  std::string path;      // CSV xi,re,im
};

struct NlsGrid {
  std::size_t L = 512;
  double dxi = 60.0 / 512.0;
  double dtau = 2e-3;
  double tau_final = 1.0;
};

/// Exact lattice solution used by simulate and flow-check: row 0 is
/// amplitude tanh((n - center)/width), the right column is held constant.
struct LatticeSpec {
  double amplitude = 0.4;
  double width = 3.0;
  long Nn = 60, Nm = 20;
  double center = -1.0;  // < 0: 0.7 Nn
  std::string method = "rows";  // rows | ivp
  std::vector<double> lambda{0.1, 0.2, 0.4};
  /// Row 0 (Nn + 1 values) and the constant right/left column data.
  std::vector<cplx> row0() const;
};

/// Kink windows for the isospectral drift comparison: the kink starts
/// `offset` columns right of the left margin and the window has `margin`
/// flat columns on each side of a core of width offset + 5.
struct IsospectralSpec {
  double amplitude = 0.8;
  double width = 3.0;
  long offset = 45;
  std::vector<long> margins{30, 60};
  long steps = 10;
};

struct CommutatorSpec {
  std::vector<double> eps{1e-3, 5e-4, 2.5e-4, 1.25e-4};
  double floor = 1e-10;
};

struct ExperimentConfig {
  double p = 1.5, q = 0.5;
  double kappa = 1.5707963267948966;
  double r = 1.0;
  double M2_tilde = 1.0;
  int branch = 0;  // 0: choose so that M1 > 0
  std::vector<long> N_list{16, 32, 64};
  long window_Nn = 0, window_Nm = 0;  // 0: scale with N
  double window_per_N = 4.0;
  EnvelopeSpec envelope;
  NlsGrid nls;
  LatticeSpec lattice;
  IsospectralSpec isospectral;
  CommutatorSpec commutators;
  std::map<std::string, double> tolerances;
  unsigned long seed = 12345;

  /// Throws ConfigError on any violated module precondition.
  void validate() const;
  LpkdvParams params() const;
  ReductionCoefficients coefficients() const;
  Envelope make_envelope() const;
  double tolerance(const std::string& key, double fallback) const;
  nlohmann::json to_json() const;
};

/// Parses and validates. Unknown keys are rejected.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);

}  // namespace lpkdv
