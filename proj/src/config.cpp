#include "lpkdv/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "lpkdv/errors.hpp"

namespace lpkdv {

namespace {

void reject_unknown(const nlohmann::json& j, const std::set<std::string>& allowed, const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key())) throw ConfigError("unknown key '" + it.key() + "' in " + where);
}

template <class T>
void get(const nlohmann::json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
  }
}

}  // namespace

ExperimentConfig parse_config(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  reject_unknown(j, {"p", "q", "kappa", "r", "M2_tilde", "branch", "N_list", "window", "window_per_N", "envelope", "nls",
                     "lattice", "isospectral", "commutators", "tolerances", "seed"},
                 "config");
  ExperimentConfig c;
  get(j, "p", c.p);
  get(j, "q", c.q);
  get(j, "kappa", c.kappa);
  get(j, "r", c.r);
  get(j, "M2_tilde", c.M2_tilde);
  get(j, "branch", c.branch);
  get(j, "N_list", c.N_list);
  get(j, "window_per_N", c.window_per_N);
  get(j, "seed", c.seed);
  if (j.contains("window")) {
    const auto& w = j.at("window");
    if (!w.is_array() || w.size() != 2) throw ConfigError("window must be [N_n, N_m]");
    c.window_Nn = w[0].get<long>();
    c.window_Nm = w[1].get<long>();
  }
  if (j.contains("envelope")) {
    const auto& e = j.at("envelope");
    reject_unknown(e, {"kind", "amplitude", "width", "center", "k", "path"}, "envelope");
    get(e, "kind", c.envelope.kind);
    get(e, "amplitude", c.envelope.amplitude);
    get(e, "width", c.envelope.width);
    get(e, "center", c.envelope.center);
    get(e, "k", c.envelope.k);
    get(e, "path", c.envelope.path);
  }
  if (j.contains("nls")) {
    const auto& n = j.at("nls");
    reject_unknown(n, {"L", "dxi", "dtau", "tau_final"}, "nls");
    get(n, "L", c.nls.L);
    get(n, "dxi", c.nls.dxi);
    get(n, "dtau", c.nls.dtau);
    get(n, "tau_final", c.nls.tau_final);
  }
  if (j.contains("lattice")) {
    const auto& l = j.at("lattice");
    reject_unknown(l, {"amplitude", "width", "Nn", "Nm", "center", "method", "lambda"}, "lattice");
    get(l, "amplitude", c.lattice.amplitude);
    get(l, "width", c.lattice.width);
    get(l, "Nn", c.lattice.Nn);
    get(l, "Nm", c.lattice.Nm);
    get(l, "center", c.lattice.center);
    get(l, "method", c.lattice.method);
    get(l, "lambda", c.lattice.lambda);
  }
  if (j.contains("isospectral")) {
    const auto& s = j.at("isospectral");
    reject_unknown(s, {"amplitude", "width", "offset", "margins", "steps"}, "isospectral");
    get(s, "amplitude", c.isospectral.amplitude);
    get(s, "width", c.isospectral.width);
    get(s, "offset", c.isospectral.offset);
    get(s, "margins", c.isospectral.margins);
    get(s, "steps", c.isospectral.steps);
  }
  if (j.contains("commutators")) {
    const auto& s = j.at("commutators");
    reject_unknown(s, {"eps", "floor"}, "commutators");
    get(s, "eps", c.commutators.eps);
    get(s, "floor", c.commutators.floor);
  }
  if (j.contains("tolerances")) get(j, "tolerances", c.tolerances);
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(is);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config " + path + " is not valid JSON: " + e.what());
  }
  return parse_config(j);
}

void ExperimentConfig::validate() const {
  try {
    const LpkdvParams pr(p, q);
    (void)dispersion(pr, kappa);
  } catch (const DomainError& e) {
    throw ConfigError(std::string("invalid parameters: ") + e.what());
  }
  if (!(r > 0.0)) throw ConfigError("r must be positive");
  if (!(M2_tilde > 0.0)) throw ConfigError("M2_tilde must be positive");
  if (branch != 0 && branch != 1 && branch != -1) throw ConfigError("branch must be -1, 0 (auto) or 1");
  if (N_list.empty()) throw ConfigError("N_list must not be empty");
  for (std::size_t i = 0; i < N_list.size(); ++i) {
    if (N_list[i] <= 0) throw ConfigError("N_list entries must be positive");
    if (i > 0 && N_list[i] <= N_list[i - 1]) throw ConfigError("N_list must be ascending");
  }
  if (window_Nn < 0 || window_Nm < 0) throw ConfigError("window extents must be non-negative");
  if (!(window_per_N > 0.0)) throw ConfigError("window_per_N must be positive");
  if (nls.L < 16) throw ConfigError("nls.L must be at least 16");
  if (!(nls.dxi > 0.0) || !(nls.dtau > 0.0) || !(nls.tau_final >= 0.0)) throw ConfigError("nls grid values must be positive");
  const auto& e = envelope;
  if (e.kind != "gaussian" && e.kind != "sech" && e.kind != "plane" && e.kind != "file")
    throw ConfigError("envelope.kind must be gaussian, sech, plane or file");
  if ((e.kind == "gaussian" || e.kind == "sech") && !(e.width > 0.0)) throw ConfigError("envelope.width must be positive");
  if (e.kind == "file" && e.path.empty()) throw ConfigError("envelope.path required for kind=file");
  const auto& l = lattice;
  if (l.Nn < 8 || l.Nm < 1) throw ConfigError("lattice window must be at least 8 x 1");
  if (!(l.width > 0.0)) throw ConfigError("lattice.width must be positive");
  if (l.method != "rows" && l.method != "ivp") throw ConfigError("lattice.method must be rows or ivp");
  if (l.lambda.size() < 3) throw ConfigError("lattice.lambda needs at least three values");
  for (std::size_t i = 0; i < l.lambda.size(); ++i)
    if (!(l.lambda[i] > 0.0) || (i > 0 && l.lambda[i] <= l.lambda[i - 1]))
      throw ConfigError("lattice.lambda must be positive and ascending");
  const auto& s = isospectral;
  if (!(s.width > 0.0) || s.offset < 0 || s.steps < 1) throw ConfigError("isospectral width, offset and steps must be positive");
  if (s.margins.size() != 2 || s.margins[0] < 6 || s.margins[1] <= s.margins[0])
    throw ConfigError("isospectral.margins must be two ascending values >= 6");
  const auto& cm = commutators;
  if (cm.eps.size() < 3) throw ConfigError("commutators.eps needs at least three values");
  for (std::size_t i = 0; i + 1 < cm.eps.size(); ++i)
    if (!(cm.eps[i] > 0.0) || std::abs(cm.eps[i] / cm.eps[i + 1] - 2.0) > 1e-12)
      throw ConfigError("commutators.eps must halve successively");
  if (!(cm.floor >= 0.0)) throw ConfigError("commutators.floor must be non-negative");
  try {
    (void)coefficients();
  } catch (const std::exception& ex) {
    throw ConfigError(std::string("reduction coefficients unavailable: ") + ex.what());
  }
}

LpkdvParams ExperimentConfig::params() const { return LpkdvParams(p, q); }

ReductionCoefficients ExperimentConfig::coefficients() const {
  std::optional<int> b;
  if (branch != 0) b = branch;
  return compute_coefficients(params(), kappa, r, M2_tilde, b);
}

Envelope ExperimentConfig::make_envelope() const {
  const double period = nls.dxi * static_cast<double>(nls.L);
  const double center = envelope.center < 0.0 ? period / 2.0 : envelope.center;
  if (envelope.kind == "gaussian") return gaussian_envelope(nls.L, nls.dxi, envelope.amplitude, envelope.width, center);
  if (envelope.kind == "sech") return sech_envelope(nls.L, nls.dxi, envelope.amplitude, envelope.width, center);
  if (envelope.kind == "plane") return plane_envelope(nls.L, nls.dxi, envelope.amplitude, envelope.k);
  std::ifstream is(envelope.path);
  if (!is) throw ConfigError("cannot open envelope file " + envelope.path);
  return read_envelope_csv(is);
}

std::vector<cplx> LatticeSpec::row0() const {
  const double c = center < 0.0 ? 0.7 * static_cast<double>(Nn) : center;
  std::vector<cplx> row(static_cast<std::size_t>(Nn + 1));
  for (long n = 0; n <= Nn; ++n) row[static_cast<std::size_t>(n)] = amplitude * std::tanh((static_cast<double>(n) - c) / width);
  return row;
}

double ExperimentConfig::tolerance(const std::string& key, double fallback) const {
  auto it = tolerances.find(key);
  return it == tolerances.end() ? fallback : it->second;
}

nlohmann::json ExperimentConfig::to_json() const {
  return {{"p", p},
          {"q", q},
          {"kappa", kappa},
          {"r", r},
          {"M2_tilde", M2_tilde},
          {"branch", branch},
          {"N_list", N_list},
          {"window", {window_Nn, window_Nm}},
          {"window_per_N", window_per_N},
          {"envelope",
           {{"kind", envelope.kind},
            {"amplitude", envelope.amplitude},
            {"width", envelope.width},
            {"center", envelope.center},
            {"k", envelope.k},
            {"path", envelope.path}}},
          {"nls", {{"L", nls.L}, {"dxi", nls.dxi}, {"dtau", nls.dtau}, {"tau_final", nls.tau_final}}},
          {"lattice",
           {{"amplitude", lattice.amplitude},
            {"width", lattice.width},
            {"Nn", lattice.Nn},
            {"Nm", lattice.Nm},
            {"center", lattice.center},
            {"method", lattice.method},
            {"lambda", lattice.lambda}}},
          {"isospectral",
           {{"amplitude", isospectral.amplitude},
            {"width", isospectral.width},
            {"offset", isospectral.offset},
            {"margins", isospectral.margins},
            {"steps", isospectral.steps}}},
          {"commutators", {{"eps", commutators.eps}, {"floor", commutators.floor}}},
          {"tolerances", tolerances},
          {"seed", seed}};
}

}  // namespace lpkdv
