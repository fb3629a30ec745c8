// lpkdv: batch front-end for the lpKdV multiscale toolkit.
//
//   lpkdv <subcommand> [--config cfg.json] [--out dir] [--threads k] [--quiet]
//
// Exit status: 0 when the subcommand's check passes, 1 on a numerical
// failure, 2 on a configuration or usage error.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "lpkdv/config.hpp"
#include "lpkdv/errors.hpp"
#include "lpkdv/experiments.hpp"
#include "lpkdv/lattice_field.hpp"
#include "lpkdv/multiscale_reduction.hpp"
#include "lpkdv/parallel.hpp"
#include "lpkdv/spectral_tools.hpp"

namespace fs = std::filesystem;
using namespace lpkdv;

namespace {

enum Exit { kPass = 0, kFail = 1, kUsage = 2 };

struct RunContext {
  ExperimentConfig cfg;
  fs::path out;
  bool quiet = false;
  std::vector<std::string> artifacts;

  void write_json(const std::string& name, const nlohmann::json& j) {
    std::ofstream(out / name) << j.dump(2) << "\n";
    artifacts.push_back(name);
  }
  void write_text(const std::string& name, const std::string& text) {
    std::ofstream(out / name) << text;
    artifacts.push_back(name);
  }
  std::ofstream open(const std::string& name) {
    artifacts.push_back(name);
    return std::ofstream(out / name);
  }
};

using Handler = std::function<CheckResult(RunContext&)>;

CheckResult run_coeffs(RunContext& ctx) {
  const auto c = ctx.cfg.coefficients();
  CheckResult r{"coeffs", true, "", c.to_json()};
  r.report["integer_embedding"] = integer_embedding(c).to_json();
  r.report["group_velocity"] = group_velocity(ctx.cfg.params(), ctx.cfg.kappa);
  ctx.write_json("coefficients.json", r.report);
  if (!ctx.quiet) std::cout << c.to_json().dump(2) << "\n";
  r.summary = "M1 = " + std::to_string(c.M1) + ", rho1 = " + std::to_string(c.rho1) +
              ", rho2 = " + std::to_string(c.rho2);
  return r;
}

CheckResult run_simulate(RunContext& ctx) {
  LatticeField f;
  auto r = check_lattice_simulation(ctx.cfg, &f);
  save_field(f, (ctx.out / "field.bin").string());
  ctx.artifacts.push_back("field.bin");
  return r;
}

CheckResult run_ansatz_residual(RunContext& ctx) {
  auto r = check_residual_scaling(ctx.cfg);
  ScalingReport full;
  std::string csv = "variant,N,residual\n";
  for (const char* v : {"full", "without_u10", "without_u22", "frozen"}) {
    const auto& rep = r.report.at(v);
    for (std::size_t i = 0; i < rep.at("N").size(); ++i)
      csv += std::string(v) + "," + rep.at("N")[i].dump() + "," + rep.at("residual")[i].dump() + "\n";
  }
  ctx.write_text("residuals.csv", csv);
  return r;
}

CheckResult run_nls_evolve(RunContext& ctx) {
  Envelope out;
  auto r = check_nls_solver(ctx.cfg, &out);
  auto os = ctx.open("envelope_initial.csv");
  write_envelope_csv(ctx.cfg.make_envelope(), os);
  auto os2 = ctx.open("envelope_final.csv");
  write_envelope_csv(out, os2);
  return r;
}

CheckResult run_spectrum(RunContext& ctx) {
  auto r = check_free_spectra(ctx.cfg);
  const auto f = lattice_solution(ctx.cfg);
  const auto ev = eigenvalues(build_spectral_problem(f, ctx.cfg.params(), 0));
  auto os = ctx.open("spectrum.csv");
  write_spectrum_csv(ev, os);
  return r;
}

CheckResult run_flow_check(RunContext& ctx) {
  auto r = check_symmetry_flows(ctx.cfg);
  std::string csv = "flow,lambda,residual\n";
  for (const char* v : {"flow1", "flow2", "negative_control"}) {
    const auto& rep = r.report.at(v);
    for (std::size_t i = 0; i < rep.at("lambda").size(); ++i)
      csv += std::string(v) + "," + rep.at("lambda")[i].dump() + "," + rep.at("residual")[i].dump() + "\n";
  }
  ctx.write_text("flow_residuals.csv", csv);
  return r;
}

const std::map<std::string, std::pair<std::string, Handler>>& handlers() {
  static const std::map<std::string, std::pair<std::string, Handler>> h{
      {"selftest", {"exact operator-calculus suite", [](RunContext&) { return check_operator_calculus(5); }}},
      {"coeffs", {"print the reduction coefficients as JSON", run_coeffs}},
      {"dispersion", {"plane-wave check of the dispersion relation", [](RunContext& c) { return check_dispersion(c.cfg); }}},
      {"simulate", {"evolve a kink solution and scan its residual", run_simulate}},
      {"ansatz-residual", {"multiscale residual scaling", run_ansatz_residual}},
      {"nls-evolve", {"NLS solver exact-solution and equivariance checks", run_nls_evolve}},
      {"commutators", {"NLS symmetry hierarchy commutators", [](RunContext& c) { return check_commutators(c.cfg); }}},
      {"spectrum", {"free spectra, gauge invariance and a solution spectrum", run_spectrum}},
      {"isospectral", {"bound-state drift for two window margins", [](RunContext& c) { return check_isospectral(c.cfg); }}},
      {"zs-limit", {"lattice spectrum versus the Zakharov-Shabat limit", [](RunContext& c) { return check_spectral_limit(c.cfg); }}},
      {"flow-check", {"lattice symmetry residual scaling", run_flow_check}},
      {"flow-project", {"first-harmonic projection of the lattice flows", [](RunContext& c) { return check_harmonic_projection(c.cfg); }}},
  };
  return h;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lpkdv: lattice potential KdV multiscale toolkit"};
  app.require_subcommand(1, 1);
  app.fallthrough();
  std::string config_path, out_dir;
  unsigned threads = 1;
  bool quiet = false;
  app.add_option("--config", config_path, "experiment configuration (JSON)");
  app.add_option("--out", out_dir, "run directory (default runs/<subcommand>)");
  app.add_option("--threads", threads, "worker threads")->check(CLI::Range(1u, 256u));
  app.add_flag("--quiet", quiet, "only report errors");
  for (const auto& [name, entry] : handlers()) app.add_subcommand(name, entry.first);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kUsage;
  }
  const std::string sub = app.get_subcommands().front()->get_name();

  RunContext ctx;
  ctx.quiet = quiet;
  try {
    ctx.cfg = config_path.empty() ? parse_config(nlohmann::json::object()) : load_config(config_path);
  } catch (const std::exception& e) {
    std::cerr << "lpkdv " << sub << ": configuration error: " << e.what() << "\n";
    return kUsage;
  }
  set_thread_count(threads);
  ctx.out = out_dir.empty() ? fs::path("runs") / sub : fs::path(out_dir);
  std::error_code ec;
  fs::create_directories(ctx.out, ec);
  if (ec) {
    std::cerr << "lpkdv " << sub << ": cannot create run directory " << ctx.out << ": " << ec.message() << "\n";
    return kUsage;
  }

  const auto t0 = std::chrono::steady_clock::now();
  CheckResult result;
  int code = kPass;
  std::string error;
  try {
    result = handlers().at(sub).second(ctx);
    code = result.pass ? kPass : kFail;
  } catch (const ConfigError& e) {
    error = std::string("configuration error: ") + e.what();
    code = kUsage;
  } catch (const DomainError& e) {
    error = std::string("domain error: ") + e.what();
    code = kUsage;
  } catch (const PreconditionError& e) {
    error = std::string("precondition violated: ") + e.what();
    code = kUsage;
  } catch (const std::exception& e) {
    error = std::string("numerical failure: ") + e.what();
    code = kFail;
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  if (error.empty()) {
    ctx.write_json("report.json", {{"subcommand", sub}, {"pass", result.pass}, {"summary", result.summary},
                                   {"report", result.report}});
  }
  nlohmann::json manifest = {{"subcommand", sub},
                             {"config", ctx.cfg.to_json()},
                             {"config_path", config_path},
                             {"threads", threads},
                             {"versions", build_info()},
                             {"artifacts", ctx.artifacts},
                             {"exit_code", code},
                             {"wall_time_s", secs}};
  if (!error.empty()) manifest["error"] = error;
  std::ofstream(ctx.out / "manifest.json") << manifest.dump(2) << "\n";

  if (!error.empty()) {
    std::cerr << "lpkdv " << sub << ": " << error << "\n";
  } else if (!quiet) {
    std::printf("%s %s: %s\n", sub.c_str(), result.pass ? "PASS" : "FAIL", result.summary.c_str());
  }
  return code;
}
