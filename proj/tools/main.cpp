// qmem: reproduce the quantum-memory witness data sets from the command line.
//
// Data goes to --out (stdout by default), JSON sidecars to --report, and
// progress and diagnostics to stderr. A TOML file given with --config may set
// any flag; subcommand flags live in a table named after the subcommand and
// the file must carry `schema_version = 1`. Explicit flags win over the file.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

#include "commands.hpp"

namespace {

using namespace qmem::cli;

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text << std::flush;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
  f << text;
  if (!f) throw std::runtime_error("write to '" + path + "' failed");
}

std::string read_text(const std::string& path) {
  if (path == "-") return {std::istreambuf_iterator<char>(std::cin), {}};
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open '" + path + "'");
  return {std::istreambuf_iterator<char>(f), {}};
}

/// Sidecar path: the explicit --report, else "<out>.json" next to a file
/// output, else nowhere when data goes to stdout.
std::string sidecar_path(const std::string& out, const std::string& report) {
  if (!report.empty()) return report;
  if (out.empty() || out == "-") return {};
  return out + ".json";
}

int finish(const CommandOutput& result, const std::string& out, const std::string& report) {
  for (const std::string& m : result.messages) std::cerr << "qmem: " << m << '\n';
  write_text(out, result.data);
  if (result.sidecar) {
    const std::string path = sidecar_path(out, report);
    if (!path.empty()) write_text(path, result.sidecar->dump(2) + "\n");
    else if (!result.sidecar->is_null()) std::cerr << result.sidecar->dump(2) << '\n';
  }
  return result.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Entropic witness of quantum memory for open-system dynamics"};
  app.require_subcommand(1);
  auto* config_opt = app.set_config("--config", "", "TOML configuration file (schema_version = 1)");
  app.allow_config_extras(CLI::config_extras_mode::error);
  int schema_version = 1;
  auto* schema_opt = app.add_option("--schema_version", schema_version, "Configuration schema version")->group("");

  std::string out = "-";
  std::string report;
  auto add_outputs = [&](CLI::App* sub, bool with_report) {
    sub->add_option("-o,--out", out, "Data file, '-' for stdout");
    if (with_report) sub->add_option("--report", report, "JSON sidecar path (default <out>.json)");
  };

  QuditTraceConfig trace;
  auto* trace_cmd = app.add_subcommand("qudit-trace", "Entropies along the qudit-memory trajectory");
  trace_cmd->add_option("--d", trace.d, "Qudit dimension")->capture_default_str();
  trace_cmd->add_option("--gamma-over-omega", trace.gamma_over_omega, "Memory decay rate gamma / omega")
      ->capture_default_str();
  trace_cmd->add_option("--t-max", trace.t_max, "Final time in units of 1/omega")->capture_default_str();
  trace_cmd->add_option("--points", trace.points, "Number of grid points")->capture_default_str();
  trace_cmd->add_option("--convention", trace.convention, "Ladder operators: spin | truncated-oscillator")
      ->capture_default_str();
  trace_cmd->add_option("--memory-excited", trace.memory_excited, "Excited population of the initial memory qubit")
      ->capture_default_str()
      ->group("Expert");
  add_outputs(trace_cmd, true);

  QuditScanConfig scan;
  auto* scan_cmd = app.add_subcommand("qudit-scan", "Witness over a (d, gamma/omega) grid");
  scan_cmd->add_option("--d", scan.d_list, "Qudit dimensions")->delimiter(',')->capture_default_str();
  scan_cmd->add_option("--ratios", scan.ratios, "Explicit gamma/omega values")->delimiter(',');
  scan_cmd->add_option("--ratio-min", scan.ratio_min, "Lower end of the gamma/omega grid")->capture_default_str();
  scan_cmd->add_option("--ratio-max", scan.ratio_max, "Upper end of the gamma/omega grid")->capture_default_str();
  scan_cmd->add_option("--ratio-points", scan.ratio_points, "Points of the gamma/omega grid")->capture_default_str();
  scan_cmd->add_option("--t-max", scan.t_max, "Final time in units of 1/omega")->capture_default_str();
  scan_cmd->add_option("--points", scan.points, "Time grid points per cell")->capture_default_str();
  scan_cmd->add_option("--convention", scan.convention, "Ladder operators: spin | truncated-oscillator")
      ->capture_default_str();
  scan_cmd->add_option("--threads", scan.threads, "Worker threads, 0 for hardware concurrency")
      ->capture_default_str();
  add_outputs(scan_cmd, false);

  GaussLossyConfig lossy;
  std::string fixed_r_out;
  auto* lossy_cmd = app.add_subcommand("gauss-lossy", "Minimal witness over squeezing on an (eta1, eta2) grid");
  lossy_cmd->add_option("--eta-points", lossy.eta_points, "Points per eta axis on [0, 1]")->capture_default_str();
  lossy_cmd->add_option("--r-min", lossy.r_min, "Smallest squeezing parameter")->capture_default_str();
  lossy_cmd->add_option("--r-max", lossy.r_max, "Largest squeezing parameter")->capture_default_str();
  lossy_cmd->add_option("--r-coarse-points", lossy.r_coarse_points, "Coarse grid before golden-section refinement")
      ->capture_default_str();
  lossy_cmd->add_option("--fixed-r", lossy.fixed_r, "Squeezing values for sign sweeps")->delimiter(',');
  lossy_cmd->add_option("--fixed-r-out", fixed_r_out, "CSV path for the fixed-r sign sweeps");
  add_outputs(lossy_cmd, false);

  GaussDhoConfig dho;
  double dho_r = 0.0;
  auto* dho_cmd = app.add_subcommand("gauss-dho", "Damped oscillator loss, rates and witness");
  dho_cmd->add_option("--g2", dho.params.g2, "Coupling |g|^2 (1/time^2)")->capture_default_str();
  dho_cmd->add_option("--kappa", dho.params.kappa, "Bath memory decay rate (1/time)")->capture_default_str();
  dho_cmd->add_option("--omega", dho.params.omega, "Oscillator frequency (1/time)")->capture_default_str();
  dho_cmd->add_option("--omega-big", dho.params.omega_big, "Bath central frequency (1/time)")->capture_default_str();
  dho_cmd->add_option("--t-max", dho.t_max, "Final time")->capture_default_str();
  dho_cmd->add_option("--points", dho.points, "Number of grid points")->capture_default_str();
  auto* dho_r_opt = dho_cmd->add_option("--r", dho_r, "Fixed squeezing; optimized when omitted");
  add_outputs(dho_cmd, true);

  std::string witness_input;
  auto* eval_cmd = app.add_subcommand("witness-eval", "Evaluate the witness on two serialized states");
  eval_cmd->add_option("input", witness_input, "JSON document, '-' for stdin")->required();
  add_outputs(eval_cmd, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (config_opt->count() > 0 && schema_opt->count() == 0)
      throw ConfigError("configuration file lacks schema_version");
    if (schema_version != 1) throw ConfigError("unsupported schema_version " + std::to_string(schema_version));
    if (trace_cmd->parsed()) {
      std::cerr << "qmem: qudit-trace d=" << trace.d << " gamma/omega=" << trace.gamma_over_omega << '\n';
      return finish(qudit_trace(trace), out, report);
    }
    if (scan_cmd->parsed()) {
      std::cerr << "qmem: qudit-scan over " << scan.d_list.size() << " dimensions\n";
      return finish(qudit_scan(scan), out, report);
    }
    if (lossy_cmd->parsed()) {
      if (!lossy.fixed_r.empty() && fixed_r_out.empty()) throw ConfigError("--fixed-r needs --fixed-r-out");
      std::string sweep;
      const CommandOutput result = gauss_lossy(lossy, &sweep);
      if (!sweep.empty()) write_text(fixed_r_out, sweep);
      return finish(result, out, report);
    }
    if (dho_cmd->parsed()) {
      if (dho_r_opt->count() > 0) dho.r = dho_r;
      return finish(gauss_dho(dho), out, report);
    }
    if (eval_cmd->parsed()) {
      return finish(witness_eval({read_text(witness_input)}), out, report);
    }
  } catch (const ConfigError& e) {
    std::cerr << "qmem: configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const qmem::Error& e) {
    std::cerr << "qmem: " << qmem::to_string(e.kind()) << ": " << e.what() << '\n';
    return qmem::is_numerical(e.kind()) ? kExitNumerical : kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "qmem: " << e.what() << '\n';
    return 1;
  }
  return kExitOk;
}
