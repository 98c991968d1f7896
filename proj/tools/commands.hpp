#pragma once

// Subcommands of the `qmem` command-line tool. Each command validates its
// configuration up front, then returns the data file contents and an
// optional JSON sidecar; writing them out is left to the caller.

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "qmem/qmem.hpp"

namespace qmem::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,
  kExitNumerical = 3,
};

/// Rejected configuration; maps to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CommandOutput {
  std::string data;
  std::optional<nlohmann::json> sidecar;
  int exit_code = kExitOk;
  /// Non-fatal diagnostics for stderr.
  std::vector<std::string> messages;
};

/// "%.12g" with a '.' decimal separator regardless of locale.
std::string format_number(double v);

nlohmann::json to_json(const WitnessReport& r);
nlohmann::json to_json(const LindbladModel& m);
nlohmann::json to_json(const DhoParams& p);

LadderConvention parse_convention(const std::string& name);

struct QuditTraceConfig {
  std::size_t d = 4;
  double gamma_over_omega = 0.05;
  /// In units of 1 / omega.
  double t_max = 12.0;
  std::size_t points = 2001;
  std::string convention = "spin";
  /// Excited-state population of the initial (diagonal) memory state.
  double memory_excited = 0.0;
};

struct QuditScanConfig {
  std::vector<std::size_t> d_list{2, 3, 4, 5};
  /// Explicit ratios; when empty a uniform grid [ratio_min, ratio_max] is used.
  std::vector<double> ratios;
  double ratio_min = 0.01;
  double ratio_max = 0.6;
  std::size_t ratio_points = 60;
  double t_max = 12.0;
  std::size_t points = 2001;
  std::string convention = "spin";
  std::size_t threads = 0;
};

struct GaussLossyConfig {
  std::size_t eta_points = 101;
  double r_min = 1e-3;
  double r_max = 6.0;
  std::size_t r_coarse_points = 40;
  /// Squeezing values for the fixed-r sign sweeps (may be empty).
  std::vector<double> fixed_r;
};

struct GaussDhoConfig {
  DhoParams params;
  double t_max = 20.0;
  std::size_t points = 2001;
  /// Squeezing for the witness at the detected pair; optimized when unset.
  std::optional<double> r;
};

struct WitnessEvalConfig {
  std::string input_json;  ///< contents of the input document
};

void validate(const QuditTraceConfig& c);
void validate(const QuditScanConfig& c);
void validate(const GaussLossyConfig& c);
void validate(const GaussDhoConfig& c);

CommandOutput qudit_trace(const QuditTraceConfig& c);
CommandOutput qudit_scan(const QuditScanConfig& c);
/// data: the (eta1, eta2) grid. sidecar: null unless fixed_r is non-empty,
/// in which case `fixed_r_csv` receives the sign sweep.
CommandOutput gauss_lossy(const GaussLossyConfig& c, std::string* fixed_r_csv = nullptr);
CommandOutput gauss_dho(const GaussDhoConfig& c);
CommandOutput witness_eval(const WitnessEvalConfig& c);

/// Parses one serialized state of a `witness-eval` document.
DensityMatrix density_from_json(const nlohmann::json& j);
TwoModeBlocks blocks_from_json(const nlohmann::json& j);

}  // namespace qmem::cli
