#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace qmem::cli {

using nlohmann::json;

namespace {

constexpr int kSchemaVersion = 1;

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

std::string csv_bool(bool b) { return b ? "true" : "false"; }

std::string csv_text(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch == '\n' ? ' ' : ch;
  }
  return out + "\"";
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i)
    v[i] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  return v;
}

json nullable(std::optional<double> v) { return v ? json(*v) : json(nullptr); }

Mat2 mat2_from_json(const json& j, const char* name) {
  require(j.is_array() && j.size() == 2 && j[0].size() == 2 && j[1].size() == 2,
          std::string(name) + " must be a 2x2 array");
  Mat2 m;
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) m(r, c) = j[r][c].get<double>();
  return m;
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) v = 0.0;  // drop the sign of negative zero
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  std::string s(buf);
  std::replace(s.begin(), s.end(), ',', '.');
  return s;
}

json to_json(const WitnessReport& r) {
  return {{"t1", nullable(r.t1)},
          {"t2", nullable(r.t2)},
          {"s_sys_t1", r.s_sys_t1},
          {"neg_cond_sa_t2", r.neg_cond_sa_t2},
          {"neg_cond_as_t2", r.neg_cond_as_t2},
          {"delta_s", r.delta_s},
          {"quantum_memory_detected", r.quantum_memory_detected}};
}

json to_json(const LindbladModel& m) {
  return {{"d", m.d}, {"omega", m.omega}, {"gamma", m.gamma}, {"convention", to_string(m.convention)}};
}

json to_json(const DhoParams& p) {
  return {{"g2", p.g2}, {"kappa", p.kappa}, {"omega", p.omega}, {"omega_big", p.omega_big}};
}

LadderConvention parse_convention(const std::string& name) {
  if (name == "spin") return LadderConvention::Spin;
  if (name == "truncated-oscillator" || name == "oscillator") return LadderConvention::TruncatedOscillator;
  throw ConfigError("unknown ladder convention '" + name + "' (expected spin or truncated-oscillator)");
}

void validate(const QuditTraceConfig& c) {
  require(c.d >= 2 && c.d <= 16, "--d must lie in [2, 16]");
  require(std::isfinite(c.gamma_over_omega) && c.gamma_over_omega >= 0.0, "--gamma-over-omega must be >= 0");
  require(std::isfinite(c.t_max) && c.t_max > 0.0, "--t-max must be positive");
  require(c.points >= 3, "--points must be at least 3");
  require(c.memory_excited >= 0.0 && c.memory_excited <= 1.0, "--memory-excited must lie in [0, 1]");
  parse_convention(c.convention);
}

void validate(const QuditScanConfig& c) {
  require(!c.d_list.empty(), "--d list is empty");
  for (std::size_t d : c.d_list) require(d >= 2 && d <= 16, "every --d must lie in [2, 16]");
  if (c.ratios.empty()) {
    require(c.ratio_points >= 1, "--ratio-points must be positive");
    require(std::isfinite(c.ratio_min) && std::isfinite(c.ratio_max) && c.ratio_min >= 0.0 &&
                c.ratio_max >= c.ratio_min,
            "ratio range must satisfy 0 <= min <= max");
  } else {
    for (double r : c.ratios) require(std::isfinite(r) && r >= 0.0, "every ratio must be >= 0");
  }
  require(std::isfinite(c.t_max) && c.t_max > 0.0, "--t-max must be positive");
  require(c.points >= 3, "--points must be at least 3");
  parse_convention(c.convention);
}

void validate(const GaussLossyConfig& c) {
  require(c.eta_points >= 2, "--eta-points must be at least 2");
  require(std::isfinite(c.r_min) && c.r_min > 0.0, "--r-min must be positive");
  require(std::isfinite(c.r_max) && c.r_max > c.r_min, "--r-max must exceed --r-min");
  require(c.r_coarse_points >= 3, "--r-coarse-points must be at least 3");
  for (double r : c.fixed_r) require(std::isfinite(r) && r > 0.0, "every --fixed-r must be positive");
}

void validate(const GaussDhoConfig& c) {
  require(std::isfinite(c.params.g2) && c.params.g2 >= 0.0, "--g2 must be >= 0");
  require(std::isfinite(c.params.kappa) && c.params.kappa > 0.0, "--kappa must be positive");
  require(std::isfinite(c.params.omega) && std::isfinite(c.params.omega_big), "frequencies must be finite");
  require(std::isfinite(c.t_max) && c.t_max > 0.0, "--t-max must be positive");
  require(c.points >= 3, "--points must be at least 3");
  if (c.r) require(std::isfinite(*c.r) && *c.r > 0.0, "--r must be positive");
}

CommandOutput qudit_trace(const QuditTraceConfig& c) {
  validate(c);
  const LindbladModel model{c.d, 1.0, c.gamma_over_omega, parse_convention(c.convention)};
  QuditOptions options;
  options.omega_t_max = c.t_max;
  options.points = c.points;

  CMatrix m = CMatrix::Zero(2, 2);
  m(0, 0) = 1.0 - c.memory_excited;
  m(1, 1) = c.memory_excited;
  const DensityMatrix memory(m, Dims{2});

  CommandOutput out;
  const std::vector<double> grid = uniform_grid(c.t_max / model.omega, c.points);
  const std::vector<EntropySample> samples = qudit_entropy_trajectory(model, grid, options.ode, memory);
  std::ostringstream csv;
  csv << "t,S_S,neg_S_cond_SA,neg_S_cond_AS\n";
  for (const EntropySample& s : samples)
    csv << format_number(s.t) << ',' << format_number(s.e.s_system) << ',' << format_number(s.neg_cond_sa()) << ','
        << format_number(s.neg_cond_as()) << '\n';
  out.data = csv.str();

  json side = {{"schema_version", kSchemaVersion},
               {"command", "qudit-trace"},
               {"model", to_json(model)},
               {"memory_excited", c.memory_excited},
               {"t_max", c.t_max},
               {"points", c.points},
               {"ordering_check", ordering_check(samples)}};
  try {
    ChoiFlow flow(model, options.ode, memory);
    const WitnessTimes times =
        find_witness_times(samples, [&flow](double t) { return entropy_triple(flow.at(t)); }, options.search);
    const WitnessReport report = evaluate_criterion(times.at_t1, times.at_t2, times.t1, times.t2);
    side["report"] = to_json(report);
    json later = json::array();
    for (std::size_t k = 0; k < times.later_maxima_t.size(); ++k)
      later.push_back({{"t", times.later_maxima_t[k]}, {"neg_cond_sa", times.later_maxima_value[k]}});
    side["later_maxima"] = later;
  } catch (const Error& e) {
    side["report"] = nullptr;
    side["error"] = e.what();
    out.exit_code = kExitNumerical;
    out.messages.push_back(e.what());
  }
  out.sidecar = std::move(side);
  return out;
}

CommandOutput qudit_scan(const QuditScanConfig& c) {
  validate(c);
  const std::vector<double> ratios = c.ratios.empty() ? linspace(c.ratio_min, c.ratio_max, c.ratio_points) : c.ratios;
  QuditOptions options;
  options.omega_t_max = c.t_max;
  options.points = c.points;
  const std::vector<QuditScanRow> rows =
      scan_qudit(c.d_list, ratios, parse_convention(c.convention), options, c.threads);

  CommandOutput out;
  std::ostringstream csv;
  csv << "d,gamma_over_omega,t1,t2,delta_S,detected,error\n";
  std::size_t failures = 0;
  for (const QuditScanRow& r : rows) {
    if (!r.ok()) ++failures;
    csv << r.d << ',' << format_number(r.gamma_over_omega) << ',' << format_number(r.t1) << ','
        << format_number(r.t2) << ',' << format_number(r.delta_s) << ',' << csv_bool(r.detected) << ','
        << csv_text(r.error) << '\n';
  }
  out.data = csv.str();
  if (failures > 0) out.messages.push_back(std::to_string(failures) + " of " + std::to_string(rows.size()) + " cells failed");
  if (failures == rows.size()) out.exit_code = kExitNumerical;
  return out;
}

CommandOutput gauss_lossy(const GaussLossyConfig& c, std::string* fixed_r_csv) {
  validate(c);
  const std::vector<double> etas = linspace(0.0, 1.0, c.eta_points);
  SqueezingSearch search;
  search.r_min = c.r_min;
  search.r_max = c.r_max;
  search.coarse_points = c.r_coarse_points;

  std::vector<SqueezingOptimum> cells(etas.size() * etas.size());
  parallel_for(cells.size(), [&](std::size_t k) {
    cells[k] = minimize_delta_S_over_r(etas[k / etas.size()], etas[k % etas.size()], search);
  });

  CommandOutput out;
  std::ostringstream csv;
  csv << "eta1,eta2,delta_S_min,r_star\n";
  for (std::size_t k = 0; k < cells.size(); ++k)
    csv << format_number(etas[k / etas.size()]) << ',' << format_number(etas[k % etas.size()]) << ','
        << format_number(cells[k].delta_s) << ',' << format_number(cells[k].r_star) << '\n';
  out.data = csv.str();

  if (!c.fixed_r.empty() && fixed_r_csv != nullptr) {
    std::ostringstream sweep;
    sweep << "eta1,eta2,r,delta_S,negative\n";
    for (double r : c.fixed_r)
      for (double e1 : etas)
        for (double e2 : etas) {
          const double v = delta_S_lossy(e1, e2, r);
          sweep << format_number(e1) << ',' << format_number(e2) << ',' << format_number(r) << ','
                << format_number(v) << ',' << csv_bool(v < -kDetectionThreshold) << '\n';
        }
    *fixed_r_csv = sweep.str();
  }
  return out;
}

CommandOutput gauss_dho(const GaussDhoConfig& c) {
  validate(c);
  const std::vector<double> grid = uniform_grid(c.t_max, c.points);
  const std::vector<DhoSample> samples = dho_trajectory(c.params, grid);

  CommandOutput out;
  std::ostringstream csv;
  csv << "t,re_c,im_c,abs_c_sq,eta,gamma_t,omega_t,flag\n";
  std::size_t degenerate = 0;
  for (const DhoSample& s : samples) {
    degenerate += s.degenerate ? 1 : 0;
    csv << format_number(s.t) << ',' << format_number(s.c.real()) << ',' << format_number(s.c.imag()) << ','
        << format_number(std::norm(s.c)) << ',' << format_number(s.eta) << ','
        << format_number(s.degenerate ? std::nan("") : s.gamma_t) << ','
        << format_number(s.degenerate ? std::nan("") : s.omega_t) << ','
        << (s.degenerate ? "amplitude-vanishing" : "") << '\n';
  }
  out.data = csv.str();
  if (degenerate > 0) out.messages.push_back(std::to_string(degenerate) + " rows with vanishing amplitude");

  json side = {{"schema_version", kSchemaVersion},
               {"command", "gauss-dho"},
               {"params", to_json(c.params)},
               {"t_max", c.t_max},
               {"points", c.points}};
  const std::optional<LossReversal> pair = find_loss_reversal(samples);
  if (!pair) {
    side["loss_reversal"] = nullptr;
    side["r"] = c.r ? json(*c.r) : json(nullptr);
    side["delta_S"] = nullptr;
    side["report"] = nullptr;
    side["quantum_memory_detected"] = false;
  } else {
    const double r = c.r ? *c.r : minimize_delta_S_over_r(pair->eta1, pair->eta2).r_star;
    const TwoModeBlocks probe = two_mode_squeezed(r);
    const TwoModeBlocks s1 = apply_channel(probe, dho_channel(samples[pair->index1]));
    const TwoModeBlocks s2 = apply_channel(probe, dho_channel(samples[pair->index2]));
    const WitnessReport report = evaluate_gaussian_criterion(s1, s2, pair->t1, pair->t2);
    side["loss_reversal"] = {{"t1", pair->t1}, {"t2", pair->t2}, {"eta1", pair->eta1}, {"eta2", pair->eta2}};
    side["r"] = r;
    side["r_source"] = c.r ? "fixed" : "optimized";
    side["delta_S"] = report.delta_s;
    side["report"] = to_json(report);
    side["quantum_memory_detected"] = report.quantum_memory_detected;
  }
  out.sidecar = std::move(side);
  return out;
}

DensityMatrix density_from_json(const json& j) {
  require(j.is_object(), "state must be an object");
  require(j.contains("dims") && j.contains("real"), "state needs 'dims' and 'real'");
  const Dims dims = j.at("dims").get<Dims>();
  require(dims.size() == 2, "witness-eval needs bipartite dims [dS, dA]");
  const auto n = static_cast<Eigen::Index>(product(dims));
  const json& re = j.at("real");
  const json* im = j.contains("imag") ? &j.at("imag") : nullptr;
  require(re.is_array() && static_cast<Eigen::Index>(re.size()) == n, "'real' must have one row per basis state");
  require(im == nullptr || (im->is_array() && static_cast<Eigen::Index>(im->size()) == n),
          "'imag' must match 'real'");
  CMatrix m(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    require(static_cast<Eigen::Index>(re[r].size()) == n, "matrix rows must be square");
    for (Eigen::Index col = 0; col < n; ++col) {
      const double imag = im ? (*im)[r][col].get<double>() : 0.0;
      m(r, col) = cplx(re[r][col].get<double>(), imag);
    }
  }
  DensityMatrix rho(std::move(m), dims);
  rho.validate();
  return rho;
}

TwoModeBlocks blocks_from_json(const json& j) {
  require(j.is_object(), "state must be an object");
  TwoModeBlocks b;
  if (j.contains("sigma")) {
    const json& s = j.at("sigma");
    require(s.is_array() && s.size() == 4, "'sigma' must be a 4x4 array");
    Mat4 m;
    for (int r = 0; r < 4; ++r) {
      require(s[r].size() == 4, "'sigma' must be a 4x4 array");
      for (int c = 0; c < 4; ++c) m(r, c) = s[r][c].get<double>();
    }
    b = TwoModeBlocks::from_matrix(m);
  } else {
    b.alpha = mat2_from_json(j.at("alpha"), "alpha");
    b.beta = mat2_from_json(j.at("beta"), "beta");
    b.gamma = mat2_from_json(j.at("gamma"), "gamma");
  }
  require(b.is_physical(), "covariance blocks violate the uncertainty relation");
  return b;
}

CommandOutput witness_eval(const WitnessEvalConfig& c) {
  json doc;
  try {
    doc = json::parse(c.input_json);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("input is not valid JSON: ") + e.what());
  }
  require(doc.is_object(), "input must be a JSON object");
  require(doc.value("schema_version", 0) == kSchemaVersion, "unsupported or missing schema_version");
  const std::string kind = doc.value("kind", "");
  auto opt_time = [&](const char* key) -> std::optional<double> {
    if (!doc.contains(key) || doc.at(key).is_null()) return std::nullopt;
    return doc.at(key).get<double>();
  };
  const auto t1 = opt_time("t1");
  const auto t2 = opt_time("t2");
  require(!(t1 && t2) || *t1 < *t2, "t1 must be smaller than t2");

  WitnessReport report;
  try {
    if (kind == "density") {
      require(doc.contains("rho_t1") && doc.contains("rho_t2"), "density input needs rho_t1 and rho_t2");
      report = evaluate_criterion(density_from_json(doc.at("rho_t1")), density_from_json(doc.at("rho_t2")), t1, t2);
    } else if (kind == "gaussian") {
      require(doc.contains("state_t1") && doc.contains("state_t2"), "gaussian input needs state_t1 and state_t2");
      report = evaluate_gaussian_criterion(blocks_from_json(doc.at("state_t1")), blocks_from_json(doc.at("state_t2")),
                                           t1, t2);
    } else {
      throw ConfigError("'kind' must be 'density' or 'gaussian'");
    }
  } catch (const Error& e) {
    if (is_numerical(e.kind())) throw;
    throw ConfigError(e.what());
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed input: ") + e.what());
  }

  CommandOutput out;
  json j = to_json(report);
  j["schema_version"] = kSchemaVersion;
  j["kind"] = kind;
  out.data = j.dump(2) + "\n";
  return out;
}

}  // namespace qmem::cli
