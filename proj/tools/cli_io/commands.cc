// Copyright 2026 The Homodyne Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "commands.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "homodyne/detector.h"
#include "homodyne/error.h"
#include "homodyne/noise_trace.h"
#include "homodyne/random.h"
#include "homodyne/squeezing.h"
#include "homodyne/tomography.h"
#include "synthesis.h"

namespace homodyne::cli {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

std::string read_file(const std::string& path, const std::string& what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kMissingInput, what + ": cannot read " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

// Parse errors from an input file are prefixed with its path.
template <typename Fn>
auto parse_file(const std::string& path, const std::string& what, Fn&& parse) {
  const std::string text = read_file(path, what);
  try {
    return parse(text);
  } catch (const Error& e) {
    throw Error(e.kind(), path + ": " + e.what());
  }
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::uint64_t seed_of(const ExperimentConfig& config) { return *config.seed; }

// All-or-nothing trace inputs: returns true if files are supplied.
bool traces_supplied(const std::vector<std::pair<std::string, std::string>>& inputs,
                     const std::string& command) {
  std::size_t given = 0;
  for (const auto& [key, path] : inputs) given += !path.empty();
  if (given == 0) return false;
  if (given < inputs.size()) {
    for (const auto& [key, path] : inputs) {
      if (path.empty()) {
        throw Error(ErrorKind::kMissingInput,
                    command + ": missing input inputs." + key +
                        " (trace inputs must be supplied together or not at all)");
      }
    }
  }
  return true;
}

NoiseTrace load_trace(const std::string& path, const std::string& key) {
  return parse_file(path, "inputs." + key,
                    [](const std::string& t) { return parse_noise_trace_csv(t); });
}

Json eq1_json(const Eq1Fit& fit) { return Json::parse(eq1_fit_json(fit)); }

std::vector<VariancePair> variance_data(const ExperimentConfig& config, RunContext& ctx) {
  if (!config.inputs.variances.empty()) {
    ctx.log("variances: " + config.inputs.variances);
    return parse_file(config.inputs.variances, "inputs.variances",
                      [](const std::string& t) { return parse_variances_csv(t); });
  }
  auto pairs = synthesize_variances(config, seed_of(config));
  ctx.write("variances.csv", variances_csv(pairs));
  ctx.log("variances: synthesised");
  return pairs;
}

std::vector<double> lo_ramp(const LockSection& lock) {
  std::vector<double> out(lock.steps);
  for (int k = 0; k < lock.steps; ++k) out[k] = lock.lo_phase_span_rad * k / lock.steps;
  return out;
}

}  // namespace

RunContext::RunContext(fs::path out_dir, int threads, std::ostream& progress)
    : out_dir_(std::move(out_dir)), threads_(threads), progress_(progress) {
  std::error_code ec;
  fs::create_directories(out_dir_, ec);
  if (ec || !fs::is_directory(out_dir_)) {
    throw Error(ErrorKind::kInvalidArgument,
                "cannot create output directory " + out_dir_.string());
  }
}

void RunContext::write(const std::string& name, const std::string& content) const {
  std::ofstream out(out_dir_ / name, std::ios::binary | std::ios::trunc);
  out << content;
  if (!out) {
    throw Error(ErrorKind::kInvalidArgument, "cannot write " + (out_dir_ / name).string());
  }
}

void RunContext::log(const std::string& line) { log_.push_back(line); }

void RunContext::finish() const {
  std::string text;
  for (const auto& line : log_) text += line + "\n";
  write("run.log", text);
}

void cmd_characterise(const ExperimentConfig& config, RunContext& ctx) {
  const auto& in = config.inputs;
  DetectorTraces traces;
  if (traces_supplied({{"shot_trace", in.shot_trace}, {"dark_trace", in.dark_trace}},
                      "characterise")) {
    traces.shot = load_trace(in.shot_trace, "shot_trace");
    traces.dark = load_trace(in.dark_trace, "dark_trace");
    ctx.log("traces: " + in.shot_trace + ", " + in.dark_trace);
  } else {
    traces = synthesize_detector_traces(config, seed_of(config));
    ctx.write("shot_trace.csv", noise_trace_csv(traces.shot));
    ctx.write("dark_trace.csv", noise_trace_csv(traces.dark));
    ctx.log("traces: synthesised");
  }
  if (!same_grid(traces.shot, traces.dark)) {
    throw Error(ErrorKind::kGridMismatch, "shot and dark traces use different frequency grids");
  }

  std::string clearance_csv = "freq_hz,clearance_db\n";
  double clearance_max = -INFINITY;
  for (std::size_t i = 0; i < traces.shot.size(); ++i) {
    const double c = traces.shot.power_dbm[i] - traces.dark.power_dbm[i];
    clearance_max = std::max(clearance_max, c);
    clearance_csv += fmt(traces.shot.freq_hz[i]) + "," + fmt(c) + "\n";
  }
  ctx.write("clearance_spectrum.csv", clearance_csv);

  const auto bw = fit_butterworth(traces.shot, traces.dark);
  Json bw_json = {{"f3db_hz", bw.f3db_hz},
                  {"order", bw.order},
                  {"gain_mw", bw.gain_mw},
                  {"weighted_rss", bw.weighted_rss},
                  {"aic", bw.aic},
                  {"aic_by_order", bw.aic_by_order},
                  {"points_used", bw.points_used}};
  ctx.write("butterworth_fit.json", dump(bw_json));

  LinearitySweep sweep;
  if (!in.linearity.empty()) {
    sweep = parse_file(in.linearity, "inputs.linearity",
                       [](const std::string& t) { return parse_linearity_csv(t); });
    ctx.log("linearity: " + in.linearity);
  } else {
    sweep = synthesize_linearity(config, seed_of(config));
    ctx.write("linearity_sweep.csv", linearity_csv(sweep));
    ctx.log("linearity: synthesised");
  }
  const auto lin = linearity_fit(sweep.lo_power_mw, sweep.variance_v2, sweep.dark_variance_v2);
  Json lin_json = {{"slope", lin.slope},
                   {"slope_stderr", lin.slope_stderr},
                   {"intercept_log10_v2_at_1mw", lin.intercept},
                   {"points_used", lin.points_used},
                   {"lo_power_mw", sweep.lo_power_mw},
                   {"saturated", lin.saturated}};
  ctx.write("linearity_fit.json", dump(lin_json));

  const auto& det = config.detector;
  std::string cmrr = "phi_mzi_rad,reflectivity,cmrr_db\n";
  for (int k = -10; k <= 10; ++k) {
    MziState mzi;
    mzi.phi_mzi = 0.02 * k;
    mzi.crosstalk = config.lock.crosstalk;
    cmrr += fmt(mzi.phi_mzi) + "," + fmt(mzi.reflectivity()) + "," +
            fmt(cmrr_db(mzi, det.responsivity_a_a_per_w, det.responsivity_b_a_per_w)) + "\n";
  }
  ctx.write("cmrr.csv", cmrr);

  MziState start;
  start.crosstalk = config.lock.crosstalk;
  const auto ramp = lo_ramp(config.lock);
  const auto lock = pid_lock_mzi(start, ramp, config.pid_gains());
  std::string trajectory = "step,lo_phase_rad,phi_mzi_rad,reflectivity\n";
  for (std::size_t k = 0; k < ramp.size(); ++k) {
    trajectory += std::to_string(k) + "," + fmt(ramp[k]) + "," + fmt(lock.phi_mzi[k]) + "," +
                  fmt(lock.reflectivity[k]) + "\n";
  }
  ctx.write("lock_trajectory.csv", trajectory);
  Json lock_json = {{"kp", config.lock.kp},
                    {"ki", config.lock.ki},
                    {"kd", config.lock.kd},
                    {"crosstalk", config.lock.crosstalk},
                    {"steps", config.lock.steps},
                    {"lo_phase_span_rad", config.lock.lo_phase_span_rad},
                    {"locked", lock.locked},
                    {"oscillating", lock.oscillating},
                    {"final_reflectivity", lock.reflectivity.back()},
                    {"control_effort_rad", lock.control_effort}};
  ctx.write("lock.json", dump(lock_json));

  Json summary = {{"f3db_hz", bw.f3db_hz},
                  {"butterworth_order", bw.order},
                  {"clearance_max_db", clearance_max},
                  {"linearity_slope", lin.slope},
                  {"linearity_points_used", lin.points_used},
                  {"lock_locked", lock.locked}};
  ctx.write("summary.json", dump(summary));
  ctx.log("f3db_hz=" + fmt(bw.f3db_hz) + " order=" + std::to_string(bw.order) +
          " clearance_max_db=" + fmt(clearance_max) + " slope=" + fmt(lin.slope));
}

void cmd_fit_eq1(const ExperimentConfig& config, RunContext& ctx) {
  const auto pairs = variance_data(config, ctx);
  const auto fit = fit_eq1(pairs, config.fit_options());
  ctx.write("eq1_fit.json", dump(eq1_json(fit)));
  ctx.log("eta_hat=" + fmt(fit.estimate.eta) + " mu_hat=" + fmt(fit.estimate.mu));
}

void cmd_squeeze_scan(const ExperimentConfig& config, RunContext& ctx) {
  const auto pairs = variance_data(config, ctx);
  const auto fit = fit_eq1(pairs, config.fit_options());
  ctx.write("eq1_fit.json", dump(eq1_json(fit)));
  ctx.log("eta_hat=" + fmt(fit.estimate.eta) + " mu_hat=" + fmt(fit.estimate.mu));

  const VariancePair* strongest = nullptr;
  for (const auto& p : pairs) {
    if (p.v_min && (!strongest || p.p_shg_mw > strongest->p_shg_mw)) strongest = &p;
  }
  if (strongest) {
    const auto src = loss_correct(*strongest->v_min, fit.estimate.eta);
    Json src_json = {{"p_shg_mw", strongest->p_shg_mw},
                     {"v_min_measured_shotnoise", *strongest->v_min},
                     {"eta_total", fit.estimate.eta},
                     {"v_source_shotnoise", src.variance},
                     {"squeezing_db", src.squeezing_db}};
    ctx.write("source_squeezing.json", dump(src_json));
    ctx.log("source_squeezing_db=" + fmt(src.squeezing_db));
  }

  const auto& in = config.inputs;
  SqueezingTraces traces;
  if (traces_supplied({{"squeezed_trace", in.squeezed_trace},
                       {"shot_trace", in.shot_trace},
                       {"dark_trace", in.dark_trace}},
                      "squeeze-scan")) {
    traces.squeezed = load_trace(in.squeezed_trace, "squeezed_trace");
    traces.shot = load_trace(in.shot_trace, "shot_trace");
    traces.dark = load_trace(in.dark_trace, "dark_trace");
    ctx.log("traces: " + in.squeezed_trace + ", " + in.shot_trace + ", " + in.dark_trace);
  } else {
    traces = synthesize_squeezing_traces(config, seed_of(config));
    ctx.write("squeezed_trace.csv", noise_trace_csv(traces.squeezed));
    ctx.write("shot_trace.csv", noise_trace_csv(traces.shot));
    ctx.write("dark_trace.csv", noise_trace_csv(traces.dark));
    ctx.log("traces: synthesised");
  }
  const auto spectrum = squeezing_vs_frequency(traces.squeezed, traces.shot, traces.dark);
  ctx.write("squeezing_spectrum.csv", squeezing_spectrum_csv(spectrum));
  Json reasons = Json::object();
  for (std::size_t i = 0; i < spectrum.masked.size(); ++i) {
    if (!spectrum.masked[i]) continue;
    const auto& reason = spectrum.mask_reason[i];
    reasons[reason] = reasons.value(reason, 0) + 1;
    ctx.log("masked freq_hz=" + fmt(spectrum.freq_hz[i]) + " reason=" + reason);
  }
  const double mean_db = spectrum.mean_db(config.fit.band_lo_hz, config.fit.band_hi_hz);
  Json summary = {{"band_lo_hz", config.fit.band_lo_hz},
                  {"band_hi_hz", config.fit.band_hi_hz},
                  {"mean_noise_ratio_db", mean_db},
                  {"mean_squeezing_db", -mean_db},
                  {"masked_points", spectrum.masked_count()},
                  {"mask_reasons", reasons}};
  ctx.write("squeezing_summary.json", dump(summary));
}

void cmd_simulate_samples(const ExperimentConfig& config, RunContext& ctx) {
  const auto& sim = config.simulation;
  const auto truth = true_state(config, working_cutoff(config.squeezer_spec().squeezing_parameter(),
                                                       config.tomography.cutoff));
  const PhaseCalibration calibration{sim.true_offset_rad, sim.true_rad_per_volt};
  const auto records = simulate_phase_scan(
      truth, config.scan_settings(), calibration, sim.samples,
      derive_stream(seed_of(config), Stream::kQuadratureSamples), ctx.threads());
  ctx.write("scan_records.csv", scan_records_csv(records));
  ctx.write("true_state.json", to_json(true_state(config, config.tomography.cutoff)) + "\n");
  Json cal = {{"offset_rad", calibration.offset_rad},
              {"rad_per_volt", calibration.rad_per_volt}};
  ctx.write("true_calibration.json", dump(cal));
  ctx.log("samples=" + std::to_string(records.size()));
}

void cmd_tomography(const ExperimentConfig& config, RunContext& ctx) {
  auto options = config.reconstruction_options();
  options.mle.threads = ctx.threads();
  std::ostream& progress = ctx.progress();
  progress << "iter,loglik,delta\n";
  options.mle.progress = [&progress](int iter, double ll, double delta) {
    progress << iter << "," << fmt(ll) << "," << fmt(delta) << "\n";
  };

  const auto& in = config.inputs;
  const bool synthesised = in.scan.empty() && in.samples.empty();
  Json calibration_json = Json::object();
  const auto reconstruct = [&]() -> ScanReconstruction {
    if (!in.samples.empty()) {
      if (!in.scan.empty()) {
        throw Error(ErrorKind::kInvalidArgument,
                    "tomography: give inputs.samples or inputs.scan, not both");
      }
      const auto samples = parse_file(in.samples, "inputs.samples",
                                      [](const std::string& t) { return parse_samples_csv(t); });
      ctx.log("samples: " + in.samples);
      return reconstruct_samples(samples, options);
    }
    std::vector<ScanRecord> records;
    if (!in.scan.empty()) {
      records = parse_file(in.scan, "inputs.scan",
                           [](const std::string& t) { return parse_scan_records_csv(t); });
      ctx.log("scan: " + in.scan);
    } else {
      const auto& sim = config.simulation;
      const double r = config.squeezer_spec().squeezing_parameter();
      const auto truth = true_state(config, working_cutoff(r, config.tomography.cutoff));
      records = simulate_phase_scan(truth, config.scan_settings(),
                                    {sim.true_offset_rad, sim.true_rad_per_volt}, sim.samples,
                                    derive_stream(seed_of(config), Stream::kQuadratureSamples),
                                    ctx.threads());
      ctx.log("scan: synthesised, " + std::to_string(records.size()) + " samples");
    }
    PhaseCalibration calibration{config.tomography.offset_rad, config.tomography.rad_per_volt};
    if (config.tomography.calibration == "fit") calibration = fit_phase_calibration(records);
    calibration_json = {{"mode", config.tomography.calibration},
                        {"offset_rad", calibration.offset_rad},
                        {"rad_per_volt", calibration.rad_per_volt}};
    return reconstruct_from_scan(records, calibration, options);
  };
  const ScanReconstruction rec = reconstruct();

  ctx.write("mle_report.json", mle_report_json(rec.report) + "\n");
  ctx.write("wigner.csv", wigner_csv(rec.wigner));
  Json contours = {{"squeezed_contour_level", rec.squeezed_contour_level},
                   {"vacuum_contour_level", rec.vacuum_contour_level},
                   {"semi_major_vacuum_half_units", rec.squeezed_axes.semi_major},
                   {"semi_minor_vacuum_half_units", rec.squeezed_axes.semi_minor},
                   {"major_angle_rad", rec.squeezed_axes.major_angle},
                   {"axis_ratio", rec.squeezed_axes.ratio()}};
  ctx.write("contours.json", dump(contours));

  Json summary = {{"iterations", rec.report.iterations},
                  {"converged", rec.report.converged},
                  {"final_delta", rec.report.final_delta},
                  {"final_log_likelihood", rec.report.log_likelihood.empty()
                                               ? Json(nullptr)
                                               : Json(rec.report.log_likelihood.back())},
                  {"calibration", calibration_json},
                  {"warnings", rec.warnings}};
  if (synthesised) {
    const auto truth = true_state(config, config.tomography.cutoff);
    const double f = fidelity(rec.report.rho, truth);
    const auto pair = eq1_forward(config.squeezer.eta_total, config.squeezer.mu_per_sqrt_mw,
                                  config.squeezer.p_shg_mw);
    summary["fidelity_to_truth"] = f;
    summary["expected_axis_ratio"] = std::sqrt(*pair.v_max / *pair.v_min);
    ctx.log("fidelity_to_truth=" + fmt(f));
  }
  ctx.write("tomography_summary.json", dump(summary));
  for (const auto& w : rec.warnings) ctx.log("warning: " + w);
  ctx.log("iterations=" + std::to_string(rec.report.iterations) +
          " converged=" + (rec.report.converged ? "true" : "false"));
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Homodyne detector characterisation, squeezing analysis and state tomography"};
  app.name("homodyne");
  app.require_subcommand(1, 1);
  app.fallthrough();

  std::string config_path, out_dir = "homodyne_run";
  std::uint64_t seed = 0;
  int threads = 1;
  app.add_option("--config", config_path, "Experiment config (INI)");
  auto* seed_opt = app.add_option("--seed", seed, "Master seed; overrides [run] seed");
  app.add_option("--out-dir", out_dir, "Output directory")->capture_default_str();
  app.add_option("--threads", threads, "Worker threads")
      ->check(CLI::Range(1, 256))
      ->capture_default_str();

  using Command = void (*)(const ExperimentConfig&, RunContext&);
  const std::vector<std::tuple<std::string, std::string, Command>> commands = {
      {"characterise", "Bandwidth, clearance, linearity, CMRR and MZI lock", cmd_characterise},
      {"squeeze-scan", "Squeezing versus pump power and frequency", cmd_squeeze_scan},
      {"tomography", "Maximum-likelihood state reconstruction and Wigner function",
       cmd_tomography},
      {"simulate-samples", "Time-tagged homodyne samples under a phase scan",
       cmd_simulate_samples},
      {"fit-eq1", "Efficiency and pump coefficient from variance pairs", cmd_fit_eq1},
  };
  std::vector<CLI::App*> subs;
  for (const auto& [name, help, fn] : commands) subs.push_back(app.add_subcommand(name, help));

  std::vector<const char*> argv = {"homodyne"};
  for (const auto& a : args) argv.push_back(a.c_str());

  auto report = [&](std::string_view kind, const std::string& message, int code) {
    Json j = {{"error", kind}, {"message", message}, {"exit_code", code}};
    err << j.dump() << "\n";
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (!ec) {
      std::ofstream file(fs::path(out_dir) / "error.json", std::ios::binary | std::ios::trunc);
      file << j.dump(2) << "\n";
    }
    return code;
  };

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    return report("UsageError", e.what(), kExitBadInput);
  }

  try {
    ExperimentConfig config = config_path.empty() ? ExperimentConfig{} : load_config(config_path);
    if (seed_opt->count() > 0) config.seed = seed;
    validate(config);
    RunContext ctx(out_dir, threads, err);
    for (std::size_t i = 0; i < subs.size(); ++i) {
      if (!subs[i]->parsed()) continue;
      const auto& [name, help, fn] = commands[i];
      ctx.write("config.ini", config_to_ini(config));
      ctx.log("command: " + name);
      ctx.log("seed: " + std::to_string(*config.seed));
      fs::remove(fs::path(out_dir) / "error.json");
      fn(config, ctx);
      ctx.finish();
      out << name << ": wrote " << out_dir << "\n";
    }
    return kExitOk;
  } catch (const Error& e) {
    return report(error_kind_name(e.kind()), e.what(),
                  is_numerical(e.kind()) ? kExitNumerical : kExitBadInput);
  } catch (const std::exception& e) {
    return report("InternalError", e.what(), kExitNumerical);
  }
}

}  // namespace homodyne::cli
