// zcsk — diffusion molecular-communication modulation laboratory.
//
// Subcommands:
//   calibrate       recover the diffusion coefficient from a Pe target
//   sweep-threshold Pe / mutual information across decision thresholds
//   sweep-distance  Pe across transmitter-receiver distances at fixed lambda
//   simulate        one Monte Carlo stream at a single operating point
//
// Every run is reproducible from the config + seed echoed in the output
// metadata. Exit codes: 0 success, 2 config error, 3 calibration failure,
// 4 I/O error.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "zcsk/config.hpp"
#include "zcsk/errors.hpp"
#include "zcsk/fmt.hpp"
#include "zcsk/sweep.hpp"
#include "zcsk/version.hpp"

namespace {

using namespace zcsk;

double parse_list_double(const std::string& token, const char* what) {
  double value = 0.0;
  const char* begin = token.data();
  const char* end = begin + token.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end) {
    throw config_error(std::string("malformed ") + what + " value: '" +
                       token + "'");
  }
  return value;
}

std::vector<double> split_doubles(const std::string& text, const char* what) {
  std::vector<double> values;
  std::string token;
  std::istringstream stream(text);
  while (std::getline(stream, token, ',')) {
    values.push_back(parse_list_double(token, what));
  }
  if (values.empty()) {
    throw config_error(std::string("empty ") + what + " list");
  }
  return values;
}

// Grid syntax: either "lo:hi:step" (inclusive arithmetic range) or a
// comma-separated value list.
std::vector<double> parse_grid(const std::string& text) {
  if (text.find(':') == std::string::npos) {
    return split_doubles(text, "grid");
  }
  std::vector<double> parts;
  std::string token;
  std::istringstream stream(text);
  while (std::getline(stream, token, ':')) {
    parts.push_back(parse_list_double(token, "grid"));
  }
  if (parts.size() != 3) {
    throw config_error("grid range must be lo:hi:step, got '" + text + "'");
  }
  const double lo = parts[0], hi = parts[1], step = parts[2];
  if (!(step > 0.0) || !(hi >= lo)) {
    throw config_error("grid range must satisfy hi >= lo and step > 0");
  }
  const int count = static_cast<int>(std::floor((hi - lo) / step + 1e-9)) + 1;
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) grid.push_back(lo + step * i);
  return grid;
}

struct CommonFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_path;                 // empty -> stdout
  std::string engine = "analytic";
  std::optional<int> slots;
  std::optional<std::string> betas;
};

void add_common(CLI::App* cmd, CommonFlags* flags, bool with_engine = true) {
  cmd->add_option("--config", flags->config_path,
                  "Config file (flat key = value text)");
  cmd->add_option("--seed", flags->seed, "Master seed (overrides config)");
  cmd->add_option("--out", flags->out_path,
                  "Output file (default: standard output)");
  if (with_engine) {
    cmd->add_option("--engine", flags->engine, "Evaluation engine")
        ->check(CLI::IsMember({"analytic", "mc", "both"}));
  }
  cmd->add_option("--slots", flags->slots,
                  "Slots per Monte Carlo stream (overrides config)");
  cmd->add_option("--betas", flags->betas,
                  "Comma-separated inhibition efficiencies to overlay");
}

RunConfig load_config(const CommonFlags& flags) {
  RunConfig config =
      flags.config_path.empty() ? RunConfig{} : parse_config_file(flags.config_path);
  if (flags.seed) config.master_seed = *flags.seed;
  if (flags.slots) config.num_slots = *flags.slots;
  validate(config);
  return config;
}

std::vector<Engine> parse_engines(const std::string& name) {
  if (name == "analytic") return {Engine::analytic};
  if (name == "mc") return {Engine::montecarlo};
  return {Engine::analytic, Engine::montecarlo};
}

void write_text(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
  if (!out) throw io_error("cannot open output file for writing: " + out_path);
  out << text;
  out.flush();
  if (!out) throw io_error("error writing output file: " + out_path);
}

void emit_sweep(const SweepResult& result, const std::string& out_path) {
  if (out_path.empty()) {
    emit_csv(result, std::cout);
  } else {
    write_csv_file(result, out_path);
  }
}

int run_calibrate(const CommonFlags& flags, std::optional<double> target) {
  RunConfig config = load_config(flags);
  if (target) {
    config.calibrate_target = *target;
    config.calibrate_d = true;
  }
  if (!config.calibrate_d) config.calibrate_d = true;  // explicit request
  const ResolvedConfig resolved = resolve_diffusion(config);
  std::ostringstream report;
  report << "target_pe = " << format_double(config.calibrate_target) << '\n'
         << "diffusion_m2s = "
         << format_double(resolved.calibration.diffusion_m2_s) << '\n'
         << "achieved_pe = "
         << format_double(resolved.calibration.achieved_pe) << '\n'
         << "argmin_lambda = "
         << format_double(resolved.calibration.argmin_lambda) << '\n'
         << "evaluations = " << resolved.calibration.iterations << '\n';
  std::cout << report.str();
  if (!flags.out_path.empty()) {
    // Persist the resolved config so later runs skip calibration.
    write_text(to_config_text(resolved.config), flags.out_path);
  }
  return kExitOk;
}

int run_sweep(const CommonFlags& flags, SweepSpec::Variable variable,
              const std::optional<std::string>& grid_text,
              std::optional<double> fixed_lambda) {
  const RunConfig raw = load_config(flags);
  const ResolvedConfig resolved = resolve_diffusion(raw);

  SweepSpec spec;
  spec.base = resolved.config;
  spec.variable = variable;
  spec.engines = parse_engines(flags.engine);
  if (flags.betas) spec.betas = split_doubles(*flags.betas, "betas");
  if (grid_text) {
    spec.grid = parse_grid(*grid_text);
  } else if (variable == SweepSpec::Variable::threshold) {
    spec.grid = integer_thresholds(spec.base.n);
  } else {
    spec.grid = parse_grid("16e-6:48e-6:4e-6");
  }
  if (fixed_lambda) spec.fixed_lambda = *fixed_lambda;

  SweepResult result = variable == SweepSpec::Variable::threshold
                           ? run_threshold_sweep(spec)
                           : run_distance_sweep(spec);
  result.meta.calibrated = resolved.calibrated;
  result.meta.calibrate_target = raw.calibrate_target;
  emit_sweep(result, flags.out_path);
  return kExitOk;
}

int run_simulate(const CommonFlags& flags, std::optional<double> lambda,
                 std::optional<double> beta) {
  RunConfig raw = load_config(flags);
  if (beta) raw.inhibition_efficiency = *beta;
  validate(raw);
  const ResolvedConfig resolved = resolve_diffusion(raw);
  const RunConfig& config = resolved.config;
  const double threshold = lambda.value_or(20.0);

  const SimulationResult sim = simulate_stream(config.sim(), threshold);
  const MiEstimate mi = estimate_mutual_information(sim.report);

  std::ostringstream report;
  report << "scheme = "
         << (config.scheme == Scheme::csk ? "csk" : "zebra-csk") << '\n'
         << "beta = " << format_double(config.inhibition_efficiency) << '\n'
         << "lambda = " << format_double(threshold) << '\n'
         << "seed = " << config.master_seed << '\n'
         << "diffusion_m2s = " << format_double(config.diffusion_coefficient)
         << '\n'
         << "slots_counted = " << sim.report.slots_counted << '\n'
         << "errors = " << sim.report.errors << '\n'
         << "pe = " << format_double(sim.report.pe) << '\n'
         << "pe_ci95 = [" << format_double(sim.report.ci_low) << ", "
         << format_double(sim.report.ci_high) << "]\n"
         << "joint_counts = " << sim.report.joint[0] << ','
         << sim.report.joint[1] << ',' << sim.report.joint[2] << ','
         << sim.report.joint[3] << '\n'
         << "mi_bits = " << format_double(mi.bits) << '\n';
  if (mi.low_cell_counts) {
    report << "mi_warning = low cell counts; estimate is noisy\n";
  }
  if (mi.degenerate_marginal) {
    report << "mi_warning = degenerate marginal; mutual information pinned "
              "to 0\n";
  }
  if (flags.engine == "analytic" || flags.engine == "both") {
    const JointDistribution joint =
        joint_distribution(config.channel(), threshold);
    report << "analytic_pe = " << format_double(joint.error_prob()) << '\n'
           << "analytic_mi_bits = " << format_double(mutual_information(joint))
           << '\n';
  }
  write_text(report.str(), flags.out_path);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"zcsk: diffusion molecular-communication modulation laboratory"};
  app.set_version_flag("--version", std::string("zcsk ") + kVersion);
  app.require_subcommand(1);

  CommonFlags calibrate_flags;
  std::optional<double> calibrate_target;
  CLI::App* calibrate_cmd = app.add_subcommand(
      "calibrate", "Recover the diffusion coefficient from a Pe target");
  add_common(calibrate_cmd, &calibrate_flags, /*with_engine=*/false);
  calibrate_cmd->add_option("--target", calibrate_target,
                            "CSK minimum-threshold Pe target in (0, 0.5)");

  CommonFlags threshold_flags;
  std::optional<std::string> threshold_grid;
  CLI::App* threshold_cmd = app.add_subcommand(
      "sweep-threshold",
      "Sweep the decision threshold; emit Pe and mutual information CSV");
  add_common(threshold_cmd, &threshold_flags);
  threshold_cmd->add_option(
      "--grid", threshold_grid,
      "Threshold grid: lo:hi:step or comma list (default: integers 0..2n)");

  CommonFlags distance_flags;
  std::optional<std::string> distance_grid;
  std::optional<double> distance_lambda;
  CLI::App* distance_cmd = app.add_subcommand(
      "sweep-distance", "Sweep the link distance at a fixed threshold");
  add_common(distance_cmd, &distance_flags);
  distance_cmd->add_option(
      "--grid", distance_grid,
      "Distance grid in meters: lo:hi:step or comma list "
      "(default: 16e-6:48e-6:4e-6)");
  distance_cmd->add_option("--lambda", distance_lambda,
                           "Fixed decision threshold (default: 20)");

  CommonFlags simulate_flags;
  std::optional<double> simulate_lambda;
  std::optional<double> simulate_beta;
  CLI::App* simulate_cmd = app.add_subcommand(
      "simulate", "Run one Monte Carlo stream at a single operating point");
  add_common(simulate_cmd, &simulate_flags);
  simulate_cmd->add_option("--lambda", simulate_lambda,
                           "Decision threshold (default: 20)");
  simulate_cmd->add_option("--beta", simulate_beta,
                           "Inhibition efficiency (overrides config)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfigError;
  }

  try {
    if (calibrate_cmd->parsed()) {
      return run_calibrate(calibrate_flags, calibrate_target);
    }
    if (threshold_cmd->parsed()) {
      return run_sweep(threshold_flags, SweepSpec::Variable::threshold,
                       threshold_grid, std::nullopt);
    }
    if (distance_cmd->parsed()) {
      return run_sweep(distance_flags, SweepSpec::Variable::distance,
                       distance_grid, distance_lambda);
    }
    return run_simulate(simulate_flags, simulate_lambda, simulate_beta);
  } catch (const config_error& e) {
    std::cerr << "zcsk: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const calibration_error& e) {
    std::cerr << "zcsk: " << e.what() << '\n';
    return kExitCalibrationError;
  } catch (const io_error& e) {
    std::cerr << "zcsk: " << e.what() << '\n';
    return kExitIoError;
  } catch (const std::exception& e) {
    std::cerr << "zcsk: " << e.what() << '\n';
    return kExitConfigError;
  }
}
