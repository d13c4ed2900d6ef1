#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "zcsk/config.hpp"

namespace zcsk {

enum class Engine { analytic, montecarlo };

/// A parameter sweep request: one variable, a grid of values, overlaid
/// inhibition efficiencies, and the engines to evaluate.
struct SweepSpec {
  enum class Variable { threshold, distance, beta };

  RunConfig base;                 // channel + simulator settings (D resolved)
  Variable variable = Variable::threshold;
  std::vector<double> grid;       // nonempty, strictly increasing
  std::vector<double> betas = {0.0, 0.5, 1.0};
  std::vector<Engine> engines = {Engine::analytic};
  double fixed_lambda = 20.0;     // decision threshold for distance sweeps
};

/// Throws config_error unless the spec is well-formed for the given op.
void validate(const SweepSpec& spec, SweepSpec::Variable expected);

struct SweepRow {
  std::string variable_name;      // "lambda" or "distance_m"
  double variable_value;
  double beta;
  Engine engine;
  double pe;
  std::optional<double> pe_ci_halfwidth;  // Monte Carlo rows only
  double mi_bits;
  double lambda;                  // decision threshold used for the row
  // Effective channel parameters of the row (distance varies per row in
  // distance sweeps):
  int n;
  double d_m;
  double D_m2s;
  double Ts_s;
  double q;
};

/// Per-beta optimum summary for threshold sweeps.
struct BetaSummary {
  double beta;
  Engine engine;
  double min_pe;
  double argmin_lambda;
  double max_mi;
  double argmax_lambda;
};

/// Zebra-vs-CSK comparison per distance (analytic rows; requires beta=0 in
/// the overlay set as the CSK baseline).
struct GapRow {
  double distance_m;
  double beta;
  double csk_pe;
  double zebra_pe;
  double gap;  // csk_pe - zebra_pe
};

struct RunMetadata {
  std::string tool_version;
  std::string subcommand;
  std::uint64_t seed = 0;
  std::string engine;             // "analytic", "mc", or "both"
  RunConfig base;
  bool calibrated = false;        // D recovered by calibration?
  double calibrate_target = 0.0;
  std::string grid_desc;
  std::vector<double> betas;
  double fixed_lambda = 0.0;      // distance sweeps only
  std::vector<BetaSummary> summaries;
  std::vector<GapRow> gaps;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  RunMetadata meta;
};

/// Diffusion-coefficient calibration: find D such that the minimum over the
/// integer threshold grid of the analytic CSK (beta=0) error probability
/// equals target_pe to relative tolerance 1e-4. Brackets by geometric
/// doubling/halving inside [1e-16, 1e-2] m^2/s, then bisects (the minimum
/// error probability is monotone decreasing in D). Throws calibration_error
/// when no bracket exists; throws config_error unless target is in (0, 0.5).
struct CalibrationResult {
  double diffusion_m2_s;
  double achieved_pe;
  double argmin_lambda;
  int iterations;
};

CalibrationResult calibrate_diffusion(double target_pe, ChannelParams base);

/// Resolve a RunConfig's diffusion coefficient, running calibration when
/// requested; returns the effective config plus calibration info.
struct ResolvedConfig {
  RunConfig config;
  bool calibrated;
  CalibrationResult calibration;  // meaningful when calibrated
};

ResolvedConfig resolve_diffusion(const RunConfig& config);

/// Pe and mutual information per (beta, threshold, engine). For Monte Carlo
/// rows, one stream per beta is sampled and decoded at every grid threshold
/// (thresholding is decode-time only). Also fills per-beta optimum
/// summaries in the metadata.
SweepResult run_threshold_sweep(const SweepSpec& spec);

/// Pe per (beta, distance, engine) at the spec's fixed threshold. Also
/// fills per-distance zebra-vs-CSK gap rows (analytic engine) when beta=0
/// is in the overlay set.
SweepResult run_distance_sweep(const SweepSpec& spec);

/// Deterministic CSV emission: '#'-prefixed metadata lines, one header row,
/// then data rows; locale-independent ('.' decimal point, shortest
/// round-trip float formatting). Column order:
///   variable_name,variable_value,beta,engine,pe,pe_ci_halfwidth,mi_bits,
///   lambda,n,d_m,D_m2s,Ts_s,q
/// pe_ci_halfwidth is empty for analytic rows.
void emit_csv(const SweepResult& result, std::ostream& out);

/// emit_csv to a file; throws io_error with path context on failure.
void write_csv_file(const SweepResult& result, const std::string& path);

const char* engine_name(Engine engine);

}  // namespace zcsk
