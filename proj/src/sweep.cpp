#include "zcsk/sweep.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <utility>

#include "zcsk/errors.hpp"
#include "zcsk/fmt.hpp"
#include "zcsk/version.hpp"

namespace zcsk {

std::string format_double(double value) {
  char buffer[64];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
  return std::string(buffer, ptr);
}

const char* engine_name(Engine engine) {
  return engine == Engine::analytic ? "analytic" : "mc";
}

namespace {

// Physically meaningful diffusion coefficients end well inside this range;
// hitting a bound means the target cannot be bracketed.
constexpr double kDiffusionMin = 1e-16;
constexpr double kDiffusionMax = 1e-2;

const char* policy_name(InhibitorPolicy policy) {
  return policy == InhibitorPolicy::every_slot ? "every-slot"
                                               : "only-on-emission";
}

const char* scheme_name(Scheme scheme) {
  return scheme == Scheme::csk ? "csk" : "zebra-csk";
}

const char* counting_name(CountingMode counting) {
  return counting == CountingMode::total ? "total" : "typed";
}

std::string join_doubles(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out += ',';
    out += format_double(values[i]);
  }
  return out;
}

std::string engines_label(const std::vector<Engine>& engines) {
  const bool analytic = std::find(engines.begin(), engines.end(),
                                  Engine::analytic) != engines.end();
  const bool mc = std::find(engines.begin(), engines.end(),
                            Engine::montecarlo) != engines.end();
  if (analytic && mc) return "both";
  return analytic ? "analytic" : "mc";
}

}  // namespace

void validate(const SweepSpec& spec, SweepSpec::Variable expected) {
  if (spec.variable != expected) {
    throw config_error("sweep spec variable does not match the requested op");
  }
  if (spec.base.calibrate_d) {
    throw config_error(
        "sweep spec still requests diffusion calibration; resolve the "
        "diffusion coefficient first (resolve_diffusion)");
  }
  validate(spec.base);
  if (spec.grid.empty()) throw config_error("sweep grid must be nonempty");
  for (std::size_t i = 0; i + 1 < spec.grid.size(); ++i) {
    if (!(spec.grid[i] < spec.grid[i + 1])) {
      throw config_error("sweep grid must be strictly increasing");
    }
  }
  if (expected == SweepSpec::Variable::distance) {
    if (!(spec.grid.front() > 0.0)) {
      throw config_error("distance grid values must be positive");
    }
    if (!(spec.fixed_lambda >= 0.0)) {
      throw config_error("fixed_lambda must be >= 0");
    }
  } else {
    if (!(spec.grid.front() >= 0.0)) {
      throw config_error("threshold grid values must be >= 0");
    }
  }
  if (spec.betas.empty()) throw config_error("betas must be nonempty");
  for (const double beta : spec.betas) {
    if (!(beta >= 0.0 && beta <= 1.0)) {
      throw config_error("betas must lie in [0, 1]");
    }
  }
  if (spec.engines.empty()) throw config_error("engines must be nonempty");
}

CalibrationResult calibrate_diffusion(double target_pe, ChannelParams base) {
  if (!(target_pe > 0.0 && target_pe < 0.5)) {
    throw config_error("calibration target must be in (0, 0.5)");
  }
  base.inhibition_efficiency = 0.0;  // calibration anchors the CSK baseline
  int evaluations = 0;
  const auto min_pe_at = [&](double diffusion) {
    ++evaluations;
    ChannelParams params = base;
    params.geometry.diffusion_m2_s = diffusion;
    return min_error_prob(params);
  };

  // The minimum error probability is monotone nonincreasing in D: bracket
  // [lo, hi] with pe(lo) >= target >= pe(hi) by geometric expansion.
  double lo = 1e-12;
  while (min_pe_at(lo).value < target_pe) {
    lo *= 0.5;
    if (lo < kDiffusionMin) {
      throw calibration_error(
          "calibration target " + format_double(target_pe) +
          " unreachable: error probability stays below it for all D >= " +
          format_double(kDiffusionMin));
    }
  }
  double hi = std::max(2.0 * lo, 1e-10);
  while (min_pe_at(hi).value > target_pe) {
    hi *= 2.0;
    if (hi > kDiffusionMax) {
      throw calibration_error(
          "calibration target " + format_double(target_pe) +
          " unreachable: error probability stays above it for all D <= " +
          format_double(kDiffusionMax));
    }
  }

  for (int iter = 0; iter < 200 && hi / lo - 1.0 > 1e-13; ++iter) {
    const double mid = std::sqrt(lo * hi);
    if (min_pe_at(mid).value > target_pe) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double diffusion = std::sqrt(lo * hi);
  const ThresholdOptimum achieved = min_pe_at(diffusion);
  if (std::abs(achieved.value - target_pe) > 1e-4 * target_pe) {
    throw calibration_error(
        "calibration failed to converge: best achieved Pe " +
        format_double(achieved.value) + " vs target " +
        format_double(target_pe));
  }
  return CalibrationResult{diffusion, achieved.value, achieved.threshold,
                           evaluations};
}

ResolvedConfig resolve_diffusion(const RunConfig& config) {
  validate(config);
  if (!config.calibrate_d) {
    return ResolvedConfig{config, false, CalibrationResult{}};
  }
  RunConfig resolved = config;
  resolved.diffusion_coefficient = 1.0;  // placeholder for channel()
  const CalibrationResult calibration =
      calibrate_diffusion(config.calibrate_target, resolved.channel());
  resolved.diffusion_coefficient = calibration.diffusion_m2_s;
  resolved.calibrate_d = false;
  return ResolvedConfig{resolved, true, calibration};
}

namespace {

RunMetadata base_metadata(const SweepSpec& spec, std::string subcommand) {
  RunMetadata meta;
  meta.tool_version = kVersion;
  meta.subcommand = std::move(subcommand);
  meta.seed = spec.base.master_seed;
  meta.engine = engines_label(spec.engines);
  meta.base = spec.base;
  meta.betas = spec.betas;
  return meta;
}

bool has_engine(const SweepSpec& spec, Engine engine) {
  return std::find(spec.engines.begin(), spec.engines.end(), engine) !=
         spec.engines.end();
}

}  // namespace

SweepResult run_threshold_sweep(const SweepSpec& spec) {
  validate(spec, SweepSpec::Variable::threshold);
  SweepResult result;
  result.meta = base_metadata(spec, "sweep-threshold");
  {
    std::ostringstream desc;
    desc << "lambda " << format_double(spec.grid.front()) << ".."
         << format_double(spec.grid.back()) << " (" << spec.grid.size()
         << " points)";
    result.meta.grid_desc = desc.str();
  }

  const RunConfig& base = spec.base;
  for (const double beta : spec.betas) {
    if (has_engine(spec, Engine::analytic)) {
      ChannelParams params = base.channel();
      params.inhibition_efficiency = beta;
      const SlotProbabilities probs = slot_probs(params);
      BetaSummary summary{beta, Engine::analytic, 2.0, 0.0, -1.0, 0.0};
      for (const double lambda : spec.grid) {
        const JointDistribution joint = joint_distribution(
            params.molecules_per_symbol, probs, params.prior_one, lambda);
        const double pe = joint.error_prob();
        const double mi = mutual_information(joint);
        result.rows.push_back(SweepRow{
            "lambda", lambda, beta, Engine::analytic, pe, std::nullopt, mi,
            lambda, base.n, base.distance, base.diffusion_coefficient,
            base.slot_duration, base.prior_one});
        if (pe < summary.min_pe) {
          summary.min_pe = pe;
          summary.argmin_lambda = lambda;
        }
        if (mi > summary.max_mi) {
          summary.max_mi = mi;
          summary.argmax_lambda = lambda;
        }
      }
      result.meta.summaries.push_back(summary);
    }
    if (has_engine(spec, Engine::montecarlo)) {
      SimConfig sim = base.sim();
      sim.channel.inhibition_efficiency = beta;
      const StreamSample sample = sample_stream(sim, 0);
      BetaSummary summary{beta, Engine::montecarlo, 2.0, 0.0, -1.0, 0.0};
      for (const double lambda : spec.grid) {
        const TrialReport report = tally_stream(sample, sim, lambda);
        const double mi = estimate_mutual_information(report).bits;
        result.rows.push_back(SweepRow{
            "lambda", lambda, beta, Engine::montecarlo, report.pe,
            report.ci_halfwidth, mi, lambda, base.n, base.distance,
            base.diffusion_coefficient, base.slot_duration, base.prior_one});
        if (report.pe < summary.min_pe) {
          summary.min_pe = report.pe;
          summary.argmin_lambda = lambda;
        }
        if (mi > summary.max_mi) {
          summary.max_mi = mi;
          summary.argmax_lambda = lambda;
        }
      }
      result.meta.summaries.push_back(summary);
    }
  }
  return result;
}

SweepResult run_distance_sweep(const SweepSpec& spec) {
  validate(spec, SweepSpec::Variable::distance);
  SweepResult result;
  result.meta = base_metadata(spec, "sweep-distance");
  result.meta.fixed_lambda = spec.fixed_lambda;
  {
    std::ostringstream desc;
    desc << "distance_m " << format_double(spec.grid.front()) << ".."
         << format_double(spec.grid.back()) << " (" << spec.grid.size()
         << " points)";
    result.meta.grid_desc = desc.str();
  }

  const RunConfig& base = spec.base;
  // Pe per (beta, distance) for the gap table, from the analytic engine
  // when available, otherwise Monte Carlo.
  const Engine gap_engine = has_engine(spec, Engine::analytic)
                                ? Engine::analytic
                                : Engine::montecarlo;
  std::map<std::pair<double, double>, double> pe_table;

  for (const double beta : spec.betas) {
    if (has_engine(spec, Engine::analytic)) {
      for (const double distance : spec.grid) {
        ChannelParams params = base.channel();
        params.inhibition_efficiency = beta;
        params.geometry.distance_m = distance;
        const JointDistribution joint =
            joint_distribution(params, spec.fixed_lambda);
        const double pe = joint.error_prob();
        result.rows.push_back(SweepRow{
            "distance_m", distance, beta, Engine::analytic, pe, std::nullopt,
            mutual_information(joint), spec.fixed_lambda, base.n, distance,
            base.diffusion_coefficient, base.slot_duration, base.prior_one});
        if (gap_engine == Engine::analytic) pe_table[{beta, distance}] = pe;
      }
    }
    if (has_engine(spec, Engine::montecarlo)) {
      for (const double distance : spec.grid) {
        SimConfig sim = base.sim();
        sim.channel.inhibition_efficiency = beta;
        sim.channel.geometry.distance_m = distance;
        const StreamSample sample = sample_stream(sim, 0);
        const TrialReport report =
            tally_stream(sample, sim, spec.fixed_lambda);
        result.rows.push_back(SweepRow{
            "distance_m", distance, beta, Engine::montecarlo, report.pe,
            report.ci_halfwidth, estimate_mutual_information(report).bits,
            spec.fixed_lambda, base.n, distance, base.diffusion_coefficient,
            base.slot_duration, base.prior_one});
        if (gap_engine == Engine::montecarlo) {
          pe_table[{beta, distance}] = report.pe;
        }
      }
    }
  }

  // Zebra-vs-CSK gap per distance: beta=0 is the CSK baseline.
  const bool have_csk_baseline =
      std::find(spec.betas.begin(), spec.betas.end(), 0.0) !=
      spec.betas.end();
  if (have_csk_baseline) {
    for (const double beta : spec.betas) {
      if (beta == 0.0) continue;
      for (const double distance : spec.grid) {
        const double csk_pe = pe_table.at({0.0, distance});
        const double zebra_pe = pe_table.at({beta, distance});
        result.meta.gaps.push_back(
            GapRow{distance, beta, csk_pe, zebra_pe, csk_pe - zebra_pe});
      }
    }
  }
  return result;
}

void emit_csv(const SweepResult& result, std::ostream& out) {
  const RunMetadata& meta = result.meta;
  const RunConfig& base = meta.base;
  out << "# zcsk " << meta.tool_version << '\n';
  out << "# subcommand: " << meta.subcommand << '\n';
  out << "# seed: " << meta.seed << '\n';
  out << "# engine: " << meta.engine << '\n';
  out << "# scheme: " << scheme_name(base.scheme) << '\n';
  out << "# counting: " << counting_name(base.counting) << '\n';
  out << "# inhibitor_policy: " << policy_name(base.inhibitor_policy) << '\n';
  out << "# n: " << base.n << '\n';
  out << "# distance_m: " << format_double(base.distance) << '\n';
  out << "# diffusion_m2s: " << format_double(base.diffusion_coefficient)
      << '\n';
  out << "# diffusion_source: "
      << (meta.calibrated
              ? "calibrated (target " + format_double(meta.calibrate_target) +
                    ")"
              : "config")
      << '\n';
  out << "# slot_duration_s: " << format_double(base.slot_duration) << '\n';
  out << "# prior_one: " << format_double(base.prior_one) << '\n';
  out << "# num_slots: " << base.num_slots << '\n';
  out << "# isi_memory_slots: " << base.isi_memory_slots << '\n';
  out << "# betas: " << join_doubles(meta.betas) << '\n';
  out << "# grid: " << meta.grid_desc << '\n';
  if (meta.subcommand == "sweep-distance") {
    out << "# fixed_lambda: " << format_double(meta.fixed_lambda) << '\n';
  }
  for (const BetaSummary& s : meta.summaries) {
    out << "# summary: beta=" << format_double(s.beta)
        << " engine=" << engine_name(s.engine)
        << " min_pe=" << format_double(s.min_pe)
        << " argmin_lambda=" << format_double(s.argmin_lambda)
        << " max_mi=" << format_double(s.max_mi)
        << " argmax_lambda=" << format_double(s.argmax_lambda) << '\n';
  }
  for (const GapRow& g : meta.gaps) {
    out << "# gap: distance_m=" << format_double(g.distance_m)
        << " beta=" << format_double(g.beta)
        << " csk_pe=" << format_double(g.csk_pe)
        << " zebra_pe=" << format_double(g.zebra_pe)
        << " gap=" << format_double(g.gap) << '\n';
  }
  out << "variable_name,variable_value,beta,engine,pe,pe_ci_halfwidth,"
         "mi_bits,lambda,n,d_m,D_m2s,Ts_s,q\n";
  for (const SweepRow& row : result.rows) {
    out << row.variable_name << ',' << format_double(row.variable_value)
        << ',' << format_double(row.beta) << ',' << engine_name(row.engine)
        << ',' << format_double(row.pe) << ',';
    if (row.pe_ci_halfwidth.has_value()) {
      out << format_double(*row.pe_ci_halfwidth);
    }
    out << ',' << format_double(row.mi_bits) << ','
        << format_double(row.lambda) << ',' << row.n << ','
        << format_double(row.d_m) << ',' << format_double(row.D_m2s) << ','
        << format_double(row.Ts_s) << ',' << format_double(row.q) << '\n';
  }
}

void write_csv_file(const SweepResult& result, const std::string& path) {
  std::ostringstream buffer;
  emit_csv(result, buffer);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw io_error("cannot open output file for writing: " + path);
  out << buffer.str();
  out.flush();
  if (!out) throw io_error("error writing output file: " + path);
}

}  // namespace zcsk
