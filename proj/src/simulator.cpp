#include "zcsk/simulator.hpp"

#include <cmath>
#include <stdexcept>

#include "zcsk/kern/kernels.hpp"

namespace zcsk {
namespace {

// Normal quantile for 95% two-sided coverage.
constexpr double kZ95 = 1.959963984540054;

std::uint32_t relevant_count(const std::array<std::uint32_t, 2>& counts,
                             int slot, const SimConfig& config) {
  if (config.counting == CountingMode::total) return counts[0] + counts[1];
  const int own_type = config.scheme == Scheme::zebra ? (slot & 1) : 0;
  return counts[own_type];
}

void finalize(TrialReport& report) {
  report.pe = report.slots_counted == 0
                  ? 0.0
                  : static_cast<double>(report.errors) /
                        static_cast<double>(report.slots_counted);
  const WilsonInterval ci = wilson_ci(report.errors, report.slots_counted);
  report.ci_low = ci.low;
  report.ci_high = ci.high;
  report.ci_halfwidth = ci.halfwidth;
}

}  // namespace

void validate(const SimConfig& config) {
  validate(config.channel);
  if (config.num_slots < 2) throw std::domain_error("num_slots must be >= 2");
  if (config.isi_memory_slots < 1) {
    throw std::domain_error("isi_memory_slots must be >= 1");
  }
  if (config.isi_memory_slots >= config.num_slots) {
    throw std::domain_error(
        "num_slots must exceed isi_memory_slots (warm-up would consume the "
        "whole stream)");
  }
}

SymbolStream generate_symbols(double q, int length, rng::Xoshiro256pp& g) {
  if (!(q > 0.0 && q < 1.0)) {
    throw std::domain_error("symbol prior q must be in (0, 1)");
  }
  if (length < 0) throw std::domain_error("stream length must be >= 0");
  SymbolStream stream;
  stream.symbols.resize(static_cast<std::size_t>(length));
  for (auto& symbol : stream.symbols) {
    symbol = rng::u01_closed_open(g.next()) < q ? 1 : 0;
  }
  return stream;
}

EmissionBins bin_emission(std::span<const double> times,
                          double slot_duration_s, int memory_slots) {
  if (!(slot_duration_s > 0.0)) {
    throw std::domain_error("slot duration must be positive");
  }
  if (memory_slots < 0) throw std::domain_error("memory_slots must be >= 0");
  const kern::Backend& backend = kern::active_backend();
  EmissionBins bins;
  bins.by_offset.resize(static_cast<std::size_t>(memory_slots) + 1);
  std::uint32_t seen = 0;
  for (int j = 0; j <= memory_slots; ++j) {
    const auto k = static_cast<std::uint32_t>(backend.count_in_window(
        times.data(), times.size(), j * slot_duration_s,
        (j + 1) * slot_duration_s));
    bins.by_offset[static_cast<std::size_t>(j)] = k;
    seen += k;
  }
  bins.beyond_horizon = static_cast<std::uint32_t>(times.size()) - seen;
  return bins;
}

StreamSample sample_stream(const SimConfig& config, std::uint64_t trial) {
  validate(config);
  const ChannelParams& ch = config.channel;
  const int n = ch.molecules_per_symbol;
  const double ts = ch.slot_duration_s;
  const double beta = ch.inhibition_efficiency;
  const double scale = levy_scale(ch.geometry);
  const kern::Backend& backend = kern::active_backend();

  StreamSample sample;
  {
    rng::Xoshiro256pp symbol_rng(rng::derive_seed(
        config.master_seed, trial, 0, rng::StreamPurpose::symbols));
    sample.stream =
        generate_symbols(ch.prior_one, config.num_slots, symbol_rng);
  }
  sample.counts.assign(static_cast<std::size_t>(config.num_slots), {0u, 0u});

  const std::size_t nwords = (static_cast<std::size_t>(n) + 1) & ~std::size_t{1};
  std::vector<std::uint64_t> words(nwords);
  std::vector<double> normals(nwords);
  std::vector<double> times(static_cast<std::size_t>(n));

  for (int slot = 0; slot < config.num_slots; ++slot) {
    if (sample.stream.symbols[static_cast<std::size_t>(slot)] == 0) continue;
    // One private stream per (trial, emission slot): hit times first, then
    // any inhibition thinning draws, all in fixed order. Results therefore
    // never depend on evaluation order across slots.
    rng::Xoshiro256pp g(rng::derive_seed(config.master_seed, trial,
                                         static_cast<std::uint64_t>(slot),
                                         rng::StreamPurpose::emission));
    g.fill(words.data(), nwords);
    backend.normal_pairs(words.data(), nwords, normals.data());
    backend.levy_from_normal(normals.data(), static_cast<std::size_t>(n),
                             scale, times.data());

    const int emission_type =
        config.scheme == Scheme::zebra ? (slot & 1) : 0;
    for (int j = 0; j <= config.isi_memory_slots; ++j) {
      const int target = slot + j;
      if (target >= config.num_slots) break;
      auto k = static_cast<std::uint32_t>(backend.count_in_window(
          times.data(), times.size(), j * ts, (j + 1) * ts));
      if (k > 0 && j > 0 && config.scheme == Scheme::zebra && beta > 0.0) {
        // The landing slot carries inhibitors of the type opposite its own
        // messenger type; they attack arrivals whose type matches, i.e.
        // emissions an odd number of slots back.
        const bool suppressible = (j & 1) != 0;
        const bool inhibitors_present =
            config.inhibitor_policy == InhibitorPolicy::every_slot ||
            sample.stream.symbols[static_cast<std::size_t>(target)] == 1;
        if (suppressible && inhibitors_present) {
          g.fill(words.data(), k);
          k -= static_cast<std::uint32_t>(
              backend.count_below(words.data(), k, beta));
        }
      }
      sample.counts[static_cast<std::size_t>(target)]
                   [static_cast<std::size_t>(emission_type)] += k;
    }
  }
  return sample;
}

std::vector<SlotObservation> decode_stream(const StreamSample& sample,
                                           const SimConfig& config,
                                           double lambda) {
  std::vector<SlotObservation> observations;
  observations.reserve(sample.counts.size());
  for (int slot = 0; slot < static_cast<int>(sample.counts.size()); ++slot) {
    const auto& counts = sample.counts[static_cast<std::size_t>(slot)];
    const std::uint32_t relevant = relevant_count(counts, slot, config);
    observations.push_back(SlotObservation{
        slot, counts[0], counts[1],
        sample.stream.symbols[static_cast<std::size_t>(slot)],
        static_cast<std::uint8_t>(static_cast<double>(relevant) >= lambda
                                      ? 1
                                      : 0)});
  }
  return observations;
}

TrialReport tally_stream(const StreamSample& sample, const SimConfig& config,
                         double lambda) {
  TrialReport report;
  const int num_slots = static_cast<int>(sample.counts.size());
  for (int slot = config.isi_memory_slots; slot < num_slots; ++slot) {
    const auto& counts = sample.counts[static_cast<std::size_t>(slot)];
    const std::uint32_t relevant = relevant_count(counts, slot, config);
    const int sent = sample.stream.symbols[static_cast<std::size_t>(slot)];
    const int decoded = static_cast<double>(relevant) >= lambda ? 1 : 0;
    ++report.slots_counted;
    ++report.joint[static_cast<std::size_t>(sent * 2 + decoded)];
    report.errors += static_cast<std::uint64_t>(sent != decoded);
  }
  finalize(report);
  return report;
}

SimulationResult simulate_stream(const SimConfig& config, double lambda) {
  const StreamSample sample = sample_stream(config, 0);
  return SimulationResult{decode_stream(sample, config, lambda),
                          tally_stream(sample, config, lambda)};
}

TrialReport estimate_error_rate(const SimConfig& config, double lambda,
                                int repetitions) {
  if (repetitions < 1) throw std::domain_error("repetitions must be >= 1");
  TrialReport pooled;
  for (int trial = 0; trial < repetitions; ++trial) {
    const StreamSample sample =
        sample_stream(config, static_cast<std::uint64_t>(trial));
    const TrialReport report = tally_stream(sample, config, lambda);
    pooled.slots_counted += report.slots_counted;
    pooled.errors += report.errors;
    for (std::size_t cell = 0; cell < 4; ++cell) {
      pooled.joint[cell] += report.joint[cell];
    }
  }
  finalize(pooled);
  return pooled;
}

WilsonInterval wilson_ci(std::uint64_t successes, std::uint64_t total) {
  if (total == 0) return WilsonInterval{0.0, 1.0, 0.5};
  const double n = static_cast<double>(total);
  const double p_hat = static_cast<double>(successes) / n;
  const double z2 = kZ95 * kZ95;
  const double denom = 1.0 + z2 / n;
  const double center = (p_hat + z2 / (2.0 * n)) / denom;
  const double halfwidth =
      kZ95 *
      std::sqrt(p_hat * (1.0 - p_hat) / n + z2 / (4.0 * n * n)) / denom;
  double low = center - halfwidth;
  double high = center + halfwidth;
  // At the degenerate proportions the interval endpoint is analytically
  // exact (the center and halfwidth terms cancel); rounding would otherwise
  // leave ~1e-18 of dust there.
  if (successes == 0) low = 0.0;
  if (successes == total) high = 1.0;
  if (low < 0.0) low = 0.0;
  if (high > 1.0) high = 1.0;
  return WilsonInterval{low, high, halfwidth};
}

JointDistribution empirical_joint(const TrialReport& report) {
  const double n = report.slots_counted == 0
                       ? 1.0
                       : static_cast<double>(report.slots_counted);
  return JointDistribution{
      static_cast<double>(report.joint[0]) / n,
      static_cast<double>(report.joint[1]) / n,
      static_cast<double>(report.joint[2]) / n,
      static_cast<double>(report.joint[3]) / n,
  };
}

MiEstimate estimate_mutual_information(const TrialReport& report) {
  MiEstimate estimate{0.0, false, false};
  const std::uint64_t sent0 = report.joint[0] + report.joint[1];
  const std::uint64_t sent1 = report.joint[2] + report.joint[3];
  const std::uint64_t dec0 = report.joint[0] + report.joint[2];
  const std::uint64_t dec1 = report.joint[1] + report.joint[3];
  if (sent0 == 0 || sent1 == 0 || dec0 == 0 || dec1 == 0) {
    estimate.degenerate_marginal = true;
    return estimate;
  }
  for (const std::uint64_t cell : report.joint) {
    if (cell < 5) estimate.low_cell_counts = true;
  }
  estimate.bits = mutual_information(empirical_joint(report));
  return estimate;
}

MiEstimate estimate_mutual_information(const SimConfig& config,
                                       double lambda) {
  const StreamSample sample = sample_stream(config, 0);
  return estimate_mutual_information(tally_stream(sample, config, lambda));
}

}  // namespace zcsk
