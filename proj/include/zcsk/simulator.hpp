#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "zcsk/channel.hpp"

namespace zcsk {

/// Modulation scheme simulated.
///  - csk:   every slot uses one molecule type; no inhibitors.
///  - zebra: messenger type alternates with slot parity (type a on even
///           slots, type b on odd ones); each slot also carries inhibitors
///           of the *other* type, which destroy late arrivals of that type
///           with probability beta.
enum class Scheme { csk, zebra };

/// When inhibitors are present in a slot:
///  - every_slot:   inhibitors accompany every slot (even symbol-0 ones).
///  - on_emission:  inhibitors are released only when the slot transmits 1.
enum class InhibitorPolicy { every_slot, on_emission };

/// What the receiver counts in a slot:
///  - total: all surviving molecules regardless of type (matches the
///           analytic model, which adds surviving ISI to the signal count).
///  - typed: only molecules of the slot's own messenger type (exploratory
///           mode exercising a fully type-selective receiver).
enum class CountingMode { total, typed };

struct SimConfig {
  ChannelParams channel;
  Scheme scheme = Scheme::zebra;
  int num_slots = 2;                 // >= 2
  std::uint64_t master_seed = 1;
  int isi_memory_slots = 1;          // >= 1: arrivals beyond this are dropped
  InhibitorPolicy inhibitor_policy = InhibitorPolicy::every_slot;
  CountingMode counting = CountingMode::total;
};

/// Throws std::domain_error on invariant violations.
void validate(const SimConfig& config);

/// A transmitted symbol sequence.
struct SymbolStream {
  std::vector<std::uint8_t> symbols;  // one bit per slot
};

/// i.i.d. Bernoulli(q) symbols; reproducible from the passed stream.
SymbolStream generate_symbols(double q, int length, rng::Xoshiro256pp& g);

/// Per-offset slot binning of one emission's hit times.
struct EmissionBins {
  std::vector<std::uint32_t> by_offset;  // index j: arrivals in (j Ts, (j+1) Ts]
  std::uint32_t beyond_horizon;          // arrivals later than the tracked window
};

/// Bin `times` into slots relative to the emission instant. by_offset has
/// memory_slots + 1 entries; together with beyond_horizon the counts always
/// total times.size() (conservation).
EmissionBins bin_emission(std::span<const double> times, double slot_duration_s,
                          int memory_slots);

/// The physical outcome of one simulated stream: surviving molecule counts
/// per slot and type, before any threshold is applied. Sampling is split
/// from decoding so one sampled stream can be decoded at many thresholds.
struct StreamSample {
  SymbolStream stream;
  std::vector<std::array<std::uint32_t, 2>> counts;  // [slot][type a|b]
};

StreamSample sample_stream(const SimConfig& config, std::uint64_t trial);

/// Per-slot receiver view after threshold decoding.
struct SlotObservation {
  int slot_index;
  std::uint32_t count_a;
  std::uint32_t count_b;
  std::uint8_t sent;
  std::uint8_t decoded;  // 1 iff relevant count >= lambda
};

/// Aggregated decode statistics over the counted (post-warm-up) slots.
struct TrialReport {
  std::uint64_t slots_counted = 0;
  std::uint64_t errors = 0;
  /// joint[s * 2 + r] = number of counted slots with sent s, decoded r.
  std::array<std::uint64_t, 4> joint{};
  double pe = 0.0;
  double ci_low = 0.0;        // Wilson 95% interval for pe
  double ci_high = 0.0;
  double ci_halfwidth = 0.0;  // (ci_high - ci_low) / 2
};

/// Decode a sampled stream at one threshold. The first isi_memory_slots
/// slots are warm-up: decoded in the observation list but excluded from the
/// report.
std::vector<SlotObservation> decode_stream(const StreamSample& sample,
                                           const SimConfig& config,
                                           double lambda);
TrialReport tally_stream(const StreamSample& sample, const SimConfig& config,
                         double lambda);

struct SimulationResult {
  std::vector<SlotObservation> observations;
  TrialReport report;
};

/// Sample + decode in one call (trial index 0).
SimulationResult simulate_stream(const SimConfig& config, double lambda);

/// Pooled error estimate over `repetitions` independent trials
/// (trial indices 0..repetitions-1), each of config.num_slots slots.
/// Deterministic in (config, lambda, repetitions).
TrialReport estimate_error_rate(const SimConfig& config, double lambda,
                                int repetitions);

/// Wilson score interval at 95% for a binomial proportion.
struct WilsonInterval {
  double low;
  double high;
  double halfwidth;
};

WilsonInterval wilson_ci(std::uint64_t successes, std::uint64_t total);

/// Empirical joint law from a report's counts.
JointDistribution empirical_joint(const TrialReport& report);

/// Plug-in mutual information estimate from one simulated stream.
struct MiEstimate {
  double bits;
  bool degenerate_marginal;  // a sent or decoded marginal was empty -> 0 bits
  bool low_cell_counts;      // some joint cell held < 5 slots; estimate noisy
};

MiEstimate estimate_mutual_information(const TrialReport& report);
MiEstimate estimate_mutual_information(const SimConfig& config, double lambda);

}  // namespace zcsk
