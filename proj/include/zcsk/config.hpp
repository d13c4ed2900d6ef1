#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "zcsk/simulator.hpp"

namespace zcsk {

/// One complete run configuration: everything a CLI invocation needs.
/// Defaults describe the reference operating point (n=100, d=32 um,
/// Ts=5.9 s, q=0.5) with the diffusion coefficient recovered by
/// calibration.
struct RunConfig {
  int n = 100;
  double distance = 32e-6;              // m
  double diffusion_coefficient = 0.0;   // m^2/s; ignored when calibrate_d
  bool calibrate_d = true;              // "diffusion_coefficient = calibrate"
  double calibrate_target = 0.069;      // CSK min-threshold Pe target
  double slot_duration = 5.9;           // s
  double inhibition_efficiency = 0.5;   // beta
  double prior_one = 0.5;               // q
  int num_slots = 100000;
  std::uint64_t master_seed = 1;
  int isi_memory_slots = 1;
  InhibitorPolicy inhibitor_policy = InhibitorPolicy::every_slot;
  Scheme scheme = Scheme::zebra;
  CountingMode counting = CountingMode::total;

  ChannelParams channel() const {
    return ChannelParams{n,
                         LinkGeometry{distance, diffusion_coefficient},
                         slot_duration,
                         inhibition_efficiency,
                         prior_one};
  }

  SimConfig sim() const {
    return SimConfig{channel(),    scheme,           num_slots,
                     master_seed,  isi_memory_slots, inhibitor_policy,
                     counting};
  }
};

/// Parse a flat `key = value` config text ('#' starts a comment; blank
/// lines ignored; SI units; keys match the field names above; enum values:
/// inhibitor_policy every-slot|only-on-emission, scheme csk|zebra-csk,
/// counting total|typed; `diffusion_coefficient = calibrate` requests
/// calibration against calibrate_target). Unknown keys, duplicate keys,
/// malformed values, or out-of-range values throw config_error.
RunConfig parse_config_text(const std::string& text);

/// Load and parse a config file; throws io_error when unreadable.
RunConfig parse_config_file(const std::string& path);

/// Render a RunConfig back to config-file text (round-trips through
/// parse_config_text).
std::string to_config_text(const RunConfig& config);

/// Range-check every field; throws config_error with the offending key.
void validate(const RunConfig& config);

}  // namespace zcsk
