#pragma once

#include <stdexcept>
#include <string>

namespace zcsk {

/// Malformed or inconsistent run configuration (config file, CLI flags,
/// out-of-range parameter values). CLI maps this to exit code 2.
struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Diffusion-coefficient calibration could not bracket or reach the
/// requested error-rate target. CLI maps this to exit code 3.
struct calibration_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// File/stream failure while reading configs or writing results.
/// CLI maps this to exit code 4.
struct io_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitCalibrationError = 3;
inline constexpr int kExitIoError = 4;

}  // namespace zcsk
