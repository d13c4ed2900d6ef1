#pragma once

#include <string>

namespace zcsk {

/// Locale-independent shortest round-trip decimal rendering of a double
/// (std::to_chars): "0.069", "7.62e-11", "100". Used for all numeric output
/// (CSV, metadata, config round-trips) so emitted files are byte-stable.
std::string format_double(double value);

}  // namespace zcsk
