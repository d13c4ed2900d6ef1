#include <cstddef>
#include <cstdint>

#include "zcsk/kern/kernels.hpp"
#include "scalar_core.hpp"

namespace zcsk::kern {
namespace {

void normal_pairs_scalar(const std::uint64_t* bits, std::size_t nwords,
                         double* out) {
  for (std::size_t i = 0; i + 1 < nwords; i += 2) {
    const detail::NormalPair p = detail::bm_pair(bits[i], bits[i + 1]);
    out[i] = p.z0;
    out[i + 1] = p.z1;
  }
}

void levy_scalar(const double* z, std::size_t n, double scale, double* t) {
  for (std::size_t i = 0; i < n; ++i) t[i] = detail::levy_core(z[i], scale);
}

std::size_t count_in_window_scalar(const double* t, std::size_t n, double lo,
                                   double hi) {
  std::size_t count = 0;
  for (std::size_t i = 0; i < n; ++i) count += detail::in_window(t[i], lo, hi);
  return count;
}

std::size_t count_below_scalar(const std::uint64_t* bits, std::size_t n,
                               double p) {
  std::size_t count = 0;
  for (std::size_t i = 0; i < n; ++i) count += detail::below(bits[i], p);
  return count;
}

}  // namespace

const Backend& scalar_backend() {
  static constexpr Backend backend{
      "scalar",
      &normal_pairs_scalar,
      &levy_scalar,
      &count_in_window_scalar,
      &count_below_scalar,
  };
  return backend;
}

}  // namespace zcsk::kern
