#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace zcsk::kern {

/// A set of batch kernels for the Monte Carlo hot path. Every backend is
/// required to produce bit-identical doubles and identical counts for
/// identical inputs — SIMD variants mirror the scalar reference operation
/// for operation (same fma placement, same exactly-rounded ops), and the
/// equivalence suite asserts it. Simulation output therefore does not
/// depend on which backend is active.
struct Backend {
  const char* name;

  /// Box–Muller transform: consume `nwords` raw RNG words (nwords even;
  /// words 2i, 2i+1 form one pair) and write `nwords` standard normal
  /// deviates. A pair whose first word maps to u=1 yields z=0 for both
  /// outputs (probability 2^-52 per pair; downstream Lévy transform maps
  /// z=0 to +inf, i.e. "never arrives").
  void (*normal_pairs)(const std::uint64_t* bits, std::size_t nwords,
                       double* out);

  /// Lévy first-passage times from standard normals: t[i] = scale / z[i]^2.
  /// z = 0 maps to +inf.
  void (*levy_from_normal)(const double* z, std::size_t n, double scale,
                           double* t);

  /// Number of entries with lo < t[i] <= hi.
  std::size_t (*count_in_window)(const double* t, std::size_t n, double lo,
                                 double hi);

  /// Number of words whose [0,1) uniform mapping is < p
  /// (Bernoulli(p) success count).
  std::size_t (*count_below)(const std::uint64_t* bits, std::size_t n,
                             double p);
};

/// Portable reference backend; always available.
const Backend& scalar_backend();

/// AVX2+FMA backend, or nullptr when the build or the CPU lacks support.
const Backend* avx2_backend();

/// The backend picked at startup: the best supported one, overridable with
/// environment variable ZCSK_KERNEL=scalar|avx2 (requesting an unavailable
/// backend throws). The choice cannot affect results (see Backend).
const Backend& active_backend();

/// All backends usable on this machine (scalar first).
std::vector<const Backend*> available_backends();

/// Test hook: override the active backend (nullptr restores automatic
/// selection). Not thread-safe; intended for equivalence tests only.
void force_backend(const Backend* backend);

}  // namespace zcsk::kern
