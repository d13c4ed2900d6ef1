#pragma once

#include <cstdint>

namespace zcsk::rng {

/// SplitMix64 finalizer: a high-quality 64-bit mixing function.
/// Used both to expand seeds and to derive independent stream seeds.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ULL;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return z;
}

/// SplitMix64 sequence generator; used only to seed Xoshiro256pp state.
struct SplitMix64 {
  std::uint64_t state;

  constexpr std::uint64_t next() noexcept {
    state += 0x9E3779B97F4A7C15ULL;
    return mix64(state);
  }
};

/// xoshiro256++ — fast, high-quality 64-bit PRNG with 2^256-1 period.
/// Each simulation stream owns one instance; instances never share state.
class Xoshiro256pp {
 public:
  explicit constexpr Xoshiro256pp(std::uint64_t seed) noexcept {
    SplitMix64 sm{seed};
    for (auto& word : s_) word = sm.next();
    // The all-zero state is the one invalid state; SplitMix64 expansion
    // cannot realistically produce it, but guard anyway.
    if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 0x9E3779B97F4A7C15ULL;
  }

  constexpr std::uint64_t next() noexcept {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  /// Fill a buffer with raw 64-bit words.
  constexpr void fill(std::uint64_t* out, std::size_t count) noexcept {
    for (std::size_t i = 0; i < count; ++i) out[i] = next();
  }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t s_[4];
};

/// What a derived stream is for. Keeping purposes distinct guarantees that
/// e.g. the symbol stream and the per-slot emission streams never overlap.
enum class StreamPurpose : std::uint64_t {
  symbols = 1,   // per-trial Bernoulli symbol draws
  emission = 2,  // per-(trial, slot) hit times and inhibition thinning
};

/// Deterministically derive an independent stream seed from the master seed,
/// the trial index, the slot index, and the stream purpose. This fixed
/// splitting scheme is the reproducibility contract: results depend only on
/// (master_seed, trial, slot, purpose), never on execution order.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t trial,
                                    std::uint64_t slot,
                                    StreamPurpose purpose) noexcept {
  std::uint64_t h = mix64(master + 0x9E3779B97F4A7C15ULL);
  h = mix64(h ^ (trial + 0xBF58476D1CE4E5B9ULL));
  h = mix64(h ^ (slot + 0x94D049BB133111EBULL));
  h = mix64(h ^ (static_cast<std::uint64_t>(purpose) + 0xD6E8FEB86659FD93ULL));
  return h;
}

/// Map a raw 64-bit word to a double in (0, 1]: 52-bit granularity, never 0.
/// Safe as a log() argument.
constexpr double u01_open_closed(std::uint64_t bits) noexcept {
  return (static_cast<double>(bits >> 12) + 1.0) * 0x1p-52;
}

/// Map a raw 64-bit word to a double in [0, 1): 52-bit granularity, never 1.
constexpr double u01_closed_open(std::uint64_t bits) noexcept {
  return static_cast<double>(bits >> 12) * 0x1p-52;
}

}  // namespace zcsk::rng
