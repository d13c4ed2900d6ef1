#pragma once

// Per-element reference implementations of the batch kernels. Both the
// scalar backend (whole arrays) and the AVX2 backend (ragged tails) run
// exactly this code, and the AVX2 vector bodies mirror it operation for
// operation — same fma placement, same exactly-rounded mul/div/sqrt, same
// comparison predicates — so every backend produces bit-identical output.
// Keep the operation order in this file and in avx2.cpp in lockstep.
//
// This translation unit must be compiled with -ffp-contract=off: a compiler
// that contracts a*b+c into fma(a,b,c) behind our back would break the
// cross-backend bit-identity contract exactly where we did NOT place an fma.

#include <cmath>
#include <cstdint>

#include "zcsk/rng.hpp"

namespace zcsk::kern::detail {

// --- shared polynomial/constant data -------------------------------------
// ln(2) split into a 33-bit head (exact when multiplied by a small integer)
// plus tail; classic libm decomposition.
inline constexpr double kLn2Hi = 6.93147180369123816490e-01;
inline constexpr double kLn2Lo = 1.90821492927058770002e-10;
inline constexpr double kSqrt2 = 1.41421356237309504880;
inline constexpr double kSqrtHalf = 0.70710678118654752440;
inline constexpr double kHalfPi = 1.57079632679489661923;

// atanh Taylor coefficients 1/3, 1/5, ..., 1/17; with the argument reduced
// to m in [sqrt(1/2), sqrt(2)), s = (m-1)/(m+1) satisfies s^2 < 0.03 and the
// truncation error is ~1e-16 relative.
inline constexpr double kAtanh[8] = {
    1.0 / 3.0,  1.0 / 5.0,  1.0 / 7.0,  1.0 / 9.0,
    1.0 / 11.0, 1.0 / 13.0, 1.0 / 15.0, 1.0 / 17.0,
};

// Minimax kernels for sin/cos on [-pi/4, pi/4] (classic libm coefficients).
inline constexpr double kSin[6] = {
    -1.66666666666666324348e-01, 8.33333333332248946124e-03,
    -1.98412698298579493134e-04, 2.75573137070700676789e-06,
    -2.50507602534068634195e-08, 1.58969099521155010221e-10,
};
inline constexpr double kCos[6] = {
    4.16666666666666019037e-02,  -1.38888888888741095749e-03,
    2.48015872894767294178e-05,  -2.75573143513906633035e-07,
    2.08757232129817482790e-09,  -1.13596475577881948265e-11,
};

// --- element ops ----------------------------------------------------------

/// Natural log of a positive normal double (no zero/denormal/inf handling:
/// inputs here are uniforms in [2^-52, 1]).
inline double log_core(double x) {
  const std::uint64_t bits = __builtin_bit_cast(std::uint64_t, x);
  double e = static_cast<double>(bits >> 52);  // biased exponent, exact
  e = e - 1023.0;
  const std::uint64_t mant_bits =
      (bits & 0x000FFFFFFFFFFFFFULL) | 0x3FF0000000000000ULL;
  double m = __builtin_bit_cast(double, mant_bits);  // m in [1, 2)
  if (m >= kSqrt2) {                                 // recenter to [~0.707, ~1.414)
    m = m * 0.5;
    e = e + 1.0;
  }
  const double s = (m - 1.0) / (m + 1.0);  // ln(m) = 2 atanh(s)
  const double s2 = s * s;
  double q = kAtanh[7];
  q = std::fma(s2, q, kAtanh[6]);
  q = std::fma(s2, q, kAtanh[5]);
  q = std::fma(s2, q, kAtanh[4]);
  q = std::fma(s2, q, kAtanh[3]);
  q = std::fma(s2, q, kAtanh[2]);
  q = std::fma(s2, q, kAtanh[1]);
  q = std::fma(s2, q, kAtanh[0]);
  const double s3 = s * s2;
  const double atanh_s = std::fma(s3, q, s);
  const double ln_m = atanh_s + atanh_s;
  const double hi = std::fma(e, kLn2Hi, ln_m);
  return std::fma(e, kLn2Lo, hi);
}

/// sin and cos of t in [-pi/4, pi/4].
inline void sincos_core(double t, double& sin_t, double& cos_t) {
  const double t2 = t * t;
  double ps = kSin[5];
  ps = std::fma(t2, ps, kSin[4]);
  ps = std::fma(t2, ps, kSin[3]);
  ps = std::fma(t2, ps, kSin[2]);
  ps = std::fma(t2, ps, kSin[1]);
  ps = std::fma(t2, ps, kSin[0]);
  const double t3 = t * t2;
  sin_t = std::fma(t3, ps, t);

  double pc = kCos[5];
  pc = std::fma(t2, pc, kCos[4]);
  pc = std::fma(t2, pc, kCos[3]);
  pc = std::fma(t2, pc, kCos[2]);
  pc = std::fma(t2, pc, kCos[1]);
  pc = std::fma(t2, pc, kCos[0]);
  const double t4 = t2 * t2;
  const double w = 1.0 - 0.5 * t2;
  cos_t = std::fma(t4, pc, w);
}

struct NormalPair {
  double z0, z1;
};

/// Box–Muller: two RNG words -> two standard normals.
///   r = sqrt(-2 ln u1), theta = 2 pi u2;  z = r (cos theta, sin theta).
/// theta is decomposed as quadrant k = floor(4 u2) plus a residual angle in
/// [-pi/4, pi/4), evaluated via the sin/cos kernels and rotated back.
/// w0 = 2^64 - 4096 (u1 = 1) gives r = 0 hence z0 = z1 = 0.
inline NormalPair bm_pair(std::uint64_t w0, std::uint64_t w1) {
  const double x1 = static_cast<double>(w0 >> 12);
  const double u1 = (x1 + 1.0) * 0x1p-52;  // (0, 1]
  const double x2 = static_cast<double>(w1 >> 12);
  const double u2 = x2 * 0x1p-52;  // [0, 1)

  const double r = std::sqrt(-2.0 * log_core(u1));

  const double a = 4.0 * u2;          // quadrant-scaled angle in [0, 4)
  const double k = std::floor(a);     // quadrant index 0..3
  const double f = a - k;             // position within quadrant, [0, 1)
  const double t = (f - 0.5) * kHalfPi;  // residual angle in [-pi/4, pi/4)
  double st, ct;
  sincos_core(t, st, ct);
  // phi = t + pi/4: rotate by the half-quadrant offset...
  const double sin_phi = (st + ct) * kSqrtHalf;
  const double cos_phi = (ct - st) * kSqrtHalf;
  // ...then by k whole quadrants (exact sign/swap shuffles).
  double c, s;
  switch (static_cast<int>(k)) {
    case 0: c = cos_phi; s = sin_phi; break;
    case 1: c = -sin_phi; s = cos_phi; break;
    case 2: c = -cos_phi; s = -sin_phi; break;
    default: c = sin_phi; s = -cos_phi; break;
  }
  return
      NormalPair{r * c, r * s};
}

/// Levy first-passage transform: t = scale / z^2 (z = 0 -> +inf).
inline double levy_core(double z, double scale) {
  const double z2 = z * z;
  return scale / z2;
}

/// Window predicate shared by all count_in_window backends: lo < t <= hi.
inline bool in_window(double t, double lo, double hi) {
  return t > lo && t <= hi;
}

/// Bernoulli predicate shared by all count_below backends.
inline bool below(std::uint64_t word, double p) {
  const double x = static_cast<double>(word >> 12);
  const double u = x * 0x1p-52;  // [0, 1)
  return u < p;
}

}  // namespace zcsk::kern::detail
