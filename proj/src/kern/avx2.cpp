// AVX2+FMA backend. Compiled with -mavx2 -mfma (x86-64 builds only; the
// dispatcher checks CPU support at runtime before handing it out).
//
// Every vector body mirrors the scalar_core reference operation for
// operation: identical fma placement, identical exactly-rounded
// mul/div/sqrt, identical comparison predicates, and exact sign-flip /
// select steps. That is what makes backend output bit-identical — verified
// by the kernel equivalence tests. Edit in lockstep with scalar_core.hpp.

#ifdef __AVX2__

#include <immintrin.h>

#include <cstddef>
#include <cstdint>

#include "zcsk/kern/kernels.hpp"
#include "scalar_core.hpp"

namespace zcsk::kern {
namespace {

using detail::kAtanh;
using detail::kCos;
using detail::kSin;

// Exact int -> double for values < 2^52 (the classic or/sub exponent trick).
inline __m256d u52_to_double(__m256i x) {
  const __m256i magic_i = _mm256_set1_epi64x(0x4330000000000000LL);
  const __m256d magic_d = _mm256_set1_pd(0x1p52);
  return _mm256_sub_pd(_mm256_castsi256_pd(_mm256_or_si256(x, magic_i)),
                       magic_d);
}

// Mirrors detail::log_core on four positive normal doubles.
inline __m256d log_vec(__m256d x) {
  const __m256i bits = _mm256_castpd_si256(x);
  __m256d e = u52_to_double(_mm256_srli_epi64(bits, 52));
  e = _mm256_sub_pd(e, _mm256_set1_pd(1023.0));
  const __m256i mant_bits = _mm256_or_si256(
      _mm256_and_si256(bits, _mm256_set1_epi64x(0x000FFFFFFFFFFFFFLL)),
      _mm256_set1_epi64x(0x3FF0000000000000LL));
  __m256d m = _mm256_castsi256_pd(mant_bits);
  const __m256d ge = _mm256_cmp_pd(m, _mm256_set1_pd(detail::kSqrt2),
                                   _CMP_GE_OQ);
  m = _mm256_blendv_pd(m, _mm256_mul_pd(m, _mm256_set1_pd(0.5)), ge);
  e = _mm256_add_pd(e, _mm256_and_pd(ge, _mm256_set1_pd(1.0)));

  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d s =
      _mm256_div_pd(_mm256_sub_pd(m, one), _mm256_add_pd(m, one));
  const __m256d s2 = _mm256_mul_pd(s, s);
  __m256d q = _mm256_set1_pd(kAtanh[7]);
  q = _mm256_fmadd_pd(s2, q, _mm256_set1_pd(kAtanh[6]));
  q = _mm256_fmadd_pd(s2, q, _mm256_set1_pd(kAtanh[5]));
  q = _mm256_fmadd_pd(s2, q, _mm256_set1_pd(kAtanh[4]));
  q = _mm256_fmadd_pd(s2, q, _mm256_set1_pd(kAtanh[3]));
  q = _mm256_fmadd_pd(s2, q, _mm256_set1_pd(kAtanh[2]));
  q = _mm256_fmadd_pd(s2, q, _mm256_set1_pd(kAtanh[1]));
  q = _mm256_fmadd_pd(s2, q, _mm256_set1_pd(kAtanh[0]));
  const __m256d s3 = _mm256_mul_pd(s, s2);
  const __m256d atanh_s = _mm256_fmadd_pd(s3, q, s);
  const __m256d ln_m = _mm256_add_pd(atanh_s, atanh_s);
  const __m256d hi =
      _mm256_fmadd_pd(e, _mm256_set1_pd(detail::kLn2Hi), ln_m);
  return _mm256_fmadd_pd(e, _mm256_set1_pd(detail::kLn2Lo), hi);
}

// Mirrors detail::sincos_core on four residual angles in [-pi/4, pi/4].
inline void sincos_vec(__m256d t, __m256d& sin_t, __m256d& cos_t) {
  const __m256d t2 = _mm256_mul_pd(t, t);
  __m256d ps = _mm256_set1_pd(kSin[5]);
  ps = _mm256_fmadd_pd(t2, ps, _mm256_set1_pd(kSin[4]));
  ps = _mm256_fmadd_pd(t2, ps, _mm256_set1_pd(kSin[3]));
  ps = _mm256_fmadd_pd(t2, ps, _mm256_set1_pd(kSin[2]));
  ps = _mm256_fmadd_pd(t2, ps, _mm256_set1_pd(kSin[1]));
  ps = _mm256_fmadd_pd(t2, ps, _mm256_set1_pd(kSin[0]));
  const __m256d t3 = _mm256_mul_pd(t, t2);
  sin_t = _mm256_fmadd_pd(t3, ps, t);

  __m256d pc = _mm256_set1_pd(kCos[5]);
  pc = _mm256_fmadd_pd(t2, pc, _mm256_set1_pd(kCos[4]));
  pc = _mm256_fmadd_pd(t2, pc, _mm256_set1_pd(kCos[3]));
  pc = _mm256_fmadd_pd(t2, pc, _mm256_set1_pd(kCos[2]));
  pc = _mm256_fmadd_pd(t2, pc, _mm256_set1_pd(kCos[1]));
  pc = _mm256_fmadd_pd(t2, pc, _mm256_set1_pd(kCos[0]));
  const __m256d t4 = _mm256_mul_pd(t2, t2);
  const __m256d w = _mm256_sub_pd(
      _mm256_set1_pd(1.0), _mm256_mul_pd(_mm256_set1_pd(0.5), t2));
  cos_t = _mm256_fmadd_pd(t4, pc, w);
}

void normal_pairs_avx2(const std::uint64_t* bits, std::size_t nwords,
                       double* out) {
  const __m256d sign_mask = _mm256_set1_pd(-0.0);
  std::size_t i = 0;
  for (; i + 8 <= nwords; i += 8) {
    const __m256i v0 = _mm256_loadu_si256(
        reinterpret_cast<const __m256i*>(bits + i));
    const __m256i v1 = _mm256_loadu_si256(
        reinterpret_cast<const __m256i*>(bits + i + 4));
    // Deinterleave into the u1 words (even positions) and u2 words (odd).
    const __m256i lo = _mm256_unpacklo_epi64(v0, v1);  // b0 b4 | b2 b6
    const __m256i hi = _mm256_unpackhi_epi64(v0, v1);  // b1 b5 | b3 b7
    const __m256i w_even = _mm256_permute4x64_epi64(lo, 0xD8);  // b0 b2 b4 b6
    const __m256i w_odd = _mm256_permute4x64_epi64(hi, 0xD8);   // b1 b3 b5 b7

    const __m256d x1 = u52_to_double(_mm256_srli_epi64(w_even, 12));
    const __m256d u1 = _mm256_mul_pd(
        _mm256_add_pd(x1, _mm256_set1_pd(1.0)), _mm256_set1_pd(0x1p-52));
    const __m256d x2 = u52_to_double(_mm256_srli_epi64(w_odd, 12));
    const __m256d u2 = _mm256_mul_pd(x2, _mm256_set1_pd(0x1p-52));

    const __m256d r = _mm256_sqrt_pd(
        _mm256_mul_pd(_mm256_set1_pd(-2.0), log_vec(u1)));

    const __m256d a = _mm256_mul_pd(_mm256_set1_pd(4.0), u2);
    const __m256d k =
        _mm256_round_pd(a, _MM_FROUND_TO_NEG_INF | _MM_FROUND_NO_EXC);
    const __m256d f = _mm256_sub_pd(a, k);
    const __m256d t = _mm256_mul_pd(_mm256_sub_pd(f, _mm256_set1_pd(0.5)),
                                    _mm256_set1_pd(detail::kHalfPi));
    __m256d st, ct;
    sincos_vec(t, st, ct);
    const __m256d sin_phi = _mm256_mul_pd(
        _mm256_add_pd(st, ct), _mm256_set1_pd(detail::kSqrtHalf));
    const __m256d cos_phi = _mm256_mul_pd(
        _mm256_sub_pd(ct, st), _mm256_set1_pd(detail::kSqrtHalf));
    const __m256d neg_sin_phi = _mm256_xor_pd(sin_phi, sign_mask);
    const __m256d neg_cos_phi = _mm256_xor_pd(cos_phi, sign_mask);

    const __m256d m1 = _mm256_cmp_pd(k, _mm256_set1_pd(1.0), _CMP_EQ_OQ);
    const __m256d m2 = _mm256_cmp_pd(k, _mm256_set1_pd(2.0), _CMP_EQ_OQ);
    const __m256d m3 = _mm256_cmp_pd(k, _mm256_set1_pd(3.0), _CMP_EQ_OQ);
    __m256d c = cos_phi;
    c = _mm256_blendv_pd(c, neg_sin_phi, m1);
    c = _mm256_blendv_pd(c, neg_cos_phi, m2);
    c = _mm256_blendv_pd(c, sin_phi, m3);
    __m256d s = sin_phi;
    s = _mm256_blendv_pd(s, cos_phi, m1);
    s = _mm256_blendv_pd(s, neg_sin_phi, m2);
    s = _mm256_blendv_pd(s, neg_cos_phi, m3);

    const __m256d z0 = _mm256_mul_pd(r, c);
    const __m256d z1 = _mm256_mul_pd(r, s);
    // Interleave back to pair order z0_0 z1_0 z0_1 z1_1 ...
    const __m256d out_lo = _mm256_unpacklo_pd(z0, z1);
    const __m256d out_hi = _mm256_unpackhi_pd(z0, z1);
    _mm256_storeu_pd(out + i, _mm256_permute2f128_pd(out_lo, out_hi, 0x20));
    _mm256_storeu_pd(out + i + 4,
                     _mm256_permute2f128_pd(out_lo, out_hi, 0x31));
  }
  for (; i + 1 < nwords; i += 2) {
    const detail::NormalPair p = detail::bm_pair(bits[i], bits[i + 1]);
    out[i] = p.z0;
    out[i + 1] = p.z1;
  }
}

void levy_avx2(const double* z, std::size_t n, double scale, double* t) {
  const __m256d vscale = _mm256_set1_pd(scale);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vz = _mm256_loadu_pd(z + i);
    const __m256d z2 = _mm256_mul_pd(vz, vz);
    _mm256_storeu_pd(t + i, _mm256_div_pd(vscale, z2));
  }
  for (; i < n; ++i) t[i] = detail::levy_core(z[i], scale);
}

std::size_t count_in_window_avx2(const double* t, std::size_t n, double lo,
                                 double hi) {
  const __m256d vlo = _mm256_set1_pd(lo);
  const __m256d vhi = _mm256_set1_pd(hi);
  std::size_t count = 0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vt = _mm256_loadu_pd(t + i);
    const __m256d m = _mm256_and_pd(_mm256_cmp_pd(vt, vlo, _CMP_GT_OQ),
                                    _mm256_cmp_pd(vt, vhi, _CMP_LE_OQ));
    count += static_cast<unsigned>(
        __builtin_popcount(static_cast<unsigned>(_mm256_movemask_pd(m))));
  }
  for (; i < n; ++i) count += detail::in_window(t[i], lo, hi);
  return count;
}

std::size_t count_below_avx2(const std::uint64_t* bits, std::size_t n,
                             double p) {
  const __m256d vp = _mm256_set1_pd(p);
  const __m256d scale52 = _mm256_set1_pd(0x1p-52);
  std::size_t count = 0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256i w = _mm256_loadu_si256(
        reinterpret_cast<const __m256i*>(bits + i));
    const __m256d x = u52_to_double(_mm256_srli_epi64(w, 12));
    const __m256d u = _mm256_mul_pd(x, scale52);
    const __m256d m = _mm256_cmp_pd(u, vp, _CMP_LT_OQ);
    count += static_cast<unsigned>(
        __builtin_popcount(static_cast<unsigned>(_mm256_movemask_pd(m))));
  }
  for (; i < n; ++i) count += detail::below(bits[i], p);
  return count;
}

}  // namespace

// Looked up by the dispatcher (declared there, defined only in AVX2 builds).
const Backend* avx2_impl() {
  static constexpr Backend backend{
      "avx2",
      &normal_pairs_avx2,
      &levy_avx2,
      &count_in_window_avx2,
      &count_below_avx2,
  };
  return &backend;
}

}  // namespace zcsk::kern

#endif  // __AVX2__
