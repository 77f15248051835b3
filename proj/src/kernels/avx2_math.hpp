#pragma once

// Packed double exp/log/sincos for AVX2+FMA. Accurate to a few ulp over the
// ranges the simulator uses: exp on [-708, 709], log on positive normals,
// sincos on angles 2*pi*u with u in [0, 1).

#include <immintrin.h>

#include <cstdint>

namespace cellqos::kernels::avx2_math {

inline __m256d abs_pd(__m256d x) {
  return _mm256_andnot_pd(_mm256_set1_pd(-0.0), x);
}

// Integral double in [-2^51, 2^51] to int64 lanes.
inline __m256i round_to_epi64(__m256d n) {
  const __m256d magic = _mm256_set1_pd(6755399441055744.0);  // 2^52 + 2^51
  return _mm256_sub_epi64(_mm256_castpd_si256(_mm256_add_pd(n, magic)), _mm256_castpd_si256(magic));
}

inline __m256d exp_pd(__m256d x) {
  const __m256d hi_limit = _mm256_set1_pd(709.78);
  const __m256d lo_limit = _mm256_set1_pd(-708.39);
  const __m256d overflow = _mm256_cmp_pd(x, hi_limit, _CMP_GT_OQ);
  const __m256d underflow = _mm256_cmp_pd(x, lo_limit, _CMP_LT_OQ);
  x = _mm256_min_pd(_mm256_max_pd(x, lo_limit), hi_limit);

  const __m256d n = _mm256_round_pd(_mm256_mul_pd(x, _mm256_set1_pd(1.4426950408889634)),
                                    _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(n, _mm256_set1_pd(6.93147180369123816490e-01), x);
  r = _mm256_fnmadd_pd(n, _mm256_set1_pd(1.90821492927058770002e-10), r);

  // Taylor series to r^13; |r| <= ln(2)/2 keeps the truncation below 1e-17.
  __m256d p = _mm256_set1_pd(1.0 / 6227020800.0);
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 479001600.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 39916800.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 3628800.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 362880.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 40320.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 5040.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 720.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 120.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 24.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 6.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(0.5));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0));

  // 2^n as 2^n0 * 2^n1 with n0 <= 1000 so that n = 1024 stays representable.
  const __m256d n0d = _mm256_min_pd(n, _mm256_set1_pd(1000.0));
  const __m256d n1d = _mm256_sub_pd(n, n0d);
  const __m256i bias = _mm256_set1_epi64x(1023);
  const __m256d s0 = _mm256_castsi256_pd(_mm256_slli_epi64(_mm256_add_epi64(round_to_epi64(n0d), bias), 52));
  const __m256d s1 = _mm256_castsi256_pd(_mm256_slli_epi64(_mm256_add_epi64(round_to_epi64(n1d), bias), 52));
  __m256d result = _mm256_mul_pd(_mm256_mul_pd(p, s0), s1);

  result = _mm256_blendv_pd(result, _mm256_set1_pd(__builtin_inf()), overflow);
  result = _mm256_blendv_pd(result, _mm256_setzero_pd(), underflow);
  return result;
}

inline __m256d log_pd(__m256d x) {
  const __m256i bits = _mm256_castpd_si256(x);
  const __m256i exp_bits = _mm256_srli_epi64(bits, 52);
  const __m256d two52 = _mm256_set1_pd(4503599627370496.0);
  __m256d e = _mm256_sub_pd(_mm256_castsi256_pd(_mm256_or_si256(exp_bits, _mm256_castpd_si256(two52))), two52);
  e = _mm256_sub_pd(e, _mm256_set1_pd(1023.0));
  __m256d m = _mm256_castsi256_pd(_mm256_or_si256(_mm256_and_si256(bits, _mm256_set1_epi64x(0x000fffffffffffffLL)),
                                                   _mm256_set1_epi64x(0x3ff0000000000000LL)));
  const __m256d big = _mm256_cmp_pd(m, _mm256_set1_pd(1.4142135623730951), _CMP_GT_OQ);
  m = _mm256_blendv_pd(m, _mm256_mul_pd(m, _mm256_set1_pd(0.5)), big);
  e = _mm256_blendv_pd(e, _mm256_add_pd(e, _mm256_set1_pd(1.0)), big);

  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d s = _mm256_div_pd(_mm256_sub_pd(m, one), _mm256_add_pd(m, one));
  const __m256d s2 = _mm256_mul_pd(s, s);
  // log m = 2s (1 + s^2/3 + s^4/5 + ...), |s| <= 0.1716
  __m256d q = _mm256_set1_pd(1.0 / 25.0);
  q = _mm256_fmadd_pd(q, s2, _mm256_set1_pd(1.0 / 23.0));
  q = _mm256_fmadd_pd(q, s2, _mm256_set1_pd(1.0 / 21.0));
  q = _mm256_fmadd_pd(q, s2, _mm256_set1_pd(1.0 / 19.0));
  q = _mm256_fmadd_pd(q, s2, _mm256_set1_pd(1.0 / 17.0));
  q = _mm256_fmadd_pd(q, s2, _mm256_set1_pd(1.0 / 15.0));
  q = _mm256_fmadd_pd(q, s2, _mm256_set1_pd(1.0 / 13.0));
  q = _mm256_fmadd_pd(q, s2, _mm256_set1_pd(1.0 / 11.0));
  q = _mm256_fmadd_pd(q, s2, _mm256_set1_pd(1.0 / 9.0));
  q = _mm256_fmadd_pd(q, s2, _mm256_set1_pd(1.0 / 7.0));
  q = _mm256_fmadd_pd(q, s2, _mm256_set1_pd(1.0 / 5.0));
  q = _mm256_fmadd_pd(q, s2, _mm256_set1_pd(1.0 / 3.0));
  q = _mm256_mul_pd(q, s2);
  const __m256d two_s = _mm256_add_pd(s, s);
  const __m256d log_m = _mm256_fmadd_pd(two_s, q, two_s);

  const __m256d lo = _mm256_fmadd_pd(e, _mm256_set1_pd(1.90821492927058770002e-10), log_m);
  return _mm256_fmadd_pd(e, _mm256_set1_pd(6.93147180369123816490e-01), lo);
}

/// cos(2 pi u) and sin(2 pi u) for u in [0, 1). The quadrant split of 4u is exact.
inline void sincos_turn_pd(__m256d u, __m256d& cos_out, __m256d& sin_out) {
  const __m256d t = _mm256_mul_pd(u, _mm256_set1_pd(4.0));
  const __m256d q = _mm256_round_pd(t, _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  const __m256d x = _mm256_mul_pd(_mm256_sub_pd(t, q), _mm256_set1_pd(1.5707963267948966));
  const __m256d x2 = _mm256_mul_pd(x, x);

  __m256d sp = _mm256_set1_pd(1.0 / 355687428096000.0);  // 1/17!
  sp = _mm256_fmadd_pd(sp, x2, _mm256_set1_pd(-1.0 / 1307674368000.0));
  sp = _mm256_fmadd_pd(sp, x2, _mm256_set1_pd(1.0 / 6227020800.0));
  sp = _mm256_fmadd_pd(sp, x2, _mm256_set1_pd(-1.0 / 39916800.0));
  sp = _mm256_fmadd_pd(sp, x2, _mm256_set1_pd(1.0 / 362880.0));
  sp = _mm256_fmadd_pd(sp, x2, _mm256_set1_pd(-1.0 / 5040.0));
  sp = _mm256_fmadd_pd(sp, x2, _mm256_set1_pd(1.0 / 120.0));
  sp = _mm256_fmadd_pd(sp, x2, _mm256_set1_pd(-1.0 / 6.0));
  sp = _mm256_mul_pd(sp, x2);
  const __m256d s = _mm256_fmadd_pd(sp, x, x);

  __m256d cp = _mm256_set1_pd(1.0 / 20922789888000.0);  // 1/16!
  cp = _mm256_fmadd_pd(cp, x2, _mm256_set1_pd(-1.0 / 87178291200.0));
  cp = _mm256_fmadd_pd(cp, x2, _mm256_set1_pd(1.0 / 479001600.0));
  cp = _mm256_fmadd_pd(cp, x2, _mm256_set1_pd(-1.0 / 3628800.0));
  cp = _mm256_fmadd_pd(cp, x2, _mm256_set1_pd(1.0 / 40320.0));
  cp = _mm256_fmadd_pd(cp, x2, _mm256_set1_pd(-1.0 / 720.0));
  cp = _mm256_fmadd_pd(cp, x2, _mm256_set1_pd(1.0 / 24.0));
  cp = _mm256_fmadd_pd(cp, x2, _mm256_set1_pd(-0.5));
  const __m256d c = _mm256_fmadd_pd(cp, x2, _mm256_set1_pd(1.0));

  // quadrant = q mod 4, q in {0, ..., 4}
  const __m256d four = _mm256_set1_pd(4.0);
  const __m256d quad = _mm256_blendv_pd(q, _mm256_setzero_pd(), _mm256_cmp_pd(q, four, _CMP_EQ_OQ));
  const __m256d odd = _mm256_or_pd(_mm256_cmp_pd(quad, _mm256_set1_pd(1.0), _CMP_EQ_OQ),
                                   _mm256_cmp_pd(quad, _mm256_set1_pd(3.0), _CMP_EQ_OQ));
  const __m256d cos_neg = _mm256_or_pd(_mm256_cmp_pd(quad, _mm256_set1_pd(1.0), _CMP_EQ_OQ),
                                       _mm256_cmp_pd(quad, _mm256_set1_pd(2.0), _CMP_EQ_OQ));
  const __m256d sin_neg = _mm256_cmp_pd(quad, _mm256_set1_pd(2.0), _CMP_GE_OQ);
  const __m256d sign = _mm256_set1_pd(-0.0);
  __m256d co = _mm256_blendv_pd(c, s, odd);
  __m256d si = _mm256_blendv_pd(s, c, odd);
  co = _mm256_xor_pd(co, _mm256_and_pd(cos_neg, sign));
  si = _mm256_xor_pd(si, _mm256_and_pd(sin_neg, sign));
  cos_out = co;
  sin_out = si;
}

}  // namespace cellqos::kernels::avx2_math
