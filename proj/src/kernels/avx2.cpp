// AVX2+FMA kernels. Compiled with -mavx2 -mfma; only called after the
// dispatcher has confirmed CPU support.

#include <immintrin.h>

#include <algorithm>
#include <cstdint>
#include <limits>

#include "avx2_math.hpp"
#include "cellqos/kernels.hpp"

namespace cellqos::kernels::avx2 {

namespace {

using namespace avx2_math;

inline __m256i rotl(__m256i x, int k) {
  return _mm256_or_si256(_mm256_slli_epi64(x, k), _mm256_srli_epi64(x, 64 - k));
}

// One xoshiro256++ step of all four lanes, state kept in registers.
struct LaneState {
  __m256i s0, s1, s2, s3;

  explicit LaneState(const LaneRng& rng)
      : s0(_mm256_load_si256(reinterpret_cast<const __m256i*>(rng.state[0]))),
        s1(_mm256_load_si256(reinterpret_cast<const __m256i*>(rng.state[1]))),
        s2(_mm256_load_si256(reinterpret_cast<const __m256i*>(rng.state[2]))),
        s3(_mm256_load_si256(reinterpret_cast<const __m256i*>(rng.state[3]))) {}

  void store(LaneRng& rng) const {
    _mm256_store_si256(reinterpret_cast<__m256i*>(rng.state[0]), s0);
    _mm256_store_si256(reinterpret_cast<__m256i*>(rng.state[1]), s1);
    _mm256_store_si256(reinterpret_cast<__m256i*>(rng.state[2]), s2);
    _mm256_store_si256(reinterpret_cast<__m256i*>(rng.state[3]), s3);
  }

  __m256i next() {
    const __m256i result = _mm256_add_epi64(rotl(_mm256_add_epi64(s0, s3), 23), s0);
    const __m256i t = _mm256_slli_epi64(s1, 17);
    s2 = _mm256_xor_si256(s2, s0);
    s3 = _mm256_xor_si256(s3, s1);
    s1 = _mm256_xor_si256(s1, s2);
    s0 = _mm256_xor_si256(s0, s3);
    s2 = _mm256_xor_si256(s2, t);
    s3 = rotl(s3, 45);
    return result;
  }
};

inline __m256d to_unit(__m256i bits) {
  const __m256i one_to_two = _mm256_or_si256(_mm256_srli_epi64(bits, 12), _mm256_set1_epi64x(0x3ff0000000000000LL));
  return _mm256_sub_pd(_mm256_castsi256_pd(one_to_two), _mm256_set1_pd(1.0));
}

}  // namespace

void fill_uniform(LaneRng& rng, std::span<double> out) {
  LaneState st(rng);
  const std::size_t n = out.size();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(out.data() + i, to_unit(st.next()));
  if (i < n) {
    alignas(32) double tail[4];
    _mm256_store_pd(tail, to_unit(st.next()));
    std::copy_n(tail, n - i, out.data() + i);
  }
  st.store(rng);
}

void fill_normal(LaneRng& rng, std::span<double> out) {
  LaneState st(rng);
  const std::size_t n = out.size();
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d minus_two = _mm256_set1_pd(-2.0);
  for (std::size_t i = 0; i < n; i += 8) {
    const __m256d u1 = _mm256_sub_pd(one, to_unit(st.next()));
    const __m256d u2 = to_unit(st.next());
    const __m256d radius = _mm256_sqrt_pd(_mm256_mul_pd(minus_two, log_pd(u1)));
    __m256d c, s;
    sincos_turn_pd(u2, c, s);
    const __m256d z0 = _mm256_mul_pd(radius, c);
    const __m256d z1 = _mm256_mul_pd(radius, s);
    if (i + 8 <= n) {
      _mm256_storeu_pd(out.data() + i, z0);
      _mm256_storeu_pd(out.data() + i + 4, z1);
    } else {
      alignas(32) double tail[8];
      _mm256_store_pd(tail, z0);
      _mm256_store_pd(tail + 4, z1);
      std::copy_n(tail, n - i, out.data() + i);
    }
  }
  st.store(rng);
}

GainSummary gain_reduce(const GainInputs& in) {
  const std::size_t n = in.xs.size();
  const bool shadowed = !in.normals.empty();
  const double inf = std::numeric_limits<double>::infinity();

  const __m256d ux = _mm256_set1_pd(in.user_x);
  const __m256d uy = _mm256_set1_pd(in.user_y);
  const __m256d width = _mm256_set1_pd(in.width);
  const __m256d height = _mm256_set1_pd(in.height);
  const __m256d half_beta = _mm256_set1_pd(in.half_beta);
  const __m256d sigma = _mm256_set1_pd(in.sigma);
  const __m256d half_sigma2 = _mm256_set1_pd(0.5 * in.sigma * in.sigma);
  const __m256d min_sq = _mm256_set1_pd(in.min_sq_dist);

  __m256d sum = _mm256_setzero_pd();
  __m256d max_g = _mm256_set1_pd(-1.0);
  __m256d max_idx = _mm256_setzero_pd();
  __m256d near_d2 = _mm256_set1_pd(inf);
  __m256d near_idx = _mm256_setzero_pd();
  __m256d near_g = _mm256_setzero_pd();
  __m256d idx = _mm256_setr_pd(0.0, 1.0, 2.0, 3.0);
  const __m256d step = _mm256_set1_pd(4.0);

  auto body = [&](__m256d x, __m256d y, __m256d z, __m256d valid) {
    __m256d dx = abs_pd(_mm256_sub_pd(x, ux));
    dx = _mm256_min_pd(dx, _mm256_sub_pd(width, dx));
    __m256d dy = abs_pd(_mm256_sub_pd(y, uy));
    dy = _mm256_min_pd(dy, _mm256_sub_pd(height, dy));
    __m256d d2 = _mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy));
    const __m256d t = _mm256_mul_pd(half_beta, log_pd(_mm256_max_pd(d2, min_sq)));
    const __m256d e = shadowed ? _mm256_sub_pd(_mm256_sub_pd(_mm256_mul_pd(sigma, z), half_sigma2), t)
                               : _mm256_sub_pd(_mm256_setzero_pd(), t);
    __m256d g = exp_pd(e);
    g = _mm256_and_pd(g, valid);
    d2 = _mm256_blendv_pd(_mm256_set1_pd(inf), d2, valid);
    sum = _mm256_add_pd(sum, g);
    const __m256d g_cmp = _mm256_blendv_pd(_mm256_set1_pd(-inf), g, valid);
    const __m256d gt = _mm256_cmp_pd(g_cmp, max_g, _CMP_GT_OQ);
    max_g = _mm256_blendv_pd(max_g, g_cmp, gt);
    max_idx = _mm256_blendv_pd(max_idx, idx, gt);
    const __m256d lt = _mm256_cmp_pd(d2, near_d2, _CMP_LT_OQ);
    near_d2 = _mm256_blendv_pd(near_d2, d2, lt);
    near_idx = _mm256_blendv_pd(near_idx, idx, lt);
    near_g = _mm256_blendv_pd(near_g, g, lt);
    idx = _mm256_add_pd(idx, step);
  };

  const __m256d all = _mm256_castsi256_pd(_mm256_set1_epi64x(-1));
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d z = shadowed ? _mm256_loadu_pd(in.normals.data() + i) : _mm256_setzero_pd();
    body(_mm256_loadu_pd(in.xs.data() + i), _mm256_loadu_pd(in.ys.data() + i), z, all);
  }
  if (i < n) {
    alignas(32) double bx[4] = {in.user_x, in.user_x, in.user_x, in.user_x};
    alignas(32) double by[4] = {in.user_y, in.user_y, in.user_y, in.user_y};
    alignas(32) double bz[4] = {0.0, 0.0, 0.0, 0.0};
    alignas(32) std::int64_t mask[4] = {0, 0, 0, 0};
    for (std::size_t k = 0; i + k < n; ++k) {
      bx[k] = in.xs[i + k];
      by[k] = in.ys[i + k];
      if (shadowed) bz[k] = in.normals[i + k];
      mask[k] = -1;
    }
    body(_mm256_load_pd(bx), _mm256_load_pd(by), _mm256_load_pd(bz),
         _mm256_castsi256_pd(_mm256_load_si256(reinterpret_cast<const __m256i*>(mask))));
  }

  alignas(32) double l_sum[4], l_max[4], l_max_idx[4], l_d2[4], l_near_idx[4], l_near_g[4];
  _mm256_store_pd(l_sum, sum);
  _mm256_store_pd(l_max, max_g);
  _mm256_store_pd(l_max_idx, max_idx);
  _mm256_store_pd(l_d2, near_d2);
  _mm256_store_pd(l_near_idx, near_idx);
  _mm256_store_pd(l_near_g, near_g);

  GainSummary s;
  s.sum = (l_sum[0] + l_sum[1]) + (l_sum[2] + l_sum[3]);
  s.max_gain = -1.0;
  s.nearest_sq_dist = inf;
  double best_max_idx = 0.0;
  double best_near_idx = 0.0;
  for (int k = 0; k < 4; ++k) {
    if (l_max[k] > s.max_gain || (l_max[k] == s.max_gain && l_max_idx[k] < best_max_idx)) {
      s.max_gain = l_max[k];
      best_max_idx = l_max_idx[k];
    }
    if (l_d2[k] < s.nearest_sq_dist || (l_d2[k] == s.nearest_sq_dist && l_near_idx[k] < best_near_idx)) {
      s.nearest_sq_dist = l_d2[k];
      best_near_idx = l_near_idx[k];
      s.nearest_gain = l_near_g[k];
    }
  }
  s.argmax = static_cast<std::size_t>(best_max_idx);
  s.nearest = static_cast<std::size_t>(best_near_idx);
  return s;
}

void exp_array(std::span<const double> in, std::span<double> out) {
  std::size_t i = 0;
  for (; i + 4 <= in.size(); i += 4) _mm256_storeu_pd(out.data() + i, exp_pd(_mm256_loadu_pd(in.data() + i)));
  if (i < in.size()) {
    alignas(32) double buf[4] = {0.0, 0.0, 0.0, 0.0};
    std::copy(in.begin() + static_cast<std::ptrdiff_t>(i), in.end(), buf);
    _mm256_store_pd(buf, exp_pd(_mm256_load_pd(buf)));
    std::copy_n(buf, in.size() - i, out.data() + i);
  }
}

void log_array(std::span<const double> in, std::span<double> out) {
  std::size_t i = 0;
  for (; i + 4 <= in.size(); i += 4) _mm256_storeu_pd(out.data() + i, log_pd(_mm256_loadu_pd(in.data() + i)));
  if (i < in.size()) {
    alignas(32) double buf[4] = {1.0, 1.0, 1.0, 1.0};
    std::copy(in.begin() + static_cast<std::ptrdiff_t>(i), in.end(), buf);
    _mm256_store_pd(buf, log_pd(_mm256_load_pd(buf)));
    std::copy_n(buf, in.size() - i, out.data() + i);
  }
}

}  // namespace cellqos::kernels::avx2
