#include <immintrin.h>

#include <cstdint>

#include "cascade/dynamics.hpp"
#include "cascade/rng.hpp"
#include "engine.hpp"

// Four trials per pass in lockstep; branching becomes masking. Every lane
// reproduces the exact per-trial stream and float operation order of the
// scalar kernel, so counters are bit-identical between the two.

namespace cascade::engine {

namespace {

inline __m256i rotl64(__m256i x, int k) {
  return _mm256_or_si256(_mm256_slli_epi64(x, k), _mm256_srli_epi64(x, 64 - k));
}

struct Xoshiro4 {
  __m256i s0, s1, s2, s3;

  void seed(uint64_t seed0, uint64_t seed1, uint64_t seed2, uint64_t seed3) {
    alignas(32) uint64_t lane[4][4];
    const uint64_t seeds[4] = {seed0, seed1, seed2, seed3};
    for (int l = 0; l < 4; ++l) {
      SplitMix64 sm(seeds[l]);
      for (int w = 0; w < 4; ++w) lane[w][l] = sm.next();
    }
    s0 = _mm256_load_si256(reinterpret_cast<const __m256i*>(lane[0]));
    s1 = _mm256_load_si256(reinterpret_cast<const __m256i*>(lane[1]));
    s2 = _mm256_load_si256(reinterpret_cast<const __m256i*>(lane[2]));
    s3 = _mm256_load_si256(reinterpret_cast<const __m256i*>(lane[3]));
  }

  __m256i next() {
    const __m256i result =
        _mm256_add_epi64(rotl64(_mm256_add_epi64(s0, s3), 23), s0);
    const __m256i t = _mm256_slli_epi64(s1, 17);
    s2 = _mm256_xor_si256(s2, s0);
    s3 = _mm256_xor_si256(s3, s1);
    s1 = _mm256_xor_si256(s1, s2);
    s0 = _mm256_xor_si256(s0, s3);
    s2 = _mm256_xor_si256(s2, t);
    s3 = rotl64(s3, 45);
    return result;
  }
};

// u < threshold, unsigned 64-bit lanes.
inline __m256i cmplt_u64(__m256i u, __m256i threshold) {
  const __m256i flip = _mm256_set1_epi64x(static_cast<int64_t>(1ULL << 63));
  return _mm256_cmpgt_epi64(_mm256_xor_si256(threshold, flip),
                            _mm256_xor_si256(u, flip));
}

// int64 lanes -> double lanes; values fit in int32 (|k| <= horizon < 2^31).
inline __m256d cvt_i64_pd(__m256i k) {
  const __m256i idx = _mm256_setr_epi32(0, 2, 4, 6, 0, 0, 0, 0);
  const __m128i low32 = _mm256_castsi256_si128(_mm256_permutevar8x32_epi32(k, idx));
  return _mm256_cvtepi32_pd(low32);
}

inline uint64_t hsum_u64(__m256i v) {
  alignas(32) uint64_t lane[4];
  _mm256_store_si256(reinterpret_cast<__m256i*>(lane), v);
  return lane[0] + lane[1] + lane[2] + lane[3];
}

}  // namespace

void run_trials_avx2(const Job& job, Counters& out) {
  const StepTables& tb = *job.tables;
  const uint64_t horizon = tb.horizon();
  const __m256d band = _mm256_set1_pd(tb.log_gamma);
  const __m256d band_tol = _mm256_set1_pd(tb.log_gamma + kTieTolerance);
  const __m256d neg_band_tol = _mm256_set1_pd(-(tb.log_gamma + kTieTolerance));
  const __m256d tol = _mm256_set1_pd(kTieTolerance);
  const __m256d abs_mask = _mm256_castsi256_pd(
      _mm256_set1_epi64x(static_cast<int64_t>(0x7FFFFFFFFFFFFFFFULL)));
  const __m256i one64 = _mm256_set1_epi64x(1);
  const __m256i minus_one = _mm256_set1_epi64x(-1);
  const __m256i plus_one_bound = _mm256_set1_epi64x(1);
  const __m256i sig_thr = _mm256_set1_epi64x(
      static_cast<int64_t>(tb.signal_threshold));
  const bool sig_always = tb.signal_threshold == UINT64_MAX;

  uint64_t trial = job.trial_begin;
  for (; trial + 4 <= job.trial_end; trial += 4) {
    Xoshiro4 rng;
    rng.seed(trial_seed(job.master_seed, trial),
             trial_seed(job.master_seed, trial + 1),
             trial_seed(job.master_seed, trial + 2),
             trial_seed(job.master_seed, trial + 3));
    (void)rng.next();  // theta draw

    __m256i k = _mm256_setzero_si256();
    __m256d c = _mm256_setzero_pd();
    __m256i te = _mm256_setzero_si256();
    uint32_t next_ckpt = 0;

    for (uint64_t t = 1; t <= horizon; ++t) {
      const __m256i u_rev = rng.next();
      const __m256i u_sig = rng.next();

      const uint64_t thr = tb.rev_threshold[t - 1];
      const __m256i rev =
          thr == UINT64_MAX
              ? minus_one
              : cmplt_u64(u_rev, _mm256_set1_epi64x(static_cast<int64_t>(thr)));
      const __m256i sig = sig_always ? minus_one : cmplt_u64(u_sig, sig_thr);

      // Regime masks: integer k test when |c| < tol, float band test otherwise.
      const __m256d abs_c = _mm256_and_pd(c, abs_mask);
      const __m256d small_c = _mm256_cmp_pd(abs_c, tol, _CMP_LT_OQ);
      const __m256i low_i = _mm256_cmpgt_epi64(minus_one, k);
      const __m256i high_i = _mm256_cmpgt_epi64(k, plus_one_bound);
      const __m256d x = _mm256_add_pd(_mm256_mul_pd(cvt_i64_pd(k), band), c);
      const __m256d low_f = _mm256_cmp_pd(x, neg_band_tol, _CMP_LT_OQ);
      const __m256d high_f = _mm256_cmp_pd(x, band_tol, _CMP_GT_OQ);
      const __m256i low = _mm256_castpd_si256(
          _mm256_blendv_pd(low_f, _mm256_castsi256_pd(low_i), small_c));
      const __m256i high = _mm256_castpd_si256(
          _mm256_blendv_pd(high_f, _mm256_castsi256_pd(high_i), small_c));
      const __m256i mid =
          _mm256_xor_si256(_mm256_or_si256(low, high), minus_one);

      // Rational decision correctness: High -> true, Low -> false, Mid -> sig.
      const __m256i rat = _mm256_or_si256(high, _mm256_and_si256(mid, sig));
      const __m256i zc = _mm256_castpd_si256(_mm256_blendv_pd(
          _mm256_castsi256_pd(rat), _mm256_castsi256_pd(sig),
          _mm256_castsi256_pd(rev)));
      const __m256i err = _mm256_xor_si256(zc, minus_one);
      te = _mm256_sub_epi64(te, err);  // err lanes are -1

      const int err_bits = _mm256_movemask_pd(_mm256_castsi256_pd(err));
      if (next_ckpt < job.n_checkpoints && t == job.checkpoints[next_ckpt]) {
        out.ckpt_err[next_ckpt] +=
            static_cast<uint64_t>(__builtin_popcount(err_bits));
        out.ckpt_te[next_ckpt] += hsum_u64(te);
        if (job.mask_out) {
          for (int l = 0; l < 4; ++l) {
            if (err_bits & (1 << l))
              job.mask_out[(trial + l) * job.mask_words + (next_ckpt >> 6)] |=
                  1ULL << (next_ckpt & 63);
          }
        }
        ++next_ckpt;
      }
      if (job.record_per_step)
        out.step_err[t - 1] += static_cast<uint64_t>(__builtin_popcount(err_bits));

      // State update; each lane applies at most one of the four branches.
      const __m256i dk_plus =
          _mm256_andnot_si256(high, zc);  // (Mid|Low) & correct
      const __m256i dk_minus = _mm256_andnot_si256(
          low, _mm256_xor_si256(zc, minus_one));  // (Mid|High) & wrong
      k = _mm256_add_epi64(k, _mm256_and_si256(dk_plus, one64));
      k = _mm256_sub_epi64(k, _mm256_and_si256(dk_minus, one64));

      const __m256d corr = _mm256_set1_pd(tb.corr_high[t - 1]);
      const __m256d dc_plus = _mm256_and_pd(
          corr, _mm256_castsi256_pd(_mm256_and_si256(high, zc)));
      const __m256d dc_minus = _mm256_and_pd(
          corr, _mm256_castsi256_pd(
                    _mm256_and_si256(low, _mm256_xor_si256(zc, minus_one))));
      c = _mm256_add_pd(c, dc_plus);
      c = _mm256_sub_pd(c, dc_minus);
    }

    alignas(32) uint64_t te_lane[4];
    _mm256_store_si256(reinterpret_cast<__m256i*>(te_lane), te);
    for (int l = 0; l < 4; ++l) {
      out.te_sum += te_lane[l];
      out.te_sumsq += te_lane[l] * te_lane[l];
    }
  }

  if (trial < job.trial_end) {
    Job tail = job;
    tail.trial_begin = trial;
    run_trials_scalar(tail, out);
  }
}

}  // namespace cascade::engine
