// Compiled with -mavx2; only reached after a runtime CPU check.

#include <immintrin.h>

#include "a51/kernels.hpp"

namespace a51::kernels::detail {
namespace {

inline __m256i srl(__m256i x, unsigned count) {
  return _mm256_srl_epi32(x, _mm_cvtsi32_si128(static_cast<int>(count)));
}

inline __m256i parity32(__m256i x) {
  x = _mm256_xor_si256(x, _mm256_srli_epi32(x, 16));
  x = _mm256_xor_si256(x, _mm256_srli_epi32(x, 8));
  x = _mm256_xor_si256(x, _mm256_srli_epi32(x, 4));
  x = _mm256_xor_si256(x, _mm256_srli_epi32(x, 2));
  x = _mm256_xor_si256(x, _mm256_srli_epi32(x, 1));
  return _mm256_and_si256(x, _mm256_set1_epi32(1));
}

struct Lanes {
  __m256i mask[3];
  __m256i taps[3];
  unsigned cb[3];
  unsigned msb[3];
};

inline __m256i output(const Lanes& p, const __m256i r[3]) {
  __m256i o = _mm256_xor_si256(srl(r[0], p.msb[0]), srl(r[1], p.msb[1]));
  o = _mm256_xor_si256(o, srl(r[2], p.msb[2]));
  return _mm256_and_si256(o, _mm256_set1_epi32(1));
}

inline void clock(const Lanes& p, __m256i r[3]) {
  const __m256i one = _mm256_set1_epi32(1);
  __m256i c[3];
  for (int i = 0; i < 3; ++i) c[i] = _mm256_and_si256(srl(r[i], p.cb[i]), one);
  const __m256i maj = _mm256_or_si256(
      _mm256_or_si256(_mm256_and_si256(c[0], c[1]), _mm256_and_si256(c[0], c[2])),
      _mm256_and_si256(c[1], c[2]));
  for (int i = 0; i < 3; ++i) {
    const __m256i go = _mm256_cmpeq_epi32(c[i], maj);
    const __m256i fb = parity32(_mm256_and_si256(r[i], p.taps[i]));
    const __m256i next =
        _mm256_and_si256(_mm256_or_si256(_mm256_slli_epi32(r[i], 1), fb), p.mask[i]);
    r[i] = _mm256_blendv_epi8(r[i], next, go);
  }
}

}  // namespace

void match_avx2(const CipherSpec& spec, std::span<const CipherState> states, const Keystream& ks,
                Alignment alignment, std::span<std::uint8_t> matched) {
  Lanes p;
  for (int i = 0; i < 3; ++i) {
    p.mask[i] = _mm256_set1_epi32(static_cast<int>(spec.mask(i)));
    p.taps[i] = _mm256_set1_epi32(static_cast<int>(spec.tap_mask(i)));
    p.cb[i] = spec.clock_bit(i);
    p.msb[i] = spec.msb(i);
  }
  const std::size_t nbits = ks.size();
  const std::size_t n = states.size();
  std::size_t base = 0;
  for (; base + 8 <= n; base += 8) {
    alignas(32) std::uint32_t lanes[3][8];
    for (int j = 0; j < 8; ++j) {
      lanes[0][j] = states[base + j].r1;
      lanes[1][j] = states[base + j].r2;
      lanes[2][j] = states[base + j].r3;
    }
    __m256i r[3];
    for (int i = 0; i < 3; ++i) r[i] = _mm256_load_si256(reinterpret_cast<const __m256i*>(lanes[i]));

    __m256i alive = _mm256_set1_epi32(-1);
    std::size_t k = 0;
    if (alignment == Alignment::first_output && nbits > 0) {
      alive = _mm256_cmpeq_epi32(output(p, r), _mm256_set1_epi32(ks[0]));
      k = 1;
    }
    for (; k < nbits; ++k) {
      if (_mm256_testz_si256(alive, alive)) break;
      clock(p, r);
      alive = _mm256_and_si256(alive, _mm256_cmpeq_epi32(output(p, r), _mm256_set1_epi32(ks[k])));
    }
    alignas(32) std::uint32_t out[8];
    _mm256_store_si256(reinterpret_cast<__m256i*>(out), alive);
    for (int j = 0; j < 8; ++j) matched[base + j] = out[j] != 0;
  }
  if (base < n)
    match_scalar(spec, states.subspan(base), ks, alignment, matched.subspan(base));
}

}  // namespace a51::kernels::detail
