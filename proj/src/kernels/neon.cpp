// AArch64 variant; NEON is baseline there so no runtime probe is needed.

#include <arm_neon.h>

#include "a51/kernels.hpp"

namespace a51::kernels::detail {
namespace {

inline uint32x4_t srl(uint32x4_t x, unsigned count) {
  return vshlq_u32(x, vdupq_n_s32(-static_cast<int>(count)));
}

inline uint32x4_t parity32(uint32x4_t x) {
  x = veorq_u32(x, vshrq_n_u32(x, 16));
  x = veorq_u32(x, vshrq_n_u32(x, 8));
  x = veorq_u32(x, vshrq_n_u32(x, 4));
  x = veorq_u32(x, vshrq_n_u32(x, 2));
  x = veorq_u32(x, vshrq_n_u32(x, 1));
  return vandq_u32(x, vdupq_n_u32(1));
}

struct Lanes {
  uint32x4_t mask[3];
  uint32x4_t taps[3];
  unsigned cb[3];
  unsigned msb[3];
};

inline uint32x4_t output(const Lanes& p, const uint32x4_t r[3]) {
  uint32x4_t o = veorq_u32(srl(r[0], p.msb[0]), srl(r[1], p.msb[1]));
  return vandq_u32(veorq_u32(o, srl(r[2], p.msb[2])), vdupq_n_u32(1));
}

inline void clock(const Lanes& p, uint32x4_t r[3]) {
  const uint32x4_t one = vdupq_n_u32(1);
  uint32x4_t c[3];
  for (int i = 0; i < 3; ++i) c[i] = vandq_u32(srl(r[i], p.cb[i]), one);
  const uint32x4_t maj = vorrq_u32(vorrq_u32(vandq_u32(c[0], c[1]), vandq_u32(c[0], c[2])),
                                   vandq_u32(c[1], c[2]));
  for (int i = 0; i < 3; ++i) {
    const uint32x4_t go = vceqq_u32(c[i], maj);
    const uint32x4_t fb = parity32(vandq_u32(r[i], p.taps[i]));
    const uint32x4_t next = vandq_u32(vorrq_u32(vshlq_n_u32(r[i], 1), fb), p.mask[i]);
    r[i] = vbslq_u32(go, next, r[i]);
  }
}

}  // namespace

void match_neon(const CipherSpec& spec, std::span<const CipherState> states, const Keystream& ks,
                Alignment alignment, std::span<std::uint8_t> matched) {
  Lanes p;
  for (int i = 0; i < 3; ++i) {
    p.mask[i] = vdupq_n_u32(spec.mask(i));
    p.taps[i] = vdupq_n_u32(spec.tap_mask(i));
    p.cb[i] = spec.clock_bit(i);
    p.msb[i] = spec.msb(i);
  }
  const std::size_t nbits = ks.size();
  const std::size_t n = states.size();
  std::size_t base = 0;
  for (; base + 4 <= n; base += 4) {
    std::uint32_t lanes[3][4];
    for (int j = 0; j < 4; ++j) {
      lanes[0][j] = states[base + j].r1;
      lanes[1][j] = states[base + j].r2;
      lanes[2][j] = states[base + j].r3;
    }
    uint32x4_t r[3] = {vld1q_u32(lanes[0]), vld1q_u32(lanes[1]), vld1q_u32(lanes[2])};

    uint32x4_t alive = vdupq_n_u32(~0u);
    std::size_t k = 0;
    if (alignment == Alignment::first_output && nbits > 0) {
      alive = vceqq_u32(output(p, r), vdupq_n_u32(ks[0]));
      k = 1;
    }
    for (; k < nbits; ++k) {
      if (vmaxvq_u32(alive) == 0) break;
      clock(p, r);
      alive = vandq_u32(alive, vceqq_u32(output(p, r), vdupq_n_u32(ks[k])));
    }
    std::uint32_t out[4];
    vst1q_u32(out, alive);
    for (int j = 0; j < 4; ++j) matched[base + j] = out[j] != 0;
  }
  if (base < n)
    match_scalar(spec, states.subspan(base), ks, alignment, matched.subspan(base));
}

}  // namespace a51::kernels::detail
