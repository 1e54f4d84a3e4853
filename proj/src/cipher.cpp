#include "a51/cipher.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>
#include <string>

namespace a51 {

Word RegisterSpec::tap_mask() const {
  Word m = 0;
  for (unsigned t : taps) m |= Word{1} << t;
  return m;
}

CipherSpec::CipherSpec(std::array<RegisterSpec, 3> registers) : regs_(std::move(registers)) {
  for (int i = 0; i < 3; ++i) {
    const RegisterSpec& r = regs_[i];
    const std::string name = "R" + std::to_string(i + 1);
    if (r.length < 2 || r.length > kMaxRegisterLength)
      throw std::invalid_argument(name + ": length must be in 2..32");
    if (r.taps.empty()) throw std::invalid_argument(name + ": tap list is empty");
    std::vector<unsigned> sorted = r.taps;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw std::invalid_argument(name + ": duplicate tap");
    if (sorted.back() >= r.length) throw std::invalid_argument(name + ": tap outside register");
    if (r.clock_bit >= r.length) throw std::invalid_argument(name + ": clock bit outside register");
    masks_[i] = r.mask();
    tap_masks_[i] = r.tap_mask();
  }
}

const CipherSpec& CipherSpec::a51() {
  static const CipherSpec spec({
      RegisterSpec{19, {13, 16, 17, 18}, 8},
      RegisterSpec{22, {20, 21}, 10},
      RegisterSpec{23, {7, 20, 21, 22}, 10},
  });
  return spec;
}

bool fits(const CipherSpec& spec, const CipherState& state) {
  for (int i = 0; i < 3; ++i)
    if (state.reg(i) & ~spec.mask(i)) return false;
  return true;
}

Keystream::Keystream(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
  for (auto& b : bits_) b &= 1u;
}

Keystream Keystream::prefix(std::size_t n) const { return slice(0, n); }

Keystream Keystream::slice(std::size_t first, std::size_t n) const {
  if (first > bits_.size()) first = bits_.size();
  n = std::min(n, bits_.size() - first);
  return Keystream(std::vector<std::uint8_t>(bits_.begin() + first, bits_.begin() + first + n));
}

unsigned output_bit(const CipherSpec& spec, const CipherState& s) {
  return ((s.r1 >> spec.msb(0)) ^ (s.r2 >> spec.msb(1)) ^ (s.r3 >> spec.msb(2))) & 1u;
}

Word clock_register(const CipherSpec& spec, int i, Word value) {
  const Word feedback = static_cast<Word>(std::popcount(value & spec.tap_mask(i)) & 1);
  return ((value << 1) | feedback) & spec.mask(i);
}

unsigned clockset(const CipherSpec& spec, const CipherState& s) {
  const unsigned c1 = (s.r1 >> spec.clock_bit(0)) & 1u;
  const unsigned c2 = (s.r2 >> spec.clock_bit(1)) & 1u;
  const unsigned c3 = (s.r3 >> spec.clock_bit(2)) & 1u;
  const unsigned m = majority(c1, c2, c3);
  return unsigned(c1 == m) | (unsigned(c2 == m) << 1) | (unsigned(c3 == m) << 2);
}

StepResult step(const CipherSpec& spec, const CipherState& state) {
  StepResult out{state, 0, clockset(spec, state)};
  for (int i = 0; i < 3; ++i)
    if (out.clocked & (1u << i)) out.state.reg(i) = clock_register(spec, i, state.reg(i));
  out.bit = output_bit(spec, out.state);
  return out;
}

CipherState key_setup(std::uint64_t key, std::uint32_t frame) {
  const CipherSpec& spec = CipherSpec::a51();
  CipherState s;
  auto load = [&](unsigned bit) {
    for (int i = 0; i < 3; ++i) s.reg(i) = clock_register(spec, i, s.reg(i)) ^ bit;
  };
  for (unsigned i = 0; i < kKeyBits; ++i) load(static_cast<unsigned>(key >> i) & 1u);
  for (unsigned i = 0; i < kFrameBits; ++i) load((frame >> i) & 1u);
  return s;
}

CipherState warm_up(const CipherState& initialized) {
  CipherState s = initialized;
  for (unsigned i = 0; i < kWarmupClocks; ++i) s = step(CipherSpec::a51(), s).state;
  return s;
}

CipherState initialize(std::uint64_t key, std::uint32_t frame) {
  if (frame >> kFrameBits) throw std::invalid_argument("frame number wider than 22 bits");
  return warm_up(key_setup(key, frame));
}

CipherState initialize(std::span<const std::uint8_t> key_bits,
                       std::span<const std::uint8_t> frame_bits) {
  if (key_bits.size() != kKeyBits)
    throw std::invalid_argument("key must be exactly 64 bits, got " + std::to_string(key_bits.size()));
  if (frame_bits.size() != kFrameBits)
    throw std::invalid_argument("frame must be exactly 22 bits, got " +
                                std::to_string(frame_bits.size()));
  std::uint64_t key = 0;
  std::uint32_t frame = 0;
  for (unsigned i = 0; i < kKeyBits; ++i) key |= std::uint64_t(key_bits[i] & 1u) << i;
  for (unsigned i = 0; i < kFrameBits; ++i) frame |= std::uint32_t(frame_bits[i] & 1u) << i;
  return initialize(key, frame);
}

Keystream generate_keystream(const CipherSpec& spec, CipherState state, std::size_t n) {
  std::vector<std::uint8_t> bits;
  bits.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    StepResult r = step(spec, state);
    state = r.state;
    bits.push_back(static_cast<std::uint8_t>(r.bit));
  }
  return Keystream(std::move(bits));
}

std::size_t matching_prefix(const CipherSpec& spec, CipherState state, const Keystream& ks,
                            Alignment alignment) {
  std::size_t i = 0;
  if (alignment == Alignment::first_output) {
    if (ks.empty() || output_bit(spec, state) != ks[0]) return 0;
    i = 1;
  }
  for (; i < ks.size(); ++i) {
    StepResult r = step(spec, state);
    if (r.bit != ks[i]) return i;
    state = r.state;
  }
  return i;
}

}  // namespace a51
