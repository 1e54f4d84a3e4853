#pragma once

// Bit-exact A5/1 and the generic three-register majority-clocked LFSR
// family it belongs to.
//
// Conventions:
//   * bit p of a register is (word >> p) & 1; bit 0 is the rightmost cell;
//   * a clocked register shifts left, the XOR of its tap bits (read before
//     the shift) enters at bit 0, the MSB falls off;
//   * the output bit is the XOR of the three MSBs taken after clocking.

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace a51 {

using Word = std::uint32_t;

inline constexpr unsigned kMaxRegisterLength = 32;
inline constexpr unsigned kKeyBits = 64;
inline constexpr unsigned kFrameBits = 22;
inline constexpr unsigned kWarmupClocks = 100;
inline constexpr unsigned kFrameKeystreamBits = 228;

struct RegisterSpec {
  unsigned length = 0;
  std::vector<unsigned> taps;
  unsigned clock_bit = 0;

  unsigned msb() const { return length - 1; }
  Word mask() const { return length >= 32 ? ~Word{0} : (Word{1} << length) - 1; }
  Word tap_mask() const;

  bool operator==(const RegisterSpec&) const = default;
};

/// Register lengths, feedback taps and clocking-bit positions of a cipher in
/// the A5/1 family. Validated on construction; throws std::invalid_argument.
class CipherSpec {
 public:
  explicit CipherSpec(std::array<RegisterSpec, 3> registers);

  /// Table 1 parameters: lengths (19, 22, 23), clock bits (8, 10, 10).
  static const CipherSpec& a51();

  const RegisterSpec& reg(int i) const { return regs_[i]; }
  const std::array<RegisterSpec, 3>& registers() const { return regs_; }

  unsigned length(int i) const { return regs_[i].length; }
  unsigned msb(int i) const { return regs_[i].length - 1; }
  unsigned clock_bit(int i) const { return regs_[i].clock_bit; }
  Word mask(int i) const { return masks_[i]; }
  Word tap_mask(int i) const { return tap_masks_[i]; }
  unsigned total_bits() const { return regs_[0].length + regs_[1].length + regs_[2].length; }

  bool operator==(const CipherSpec& other) const { return regs_ == other.regs_; }

 private:
  std::array<RegisterSpec, 3> regs_;
  std::array<Word, 3> masks_{};
  std::array<Word, 3> tap_masks_{};
};

struct CipherState {
  Word r1 = 0;
  Word r2 = 0;
  Word r3 = 0;

  Word reg(int i) const { return i == 0 ? r1 : (i == 1 ? r2 : r3); }
  Word& reg(int i) { return i == 0 ? r1 : (i == 1 ? r2 : r3); }

  auto operator<=>(const CipherState&) const = default;
};

bool fits(const CipherSpec& spec, const CipherState& state);

/// Ordered keystream bits, KS[0] first. Each element is 0 or 1.
class Keystream {
 public:
  Keystream() = default;
  explicit Keystream(std::vector<std::uint8_t> bits);

  std::size_t size() const { return bits_.size(); }
  bool empty() const { return bits_.empty(); }
  std::uint8_t operator[](std::size_t i) const { return bits_[i]; }
  void push_back(unsigned bit) { bits_.push_back(static_cast<std::uint8_t>(bit & 1u)); }
  std::span<const std::uint8_t> bits() const { return bits_; }

  Keystream prefix(std::size_t n) const;
  Keystream slice(std::size_t first, std::size_t n) const;

  bool operator==(const Keystream&) const = default;

 private:
  std::vector<std::uint8_t> bits_;
};

constexpr unsigned majority(unsigned a, unsigned b, unsigned c) {
  return ((a & b) | (a & c) | (b & c)) & 1u;
}

/// XOR of the three current MSBs.
unsigned output_bit(const CipherSpec& spec, const CipherState& state);

/// One regular (unconditional) clock of register i.
Word clock_register(const CipherSpec& spec, int i, Word value);

/// Registers clocked by the majority rule in the given state, as a bit set
/// (bit i set = register i clocks). Always two or three registers.
unsigned clockset(const CipherSpec& spec, const CipherState& state);

struct StepResult {
  CipherState state;
  unsigned bit = 0;
  unsigned clocked = 0;
};

/// One irregular (majority) clock followed by output generation.
StepResult step(const CipherSpec& spec, const CipherState& state);

/// Key/frame loading: 86 regular clocks from zero, each input bit XORed into
/// the feedback entering bit 0. Key bit i is (key >> i) & 1 and is loaded
/// i-th; frame bits likewise. Returns the post-initialization state.
CipherState key_setup(std::uint64_t key, std::uint32_t frame);

/// 100 majority clocks with output discarded.
CipherState warm_up(const CipherState& initialized);

/// key_setup followed by warm_up: the state the keystream is produced from.
/// Throws std::invalid_argument when frame does not fit 22 bits.
CipherState initialize(std::uint64_t key, std::uint32_t frame);

/// Bit-vector form; throws std::invalid_argument unless the spans hold
/// exactly 64 and 22 bits.
CipherState initialize(std::span<const std::uint8_t> key_bits,
                       std::span<const std::uint8_t> frame_bits);

/// n output bits from `state`, which is left untouched.
Keystream generate_keystream(const CipherSpec& spec, CipherState state, std::size_t n);

/// Where KS[0] comes from relative to a state.
enum class Alignment {
  warmup_state,  ///< KS[0] is emitted after the first clock (S_w convention)
  first_output,  ///< KS[0] is the XOR of the state's own MSBs
};

/// Number of leading bits of `ks` the state reproduces under `alignment`;
/// stops at the first mismatch.
std::size_t matching_prefix(const CipherSpec& spec, CipherState state, const Keystream& ks,
                            Alignment alignment);

}  // namespace a51
