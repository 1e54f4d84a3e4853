#pragma once

// Three-valued register model used by the attack's state candidates.
//
// Cells are identified by absolute index rather than by position: the cell at
// position p of a register clocked t times has absolute index a = p - t.
// Indices 0..length-1 are the original fill (the bits being recovered);
// index -k is the feedback bit created by the k-th clock. Only original bits
// are ever assigned. A feedback bit is never stored: it is the XOR of the
// cells its record names, {tap - (k - 1)}, and is resolved on demand.

#include <cstdint>
#include <vector>

#include "a51/cipher.hpp"

namespace a51 {

enum class TriBit : std::uint8_t { zero, one, unknown };

constexpr TriBit to_tribit(unsigned bit) { return (bit & 1u) ? TriBit::one : TriBit::zero; }

struct PartialRegister {
  Word known = 0;  // which original bits are assigned
  Word value = 0;  // their values; zero wherever `known` is clear
  std::uint16_t t = 0;

  bool operator==(const PartialRegister&) const = default;
};

/// Clocking model of one register. Every absolute index resolves to a GF(2)
/// linear form over the original bits (bit j set = original bit j takes part),
/// precomputed for up to `max_clocks` clocks.
class RegisterModel {
 public:
  RegisterModel(const RegisterSpec& reg, unsigned max_clocks);

  unsigned length() const { return length_; }
  unsigned msb() const { return length_ - 1; }
  unsigned clock_bit() const { return clock_bit_; }
  unsigned max_clocks() const { return max_clocks_; }
  Word mask() const { return mask_; }
  const std::vector<unsigned>& taps() const { return taps_; }

  /// Linear form of absolute index a, -max_clocks <= a < length.
  Word form(int absolute) const { return forms_[static_cast<std::size_t>(absolute + offset_)]; }

  /// Linear form of the cell currently at position p.
  Word form_at(const PartialRegister& reg, unsigned p) const {
    return form(static_cast<int>(p) - static_cast<int>(reg.t));
  }

  /// Absolute indices the feedback bit of the k-th clock (k >= 1) depends on.
  std::vector<int> feedback_record(unsigned k) const;

 private:
  unsigned length_;
  unsigned clock_bit_;
  unsigned max_clocks_;
  int offset_;
  Word mask_;
  std::vector<unsigned> taps_;
  std::vector<Word> forms_;
};

enum class AssignResult { ok, contradiction };

/// Value of the linear form under the register's assignments, or unknown if
/// any original bit it depends on is unassigned.
TriBit resolve(const PartialRegister& reg, Word form);

TriBit current_bit(const PartialRegister& reg, const RegisterModel& model, unsigned p);

/// Write-once assignment of original bit `absolute`. Re-assigning the same
/// value is a no-op; a different value is a contradiction and leaves `reg`
/// unchanged. Throws std::out_of_range for indices outside the original fill.
[[nodiscard]] AssignResult assign(PartialRegister& reg, const RegisterModel& model,
                                  unsigned absolute, unsigned bit);

/// Advances the clock counter; the new feedback cell stays symbolic.
/// Throws std::out_of_range past the model's max_clocks.
PartialRegister clock_partial(PartialRegister reg, const RegisterModel& model);

/// Unassigned original bits the cell at position p depends on, as a mask.
Word unresolved_mask(const PartialRegister& reg, const RegisterModel& model, unsigned p);

/// Same as unresolved_mask, as a sorted list of absolute indices.
std::vector<unsigned> unresolved_original_deps(const PartialRegister& reg,
                                               const RegisterModel& model, unsigned p);

/// Every concrete original fill compatible with the assignments: 2^u words
/// for u unassigned bits, in increasing order.
std::vector<Word> materialize(const PartialRegister& reg, const RegisterModel& model);

/// Calls f(word) for each fill materialize() would return, without allocating.
template <class F>
void for_each_fill(const PartialRegister& reg, Word register_mask, F&& f) {
  const Word free = register_mask & ~reg.known;
  Word sub = 0;
  do {
    f(reg.value | sub);
    sub = (sub - free) & free;
  } while (sub != 0);
}

}  // namespace a51
