#include "a51/partial_register.hpp"

#include <bit>
#include <stdexcept>
#include <string>

namespace a51 {

RegisterModel::RegisterModel(const RegisterSpec& reg, unsigned max_clocks)
    : length_(reg.length),
      clock_bit_(reg.clock_bit),
      max_clocks_(max_clocks),
      offset_(static_cast<int>(max_clocks)),
      mask_(reg.mask()),
      taps_(reg.taps),
      forms_(static_cast<std::size_t>(max_clocks) + reg.length, 0) {
  for (unsigned a = 0; a < length_; ++a) forms_[a + offset_] = Word{1} << a;
  // Record -k reads taps shifted by k-1, all of which are > -k.
  for (unsigned k = 1; k <= max_clocks_; ++k) {
    Word f = 0;
    for (unsigned tap : taps_) f ^= form(static_cast<int>(tap) - static_cast<int>(k - 1));
    forms_[static_cast<std::size_t>(offset_ - static_cast<int>(k))] = f;
  }
}

std::vector<int> RegisterModel::feedback_record(unsigned k) const {
  std::vector<int> deps;
  deps.reserve(taps_.size());
  for (unsigned tap : taps_) deps.push_back(static_cast<int>(tap) - static_cast<int>(k - 1));
  return deps;
}

TriBit resolve(const PartialRegister& reg, Word form) {
  if (form & ~reg.known) return TriBit::unknown;
  return to_tribit(static_cast<unsigned>(std::popcount(form & reg.value)));
}

TriBit current_bit(const PartialRegister& reg, const RegisterModel& model, unsigned p) {
  return resolve(reg, model.form_at(reg, p));
}

AssignResult assign(PartialRegister& reg, const RegisterModel& model, unsigned absolute,
                    unsigned bit) {
  if (absolute >= model.length())
    throw std::out_of_range("only original bits 0.." + std::to_string(model.length() - 1) +
                            " are assignable");
  const Word m = Word{1} << absolute;
  bit &= 1u;
  if (reg.known & m) return ((reg.value & m) != 0) == (bit != 0) ? AssignResult::ok
                                                                   : AssignResult::contradiction;
  reg.known |= m;
  if (bit) reg.value |= m;
  return AssignResult::ok;
}

PartialRegister clock_partial(PartialRegister reg, const RegisterModel& model) {
  if (reg.t >= model.max_clocks())
    throw std::out_of_range("register clocked past the model's precomputed horizon");
  ++reg.t;
  return reg;
}

Word unresolved_mask(const PartialRegister& reg, const RegisterModel& model, unsigned p) {
  return model.form_at(reg, p) & ~reg.known;
}

std::vector<unsigned> unresolved_original_deps(const PartialRegister& reg,
                                               const RegisterModel& model, unsigned p) {
  std::vector<unsigned> out;
  for (Word m = unresolved_mask(reg, model, p); m != 0; m &= m - 1)
    out.push_back(static_cast<unsigned>(std::countr_zero(m)));
  return out;
}

std::vector<Word> materialize(const PartialRegister& reg, const RegisterModel& model) {
  std::vector<Word> fills;
  fills.reserve(std::size_t{1} << std::popcount(model.mask() & ~reg.known));
  for_each_fill(reg, model.mask(), [&](Word w) { fills.push_back(w); });
  return fills;
}

}  // namespace a51
