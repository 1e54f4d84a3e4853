#include <atomic>
#include <stdexcept>

#include "a51/kernels.hpp"

namespace a51::kernels {
namespace {

bool cpu_has_avx2() {
#if defined(A51_HAVE_AVX2_KERNEL) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

detail::MatchFn function_for(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return &detail::match_scalar;
    case Isa::avx2:
#if defined(A51_HAVE_AVX2_KERNEL)
      return &detail::match_avx2;
#else
      return nullptr;
#endif
    case Isa::neon:
#if defined(A51_HAVE_NEON_KERNEL)
      return &detail::match_neon;
#else
      return nullptr;
#endif
  }
  return nullptr;
}

std::atomic<Isa>& active_slot() {
  static std::atomic<Isa> slot{best_supported()};
  return slot;
}

}  // namespace

std::string_view name(Isa isa) {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
    case Isa::neon: return "neon";
  }
  return "?";
}

bool supported(Isa isa) {
  switch (isa) {
    case Isa::scalar: return true;
    case Isa::avx2: return cpu_has_avx2();
    case Isa::neon:
#if defined(A51_HAVE_NEON_KERNEL)
      return true;  // baseline on AArch64
#else
      return false;
#endif
  }
  return false;
}

Isa best_supported() {
  if (supported(Isa::avx2)) return Isa::avx2;
  if (supported(Isa::neon)) return Isa::neon;
  return Isa::scalar;
}

Isa active() { return active_slot().load(std::memory_order_relaxed); }

void select(Isa isa) {
  if (!supported(isa))
    throw std::invalid_argument("kernel '" + std::string(name(isa)) + "' is not supported here");
  active_slot().store(isa, std::memory_order_relaxed);
}

void match_keystream(Isa isa, const CipherSpec& spec, std::span<const CipherState> states,
                     const Keystream& ks, Alignment alignment, std::span<std::uint8_t> matched) {
  if (matched.size() < states.size())
    throw std::invalid_argument("match buffer shorter than the state batch");
  if (!supported(isa))
    throw std::invalid_argument("kernel '" + std::string(name(isa)) + "' is not supported here");
  function_for(isa)(spec, states, ks, alignment, matched);
}

void match_keystream(const CipherSpec& spec, std::span<const CipherState> states,
                     const Keystream& ks, Alignment alignment, std::span<std::uint8_t> matched) {
  match_keystream(active(), spec, states, ks, alignment, matched);
}

}  // namespace a51::kernels
