#pragma once

// Batched keystream matching: the data-parallel inner loop shared by the
// brute-force oracle and the attack's post-processing. Each variant answers,
// for every state in a batch, "does this state reproduce all of ks?".
//
// The scalar variant is the reference; SIMD variants must agree with it bit
// for bit and are selected at runtime from what the CPU supports.

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "a51/cipher.hpp"

namespace a51::kernels {

enum class Isa { scalar, avx2, neon };

std::string_view name(Isa isa);

/// True when the variant is compiled in and the running CPU can execute it.
bool supported(Isa isa);

/// Fastest supported variant.
Isa best_supported();

/// Variant used by match_keystream(); defaults to best_supported().
Isa active();

/// Overrides the active variant. Throws std::invalid_argument if unsupported.
void select(Isa isa);

/// matched[i] = 1 iff states[i] reproduces every bit of ks under `alignment`,
/// else 0. `matched` must be at least as long as `states`.
void match_keystream(const CipherSpec& spec, std::span<const CipherState> states,
                     const Keystream& ks, Alignment alignment, std::span<std::uint8_t> matched);

/// Same, forcing a particular variant (used by the equivalence tests).
void match_keystream(Isa isa, const CipherSpec& spec, std::span<const CipherState> states,
                     const Keystream& ks, Alignment alignment, std::span<std::uint8_t> matched);

namespace detail {

using MatchFn = void (*)(const CipherSpec&, std::span<const CipherState>, const Keystream&,
                         Alignment, std::span<std::uint8_t>);

void match_scalar(const CipherSpec&, std::span<const CipherState>, const Keystream&, Alignment,
                  std::span<std::uint8_t>);
void match_avx2(const CipherSpec&, std::span<const CipherState>, const Keystream&, Alignment,
                std::span<std::uint8_t>);
void match_neon(const CipherSpec&, std::span<const CipherState>, const Keystream&, Alignment,
                std::span<std::uint8_t>);

}  // namespace detail
}  // namespace a51::kernels
