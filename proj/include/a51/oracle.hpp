#pragma once

// Ground truth for small ciphers of the A5/1 family: exhaustive search over
// every state, and the maximal-length tap search used to build them.

#include <cstdint>
#include <optional>
#include <vector>

#include "a51/cipher.hpp"

namespace a51 {

/// Largest number of free state bits brute_force_matches accepts.
inline constexpr unsigned kBruteForceMaxBits = 26;

/// Period of `reg` clocked regularly from the fill 1 (0 if it never returns).
std::uint64_t register_period(const RegisterSpec& reg);

/// First tap set with period 2^length - 1, searching sets that contain the
/// MSB, two taps before four. Throws std::invalid_argument if none exists
/// (or length is outside 2..24).
std::vector<unsigned> find_maximal_taps(unsigned length);

/// Mini-cipher preset: lengths (7, 9, 10), clock bits (3, 4, 4), taps from
/// find_maximal_taps.
const CipherSpec& mini_spec();

/// Every state (with R1 fixed to `r1_fixed` when given) whose output equals
/// ks under `alignment`, sorted. Throws std::invalid_argument when more than
/// 2^26 states would have to be tried.
std::vector<CipherState> brute_force_matches(const CipherSpec& spec, const Keystream& ks,
                                             std::optional<Word> r1_fixed = std::nullopt,
                                             Alignment alignment = Alignment::warmup_state,
                                             unsigned workers = 1);

}  // namespace a51
