#pragma once

#include <random>
#include <string>

#include "a51/attack.hpp"
#include "a51/cipher.hpp"
#include "a51/serialize.hpp"

namespace testing {

inline a51::CipherState random_state(const a51::CipherSpec& spec, std::mt19937_64& rng) {
  return {static_cast<a51::Word>(rng()) & spec.mask(0), static_cast<a51::Word>(rng()) & spec.mask(1),
          static_cast<a51::Word>(rng()) & spec.mask(2)};
}

inline a51::Keystream random_keystream(std::size_t n, std::mt19937_64& rng) {
  a51::Keystream ks;
  for (std::size_t i = 0; i < n; ++i) ks.push_back(static_cast<unsigned>(rng() & 1));
  return ks;
}

/// KS[0] = the state's own output bit, then generate_keystream's n-1 bits.
inline a51::Keystream first_output_keystream(const a51::CipherSpec& spec, const a51::CipherState& s,
                                             std::size_t n) {
  a51::Keystream ks;
  ks.push_back(a51::output_bit(spec, s));
  const a51::Keystream rest = a51::generate_keystream(spec, s, n - 1);
  for (std::size_t i = 0; i < rest.size(); ++i) ks.push_back(rest[i]);
  return ks;
}

inline std::string fixture(const std::string& name) {
  return a51::read_file(std::string(A51_FIXTURE_DIR) + "/" + name);
}

}  // namespace testing
