#pragma once

// Text encodings shared by the CLI and the result files.
//   registers: lowercase hex of the register word, "0x" prefixed;
//   keystream: ASCII '0'/'1' with KS[0] first, or hex with 8 bits per byte
//              and KS[0] in the MSB of the first byte.
// Parsers throw std::invalid_argument on malformed input.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "a51/cipher.hpp"

namespace a51 {

enum class KeystreamFormat { bits, hex };

std::string hex_word(std::uint64_t value);
std::uint64_t parse_hex(std::string_view text);

std::string format_keystream(const Keystream& ks, KeystreamFormat format);

/// Bits form accepts only '0'/'1'. Hex form yields 8 bits per byte; a
/// `bit_count` shorter than that truncates the trailing padding.
Keystream parse_keystream(std::string_view text, KeystreamFormat format,
                          std::optional<std::size_t> bit_count = std::nullopt);

KeystreamFormat parse_keystream_format(std::string_view name);

}  // namespace a51
