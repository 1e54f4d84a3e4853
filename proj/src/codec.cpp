#include "a51/codec.hpp"

#include <cctype>
#include <stdexcept>

namespace a51 {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

int hex_digit(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

std::string_view strip_0x(std::string_view s) {
  if (s.size() >= 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X')) s.remove_prefix(2);
  return s;
}

}  // namespace

std::string hex_word(std::uint64_t value) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string digits;
  do {
    digits.insert(digits.begin(), kDigits[value & 0xf]);
    value >>= 4;
  } while (value != 0);
  return "0x" + digits;
}

std::uint64_t parse_hex(std::string_view text) {
  std::string_view s = strip_0x(trim(text));
  if (s.empty()) throw std::invalid_argument("empty hex value");
  std::uint64_t v = 0;
  for (char c : s) {
    const int d = hex_digit(c);
    if (d < 0) throw std::invalid_argument("invalid hex digit '" + std::string(1, c) + "'");
    if (v >> 60) throw std::invalid_argument("hex value wider than 64 bits");
    v = (v << 4) | static_cast<unsigned>(d);
  }
  return v;
}

std::string format_keystream(const Keystream& ks, KeystreamFormat format) {
  std::string out;
  if (format == KeystreamFormat::bits) {
    out.reserve(ks.size());
    for (std::size_t i = 0; i < ks.size(); ++i) out.push_back(ks[i] ? '1' : '0');
    return out;
  }
  static constexpr char kDigits[] = "0123456789abcdef";
  for (std::size_t byte = 0; byte * 8 < ks.size(); ++byte) {
    unsigned v = 0;
    for (unsigned j = 0; j < 8; ++j) {
      const std::size_t i = byte * 8 + j;
      if (i < ks.size() && ks[i]) v |= 0x80u >> j;
    }
    out.push_back(kDigits[v >> 4]);
    out.push_back(kDigits[v & 0xf]);
  }
  return out;
}

Keystream parse_keystream(std::string_view text, KeystreamFormat format,
                          std::optional<std::size_t> bit_count) {
  std::string_view s = trim(text);
  Keystream ks;
  if (format == KeystreamFormat::bits) {
    for (char c : s) {
      if (c != '0' && c != '1')
        throw std::invalid_argument("keystream bit string may only contain '0' and '1'");
      ks.push_back(c == '1');
    }
  } else {
    s = strip_0x(s);
    if (s.size() % 2 != 0) throw std::invalid_argument("hex keystream needs whole bytes");
    for (char c : s) {
      const int d = hex_digit(c);
      if (d < 0) throw std::invalid_argument("invalid hex digit '" + std::string(1, c) + "'");
      for (int j = 3; j >= 0; --j) ks.push_back((static_cast<unsigned>(d) >> j) & 1u);
    }
  }
  if (bit_count) {
    if (*bit_count > ks.size())
      throw std::invalid_argument("keystream holds fewer bits than requested");
    ks = ks.prefix(*bit_count);
  }
  return ks;
}

KeystreamFormat parse_keystream_format(std::string_view name) {
  if (name == "bits") return KeystreamFormat::bits;
  if (name == "hex") return KeystreamFormat::hex;
  throw std::invalid_argument("unknown keystream format '" + std::string(name) + "'");
}

}  // namespace a51
