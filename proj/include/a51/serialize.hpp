#pragma once

// JSON / JSON Lines / CSV forms of the library's result types.

#include <iosfwd>
#include <string>

#include "a51/attack.hpp"
#include "a51/attack_full.hpp"
#include "a51/cipher.hpp"
#include "a51/stats.hpp"

namespace a51 {

/// {"r1":"0x..","r2":"0x..","r3":"0x..","rounds":n} on one line.
std::string match_json_line(const CompleteStateCandidate& match);
CompleteStateCandidate parse_match_json_line(const std::string& line);

/// One JSON object with the report counters and its match list.
std::string report_json(const AttackReport& report);
AttackReport parse_report_json(const std::string& text);

/// Header "round,total,complete,ratio", one row per round.
std::string growth_csv(const GrowthStats& stats);
std::string growth_json(const GrowthStats& stats);

/// {"lengths":[..],"taps":[[..],[..],[..]],"clock_bits":[..]}
std::string spec_json(const CipherSpec& spec);
/// Throws std::invalid_argument on malformed documents or invalid specs.
CipherSpec parse_spec_json(const std::string& text);

std::string checkpoint_json(const Checkpoint& cp);
Checkpoint parse_checkpoint_json(const std::string& text);

/// Whole-file helpers; throw std::runtime_error on I/O failure.
std::string read_file(const std::string& path);
/// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::string& path, const std::string& contents);

}  // namespace a51
