#pragma once

// Full attack: every R1 guess in a range, in parallel, with checkpointing.

#include <atomic>
#include <cstdint>
#include <functional>
#include <string>

#include "a51/attack.hpp"

namespace a51 {

/// Inclusive range of R1 guesses.
struct GuessRange {
  Word first = 0;
  Word last = 0;

  std::uint64_t size() const { return std::uint64_t{last} - first + 1; }
  bool operator==(const GuessRange&) const = default;
};

/// Parses "A..B" (decimal or 0x-prefixed hex, inclusive). Throws
/// std::invalid_argument on malformed text or A > B.
GuessRange parse_guess_range(const std::string& text);

struct FullAttackProgress {
  std::uint64_t done = 0;   // guesses finished
  std::uint64_t total = 0;  // guesses in the range
  std::size_t matches = 0;
};

struct FullAttackOptions {
  AttackOptions attack;
  unsigned workers = 1;
  /// When non-empty: resume from this file if it exists, and keep it
  /// updated with the contiguous prefix of finished guesses.
  std::string checkpoint_path;
  /// Polled between guesses; set it to stop early. The checkpoint then holds
  /// everything completed so far.
  const std::atomic<bool>* cancel = nullptr;
  std::function<void(const FullAttackProgress&)> progress;
};

/// State persisted between runs. `next` is the first guess not yet covered;
/// `report` merges every guess in [range.first, next).
struct Checkpoint {
  GuessRange range;
  std::uint64_t next = 0;
  std::string keystream_hex;
  AttackReport report;
};

struct FullAttackResult {
  AttackReport report;
  bool complete = false;  // false when cancelled
  std::uint64_t next = 0;
};

/// attack_single_guess for every guess in `range`. The merged report does
/// not depend on the worker count or on scheduling. Throws
/// std::invalid_argument for a keystream shorter than 64 bits, a range that
/// does not fit R1, or a checkpoint written for a different range/keystream.
FullAttackResult attack_full(const CipherSpec& spec, const Keystream& ks, GuessRange range,
                             const FullAttackOptions& options = {});

}  // namespace a51
