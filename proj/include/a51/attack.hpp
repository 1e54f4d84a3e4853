#pragma once

// Guess-and-determine attack: R1 is guessed in full, R2 and R3 are filled in
// progressively by a branch-and-prune search driven by the known keystream,
// and every complete candidate is checked against 64 keystream bits.
//
// One determination round, starting from a candidate whose constrained
// keystream prefix is ks[0..consumed):
//   1. branch on the still-unknown clocking bits of R2 and R3;
//   2. the majority of the (now concrete) clocking bits fixes which
//      registers clock;
//   3. the MSBs those registers will hold after clocking must XOR to
//      ks[consumed]; vacant MSB cells are forced or split two ways;
//   4. the registers are clocked.
// With Alignment::first_output the root's own MSBs must XOR to ks[0]
// (phase1_round0) before the first round; with Alignment::warmup_state the
// root is the state *before* the first output clock, as produced by
// initialize().

#include <cstdint>
#include <functional>
#include <vector>

#include "a51/cipher.hpp"
#include "a51/partial_register.hpp"

namespace a51 {

enum class BranchPolicy {
  lazy,             ///< feedback bits stay symbolic until consulted
  paper_eager_r37,  ///< also split R3's low taps (A5/1: bit 7) in the first round
};

struct StateCandidate {
  Word r1_fill = 0;  // the guess
  Word r1 = 0;       // R1 as clocked so far
  std::uint16_t t1 = 0;
  PartialRegister r2;
  PartialRegister r3;
  std::uint16_t rounds = 0;    // determination rounds performed
  std::uint16_t consumed = 0;  // keystream bits already enforced

  bool operator==(const StateCandidate&) const = default;
};

struct CompleteStateCandidate {
  CipherState state;  // original fills of all three registers
  unsigned rounds = 0;

  auto operator<=>(const CompleteStateCandidate&) const = default;
};

struct AttackOptions {
  BranchPolicy policy = BranchPolicy::lazy;
  Alignment alignment = Alignment::warmup_state;
  /// Stop expanding after this many rounds (0 = run every path to the stop
  /// rule). Used by the growth statistics.
  unsigned max_rounds = 0;
  /// Re-run every emitted candidate through the cipher and count the ones
  /// that fail to reproduce the keystream they were derived from.
  bool verify_emissions = false;
};

struct AttackReport {
  std::vector<CompleteStateCandidate> matches;  // sorted by state
  std::uint64_t guesses = 0;
  std::uint64_t candidates_emitted = 0;
  std::uint64_t leaves_pruned = 0;
  std::uint64_t exhausted_paths = 0;
  std::uint64_t soundness_violations = 0;
  std::uint64_t peak_live_candidates = 0;
  unsigned max_depth = 0;
  unsigned min_emitted_rounds = 0;  // 0 when nothing was emitted

  /// Associative and commutative; keeps matches sorted.
  void merge(const AttackReport& other);
};

/// Live / completed counts indexed by round number (index 0 unused).
struct RoundCounts {
  std::vector<std::uint64_t> live;
  std::vector<std::uint64_t> completes;
};

/// The determination-phase operations for one cipher, keystream and option set.
class Determiner {
 public:
  /// Throws std::invalid_argument for an empty keystream.
  Determiner(const CipherSpec& spec, Keystream ks, AttackOptions options = {});

  const CipherSpec& spec() const { return spec_; }
  const Keystream& keystream() const { return ks_; }
  const AttackOptions& options() const { return options_; }
  const RegisterModel& model(int reg) const { return reg == 1 ? r2_ : r3_; }

  /// Clock count after which register `reg` (1 = R2, 2 = R3) is fully
  /// determined: max(msb - clock_bit - 1, clock_bit). A5/1: 10 and 11.
  unsigned stop_threshold(int reg) const { return reg == 1 ? d2_ : d3_; }

  /// Fresh candidate: concrete R1, R2 and R3 vacant.
  StateCandidate root(Word r1_guess) const;

  /// Candidates the first determination round starts from: phase1_round0 of
  /// the root for first_output alignment, the root itself for warmup_state.
  std::vector<StateCandidate> initial(Word r1_guess) const;

  /// Enforces R1[msb] ^ R2[msb] ^ R3[msb] = ks[0] on the root (0-2 children).
  std::vector<StateCandidate> phase1_round0(const StateCandidate& cand) const;

  /// Fills the vacant clocking bits of R2 and R3 every possible way (1, 2 or
  /// 4 children; more only if a clocking cell is an unresolved feedback bit).
  std::vector<StateCandidate> branch_clocking_bits(const StateCandidate& cand) const;

  /// Registers clocked by the majority rule (bit set, bit 0 = R1). The
  /// candidate's clocking bits must be concrete.
  unsigned clockset(const StateCandidate& cand) const;

  /// Enforces the output equation on the post-clock MSBs for `clockset`
  /// (0-2 children). Does not clock.
  std::vector<StateCandidate> lookahead_constrain(const StateCandidate& cand, unsigned clockset,
                                                  unsigned ks_next) const;

  /// One full determination round. Throws std::out_of_range when the
  /// keystream has no bit left to constrain.
  std::vector<StateCandidate> advance_round(const StateCandidate& cand) const;

  bool is_stopped(const StateCandidate& cand) const {
    return cand.r2.t >= d2_ && cand.r3.t >= d3_;
  }

  /// Number of concrete states the candidate expands to (2^unassigned).
  std::uint64_t fill_count(const StateCandidate& cand) const;

  /// Concrete states of a stopped (or exhausted) candidate.
  std::vector<CompleteStateCandidate> materialize(const StateCandidate& cand) const;

  // Allocation-free forms used by the search loop; children are appended.
  void append_phase1(const StateCandidate& cand, std::vector<StateCandidate>& out,
                     std::uint64_t& pruned) const;
  void append_advance(const StateCandidate& cand, std::vector<StateCandidate>& out,
                      std::uint64_t& pruned) const;

 private:
  void append_solutions(const StateCandidate& cand, Word f2, Word f3, unsigned target,
                        std::vector<StateCandidate>& out, std::uint64_t& pruned) const;
  void finish_round(StateCandidate& cand, unsigned clocked) const;

  CipherSpec spec_;
  Keystream ks_;
  AttackOptions options_;
  RegisterModel r2_;
  RegisterModel r3_;
  unsigned d2_;
  unsigned d3_;
  Word eager_r3_bits_;
};

using CompleteSink = std::function<void(const CompleteStateCandidate&)>;

inline constexpr std::size_t kPostProcessBits = 64;

/// Depth-first walk of the determination tree for one R1 guess. Every
/// complete candidate is handed to `sink` (which may be empty). Throws
/// std::invalid_argument when |ks| < 64 or the guess does not fit R1.
AttackReport enumerate(const CipherSpec& spec, Word r1_guess, const Keystream& ks,
                       const AttackOptions& options, const CompleteSink& sink,
                       RoundCounts* counts = nullptr);

/// The same walk without the 64-bit precondition or per-state expansion;
/// used for counting.
AttackReport walk(const Determiner& det, Word r1_guess, RoundCounts* counts = nullptr);

/// Regenerates 64 bits from the candidate and compares with ks[0..64).
bool post_process(const CipherSpec& spec, const CompleteStateCandidate& cand, const Keystream& ks,
                  Alignment alignment = Alignment::warmup_state);

/// enumerate() with post-processing; report.matches holds the survivors.
AttackReport attack_single_guess(const CipherSpec& spec, Word r1_guess, const Keystream& ks,
                                 const AttackOptions& options = {});

}  // namespace a51
