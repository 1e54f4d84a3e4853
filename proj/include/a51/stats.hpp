#pragma once

// Counting and sampling over the determination tree: per-round growth,
// the rounds-to-stop experiment and its closed-form expectation, and a
// random-descent estimate of the number of complete candidates per guess.

#include <cstdint>
#include <random>
#include <vector>

#include "a51/attack.hpp"

namespace a51 {

struct GrowthRow {
  unsigned round = 0;
  std::uint64_t total = 0;     // live after this round + completes so far
  std::uint64_t complete = 0;  // completes so far, counted as concrete states
  double ratio = 0.0;          // complete / total
};

struct GrowthStats {
  std::vector<GrowthRow> rows;  // rounds 1..max_round
};

/// Per-round counts for one guess, walking the tree no deeper than
/// `max_round`. Requires max_round >= 1 and max_round + 1 <= |ks|;
/// throws std::invalid_argument otherwise.
GrowthStats growth_counts(const CipherSpec& spec, Word r1_guess, const Keystream& ks,
                          unsigned max_round, BranchPolicy policy = BranchPolicy::lazy,
                          Alignment alignment = Alignment::first_output);

struct RoundsSample {
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation (n - 1)
  unsigned min = 0;
  unsigned max = 0;
  std::vector<unsigned> rounds;
};

/// Clocks `trials` uniformly random A5/1 states until R2 has clocked at
/// least 10 times and R3 at least 11 times, recording the clock count.
/// Throws std::invalid_argument when trials == 0.
RoundsSample rounds_experiment(unsigned trials, std::uint64_t seed);

/// Exact fraction with a positive denominator, kept in lowest terms.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  Rational() = default;
  Rational(std::int64_t n, std::int64_t d = 1);

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  bool operator==(const Rational&) const = default;
};

Rational operator+(Rational a, Rational b);
Rational operator*(Rational a, Rational b);
Rational operator/(Rational a, Rational b);

/// Event probabilities for one clock (both R2 and R3 clock; only R1 and R2;
/// only R1 and R3) and the clock counts needed under each mix.
struct RoundExpectationModel {
  Rational p_n1{1, 2};
  Rational p_n2a{1, 4};
  Rational p_n2b{1, 4};
  std::int64_t x1 = 10;
  std::int64_t x2 = 10;
  std::int64_t x3 = 11;
};

/// (x1 P(n1) + 2 (x2 P(n2') + x3 P(n2''))) / (P(n1) + P(n2') + P(n2'')).
/// 31/2 for the default model. Throws std::invalid_argument unless the
/// probabilities are non-negative and sum to 1.
Rational expected_rounds_formula(const RoundExpectationModel& model = {});

struct TreeEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
  std::uint64_t probes = 0;
};

/// Knuth's random-descent estimator of the number of complete candidates one
/// guess produces: the product of branching factors along a uniformly random
/// path, times the leaf's fill count (0 at a pruned leaf), averaged over
/// `probes` paths. options.max_rounds is ignored. Throws std::invalid_argument
/// when probes == 0.
TreeEstimate estimate_complete_count(const CipherSpec& spec, Word r1_guess, const Keystream& ks,
                                     std::uint64_t probes, std::uint64_t seed,
                                     const AttackOptions& options = {});

/// Uniform draw from [0, bound) by rejection; identical on every platform.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound);

}  // namespace a51
