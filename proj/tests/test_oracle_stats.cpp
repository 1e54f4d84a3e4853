#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "a51/attack.hpp"
#include "a51/kernels.hpp"
#include "a51/oracle.hpp"
#include "a51/stats.hpp"
#include "helpers.hpp"

using namespace a51;

TEST_SUITE("oracle_stats") {

TEST_CASE("register periods") {
  CHECK(register_period(RegisterSpec{4, {2, 3}, 1}) == 15);
  CHECK(register_period(RegisterSpec{4, {3}, 1}) == 4);  // pure rotation
  const CipherSpec& spec = CipherSpec::a51();
  CHECK(register_period(spec.reg(0)) == (1u << 19) - 1);
}

TEST_CASE("maximal tap search") {
  for (unsigned len : {3u, 5u, 7u, 9u, 10u}) {
    const auto taps = find_maximal_taps(len);
    CHECK(taps.back() == len - 1);
    CHECK(register_period(RegisterSpec{len, taps, 0}) == (1ull << len) - 1);
  }
  CHECK_THROWS_AS(find_maximal_taps(1), std::invalid_argument);
  const CipherSpec& m = mini_spec();
  CHECK(m.length(0) == 7);
  CHECK(m.length(1) == 9);
  CHECK(m.length(2) == 10);
  CHECK(m.clock_bit(0) == 3);
  CHECK(m.clock_bit(1) == 4);
  CHECK(m.clock_bit(2) == 4);
}

TEST_CASE("brute force basics") {
  const CipherSpec& spec = mini_spec();
  Keystream zeros;
  for (int i = 0; i < 32; ++i) zeros.push_back(0);
  const auto z = brute_force_matches(spec, zeros, Word{0});
  CHECK(std::find(z.begin(), z.end(), CipherState{}) != z.end());

  std::mt19937_64 rng(5);
  const CipherState s = testing::random_state(spec, rng);
  const Keystream ks = generate_keystream(spec, s, 64);
  const auto long_set = brute_force_matches(spec, ks, s.r1);
  const auto short_set = brute_force_matches(spec, ks.prefix(32), s.r1);
  CHECK(std::includes(short_set.begin(), short_set.end(), long_set.begin(), long_set.end()));
  CHECK(std::find(long_set.begin(), long_set.end(), s) != long_set.end());

  // workers split R1 values; results must not depend on that
  const auto all1 = brute_force_matches(spec, ks, std::nullopt, Alignment::warmup_state, 1);
  const auto all3 = brute_force_matches(spec, ks, std::nullopt, Alignment::warmup_state, 3);
  CHECK(all1 == all3);
  for (const auto& st : all1) CHECK(matching_prefix(spec, st, ks, Alignment::warmup_state) == 64);

  CHECK_THROWS_AS(brute_force_matches(CipherSpec::a51(), ks, Word{0}), std::invalid_argument);
}

TEST_CASE("kernel variants agree with the scalar reference") {
  std::mt19937_64 rng(77);
  for (const CipherSpec* spec : {&CipherSpec::a51(), &mini_spec()}) {
    for (int round = 0; round < 20; ++round) {
      const CipherState truth = testing::random_state(*spec, rng);
      const std::size_t len = 1 + rng() % 80;
      const Alignment al = rng() & 1 ? Alignment::first_output : Alignment::warmup_state;
      const Keystream ks = al == Alignment::warmup_state ? generate_keystream(*spec, truth, len)
                                                         : testing::first_output_keystream(*spec, truth, len);
      std::vector<CipherState> batch;
      const std::size_t n = 1 + rng() % 300;
      for (std::size_t i = 0; i < n; ++i) {
        CipherState s = testing::random_state(*spec, rng);
        // near misses: flip a single bit of the true state now and then
        if (i % 5 == 0) {
          s = truth;
          s.reg(static_cast<int>(rng() % 3)) ^= Word{1} << (rng() % spec->length(0));
        }
        if (i % 17 == 0) s = truth;
        batch.push_back(s);
      }
      std::vector<std::uint8_t> expect(n), got(n);
      kernels::match_keystream(kernels::Isa::scalar, *spec, batch, ks, al, expect);
      for (std::size_t i = 0; i < n; ++i)
        REQUIRE(expect[i] == (matching_prefix(*spec, batch[i], ks, al) == ks.size()));
      for (kernels::Isa isa : {kernels::Isa::avx2, kernels::Isa::neon}) {
        if (!kernels::supported(isa)) continue;
        std::fill(got.begin(), got.end(), 2);
        kernels::match_keystream(isa, *spec, batch, ks, al, got);
        CHECK(got == expect);
      }
    }
  }
  CHECK(kernels::supported(kernels::Isa::scalar));
  CHECK(kernels::supported(kernels::active()));
}

TEST_CASE("growth counts") {
  const CipherSpec& spec = CipherSpec::a51();
  std::mt19937_64 rng(41);
  double sum2 = 0, sum3 = 0;
  const int trials = 100;
  for (int i = 0; i < trials; ++i) {
    const Keystream ks = testing::random_keystream(64, rng);
    const Word r1 = static_cast<Word>(rng()) & spec.mask(0);
    const GrowthStats g = growth_counts(spec, r1, ks, 3);
    REQUIRE(g.rows.size() == 3);
    CHECK(g.rows[0].round == 1);
    CHECK(g.rows[0].total == 12);
    CHECK(g.rows[0].complete == 0);
    sum2 += static_cast<double>(g.rows[1].total);
    sum3 += static_cast<double>(g.rows[2].total);
    const GrowthStats e = growth_counts(spec, r1, ks, 1, BranchPolicy::paper_eager_r37);
    CHECK(e.rows[0].total == 24);
  }
  CHECK(std::abs(sum2 / trials - 60) <= 15);
  CHECK(std::abs(sum3 / trials - 300) <= 75);
  CHECK_THROWS_AS(growth_counts(spec, 0, testing::random_keystream(3, rng), 3), std::invalid_argument);
  CHECK_THROWS_AS(growth_counts(spec, 0, testing::random_keystream(64, rng), 0), std::invalid_argument);
}

TEST_CASE("growth on the mini cipher matches a level-by-level count") {
  const CipherSpec& spec = mini_spec();
  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 10; ++trial) {
    const Keystream ks = testing::random_keystream(64, rng);
    const Word r1 = static_cast<Word>(rng()) & spec.mask(0);
    const unsigned max_round = 12;
    const GrowthStats g = growth_counts(spec, r1, ks, max_round);

    // breadth-first oracle
    AttackOptions o;
    o.alignment = Alignment::first_output;
    const Determiner d(spec, ks, o);
    std::vector<StateCandidate> level = d.initial(r1);
    std::uint64_t complete = 0;
    for (unsigned r = 1; r <= max_round; ++r) {
      std::vector<StateCandidate> next;
      for (const auto& c : level) {
        if (d.is_stopped(c)) continue;
        for (const auto& n : d.advance_round(c)) next.push_back(n);
      }
      std::uint64_t live = 0;
      for (const auto& n : next) {
        if (d.is_stopped(n))
          complete += d.fill_count(n);
        else
          ++live;
      }
      level = std::move(next);
      CHECK(g.rows[r - 1].complete == complete);
      CHECK(g.rows[r - 1].total == live + complete);
      CHECK(g.rows[r - 1].complete <= g.rows[r - 1].total);
    }
  }
}

TEST_CASE("rounds experiment") {
  const RoundsSample a = rounds_experiment(250, 1);
  const RoundsSample b = rounds_experiment(250, 1);
  CHECK(a.rounds == b.rounds);
  CHECK(a.mean == b.mean);
  CHECK(a.min >= 11);
  CHECK(a.rounds.size() == 250);
  CHECK(rounds_experiment(1, 2).stddev == 0.0);
  CHECK_THROWS_AS(rounds_experiment(0, 1), std::invalid_argument);
}

TEST_CASE("expected rounds formula") {
  CHECK(expected_rounds_formula() == Rational{31, 2});
  CHECK(expected_rounds_formula().value() == 15.5);
  RoundExpectationModel equal;
  equal.x3 = 10;
  CHECK(expected_rounds_formula(equal) == Rational{15});
  RoundExpectationModel bad;
  bad.p_n1 = Rational{1, 3};
  CHECK_THROWS_AS(expected_rounds_formula(bad), std::invalid_argument);
  CHECK(Rational{2, -4} == Rational{-1, 2});
  CHECK(Rational{1, 3} + Rational{1, 6} == Rational{1, 2});
  CHECK_THROWS_AS(Rational(1, 0), std::invalid_argument);
}

TEST_CASE("uniform draws") {
  std::mt19937_64 rng(1);
  std::array<int, 3> hist{};
  for (int i = 0; i < 30000; ++i) ++hist[uniform_below(rng, 3)];
  for (int h : hist) CHECK(std::abs(h - 10000) < 500);
  CHECK_THROWS_AS(uniform_below(rng, 0), std::invalid_argument);
}

TEST_CASE("random-descent estimate on the mini cipher") {
  const CipherSpec& spec = mini_spec();
  std::mt19937_64 rng(47);
  for (int trial = 0; trial < 5; ++trial) {
    const Keystream ks = testing::random_keystream(64, rng);
    const Word r1 = static_cast<Word>(rng()) & spec.mask(0);
    const AttackReport exact = enumerate(spec, r1, ks, {}, {});
    const TreeEstimate est = estimate_complete_count(spec, r1, ks, 20000, 100 + trial);
    CHECK(est.probes == 20000);
    CHECK(std::abs(est.estimate - static_cast<double>(exact.candidates_emitted)) <= 3 * est.std_error + 1e-9);
  }
  const Keystream ks = testing::random_keystream(64, rng);
  const TreeEstimate one = estimate_complete_count(CipherSpec::a51(), 5, ks, 1, 9);
  CHECK(one.estimate >= 0);
  CHECK(one.estimate == std::floor(one.estimate));
  CHECK_THROWS_AS(estimate_complete_count(spec, 0, ks, 0, 1), std::invalid_argument);
}

}  // TEST_SUITE
