// Acceptance gate: one PASS/FAIL line per criterion.
//
//   acceptance            run every criterion
//   acceptance 2 3 5      run the listed ones
//
// Exit status is 0 only when every selected criterion passes.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>
#include <sys/resource.h>
#include <sys/wait.h>
#include <unistd.h>

#include "a51/attack.hpp"
#include "a51/attack_full.hpp"
#include "a51/codec.hpp"
#include "a51/oracle.hpp"
#include "a51/serialize.hpp"
#include "a51/stats.hpp"
#include "helpers.hpp"

using namespace a51;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::vector<CipherState> states(const std::vector<CompleteStateCandidate>& v) {
  std::vector<CipherState> out;
  for (const auto& c : v) out.push_back(c.state);
  return out;
}

// Emission soundness tally shared by every criterion that streams candidates.
std::uint64_t g_emission_checks = 0;
std::uint64_t g_soundness_violations = 0;

void tally(const AttackReport& r) {
  g_emission_checks += r.candidates_emitted;
  g_soundness_violations += r.soundness_violations;
}

// Peak RSS (MB) of a forked child that runs `job`; the child's exit status
// carries job()'s verdict.
struct ChildRun {
  bool ok = false;
  double peak_mb = 0.0;
};

std::vector<double> g_peak_rss_mb;

ChildRun in_child(const std::function<bool()>& job) {
  std::fflush(stdout);
  const pid_t pid = ::fork();
  if (pid == 0) {
    bool ok = false;
    try {
      ok = job();
    } catch (...) {
      ok = false;
    }
    std::fflush(stdout);
    ::_exit(ok ? 0 : 1);
  }
  int status = 0;
  rusage usage{};
  ::wait4(pid, &status, 0, &usage);
  ChildRun r;
  r.ok = WIFEXITED(status) && WEXITSTATUS(status) == 0;
  r.peak_mb = static_cast<double>(usage.ru_maxrss) / 1024.0;  // ru_maxrss is in KiB
  g_peak_rss_mb.push_back(r.peak_mb);
  return r;
}

// 1. End-to-end recovery on full A5/1 with the true R1.
Outcome criterion1() {
  const CipherSpec& spec = CipherSpec::a51();
  std::mt19937_64 rng(0xa51);
  const int keys = 5;
  int recovered = 0;
  double worst = 0;
  for (int i = 0; i < keys; ++i) {
    const std::uint64_t key = rng();
    const std::uint32_t frame = static_cast<std::uint32_t>(rng()) & 0x3fffff;
    const CipherState sw = initialize(key, frame);
    const Keystream ks = generate_keystream(spec, sw, 64);
    const auto t0 = std::chrono::steady_clock::now();
    const ChildRun run = in_child([&] {
      AttackOptions o;
      o.verify_emissions = false;
      const AttackReport rep = attack_single_guess(spec, sw.r1, ks, o);
      const auto m = states(rep.matches);
      return std::find(m.begin(), m.end(), sw) != m.end();
    });
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    worst = std::max(worst, secs);
    std::printf("  key %s frame %s: %s (%.0f s, peak %.1f MB)\n", hex_word(key).c_str(),
                hex_word(frame).c_str(), run.ok ? "recovered" : "MISSED", secs, run.peak_mb);
    recovered += run.ok;
  }
  return {recovered == keys, fmt("%d/%d true states recovered, slowest guess %.0f s", recovered, keys, worst)};
}

// 2. Mini-cipher oracle equality, per guess and over the whole R1 range.
Outcome criterion2() {
  const CipherSpec& spec = mini_spec();
  std::mt19937_64 rng(0x0c2);
  const int instances = 200;
  int per_guess_ok = 0, full_ok = 0;
  std::size_t extra = 0;
  for (int i = 0; i < instances; ++i) {
    const CipherState s = testing::random_state(spec, rng);
    const Alignment al = i % 2 ? Alignment::first_output : Alignment::warmup_state;
    const Keystream ks = al == Alignment::warmup_state ? generate_keystream(spec, s, 64)
                                                       : testing::first_output_keystream(spec, s, 64);
    AttackOptions o;
    o.alignment = al;
    o.policy = i % 4 < 2 ? BranchPolicy::lazy : BranchPolicy::paper_eager_r37;
    o.verify_emissions = true;

    const auto all = brute_force_matches(spec, ks, std::nullopt, al);
    std::vector<CipherState> fixed;
    for (const auto& st : all)
      if (st.r1 == s.r1) fixed.push_back(st);
    const AttackReport one = attack_single_guess(spec, s.r1, ks, o);
    tally(one);
    if (states(one.matches) == fixed) ++per_guess_ok;

    FullAttackOptions fo;
    fo.attack = o;
    const FullAttackResult full = attack_full(spec, ks, {0, spec.mask(0)}, fo);
    tally(full.report);
    if (states(full.report.matches) == all) ++full_ok;
    extra += all.size() - 1;
  }
  return {per_guess_ok == instances && full_ok == instances,
          fmt("per-guess %d/%d, full range %d/%d equal to brute force (%zu non-true matches seen)",
              per_guess_ok, instances, full_ok, instances, extra)};
}

// 3. Round-one counts.
Outcome criterion3() {
  const CipherSpec& spec = CipherSpec::a51();
  std::mt19937_64 rng(0x0c3);
  int lazy_ok = 0, eager_ok = 0;
  const int trials = 100;
  for (int i = 0; i < trials; ++i) {
    const Keystream ks = testing::random_keystream(64, rng);
    const Word r1 = static_cast<Word>(rng()) & spec.mask(0);
    lazy_ok += growth_counts(spec, r1, ks, 1, BranchPolicy::lazy).rows[0].total == 12;
    eager_ok += growth_counts(spec, r1, ks, 1, BranchPolicy::paper_eager_r37).rows[0].total == 24;
  }
  return {lazy_ok == trials && eager_ok == trials,
          fmt("lazy 12 in %d/%d, eager 24 in %d/%d", lazy_ok, trials, eager_ok, trials)};
}

// 4. Growth at rounds 2 and 3.
Outcome criterion4() {
  const CipherSpec& spec = CipherSpec::a51();
  std::mt19937_64 rng(0x0c4);
  const int trials = 100;
  double s2 = 0, s3 = 0;
  for (int i = 0; i < trials; ++i) {
    const Keystream ks = testing::random_keystream(64, rng);
    const Word r1 = static_cast<Word>(rng()) & spec.mask(0);
    const GrowthStats g = growth_counts(spec, r1, ks, 3);
    s2 += static_cast<double>(g.rows[1].total);
    s3 += static_cast<double>(g.rows[2].total);
  }
  const double a2 = s2 / trials, a3 = s3 / trials;
  const bool ok = std::abs(a2 - 60) <= 0.25 * 60 && std::abs(a3 - 300) <= 0.25 * 300;
  return {ok, fmt("mean total round 2 = %.2f (60 +/- 15), round 3 = %.2f (300 +/- 75)", a2, a3)};
}

// 5. Expectation, exact and sampled.
Outcome criterion5() {
  const Rational e = expected_rounds_formula();
  const RoundsSample s = rounds_experiment(250, 0x0c5);
  const bool ok = e == Rational{31, 2} && s.mean >= 15.2 && s.mean <= 15.8 && s.stddev >= 1.4 &&
                  s.stddev <= 2.2 && s.min >= 11;
  return {ok, fmt("E[X] = %lld/%lld; 250 trials: mean %.3f, sd %.3f, min %u", (long long)e.num,
                  (long long)e.den, s.mean, s.stddev, s.min)};
}

// 6. Complete/total ratio trend on full A5/1.
Outcome criterion6() {
  const CipherSpec& spec = CipherSpec::a51();
  std::mt19937_64 rng(0x0c6);
  const int guesses = 3;
  bool ok = true;
  std::string detail;
  for (int i = 0; i < guesses; ++i) {
    const CipherState s = testing::random_state(spec, rng);
    const Keystream ks = testing::first_output_keystream(spec, s, 64);
    const Word r1 = static_cast<Word>(rng()) & spec.mask(0);
    const GrowthStats g = growth_counts(spec, r1, ks, 13);
    const double r11 = g.rows[10].ratio, r12 = g.rows[11].ratio, r13 = g.rows[12].ratio;
    const bool band = r11 >= 0.016 / 2 && r11 <= 0.016 * 2;
    const bool rising = r11 <= r12 && r12 <= r13;
    ok = ok && band && rising;
    std::printf("  guess %s: total 2^%.1f/2^%.1f/2^%.1f, ratio %.2f%% %.2f%% %.2f%%\n", hex_word(r1).c_str(),
                std::log2(double(g.rows[10].total)), std::log2(double(g.rows[11].total)),
                std::log2(double(g.rows[12].total)), 100 * r11, 100 * r12, 100 * r13);
    detail += fmt("%s%.2f%%", i ? ", " : "round-11 ratios ", 100 * r11);
  }
  return {ok, detail + " (band 0.8%..3.2%, non-decreasing to round 13)"};
}

// 7. Random-descent complexity estimate.
Outcome criterion7() {
  const CipherSpec& spec = CipherSpec::a51();
  std::mt19937_64 rng(0x0c7);
  const CipherState s = testing::random_state(spec, rng);
  const Keystream ks = testing::first_output_keystream(spec, s, 64);
  AttackOptions o;
  o.alignment = Alignment::first_output;
  const std::uint64_t probes = 200000;
  const TreeEstimate est = estimate_complete_count(spec, s.r1, ks, probes, 0x0c7, o);
  const double total = std::log2(est.estimate) + spec.length(0);
  return {total >= 47 && total <= 50,
          fmt("%llu probes: per guess 2^%.2f (rel. s.e. %.1f%%), all guesses 2^%.2f (band 47..50)",
              (unsigned long long)probes, std::log2(est.estimate), 100 * est.std_error / est.estimate, total)};
}

// 8. Peak resident memory of a single-guess attack.
Outcome criterion8() {
  if (g_peak_rss_mb.empty()) {
    const CipherSpec& spec = CipherSpec::a51();
    std::mt19937_64 rng(0x0c8);
    const CipherState sw = initialize(rng(), static_cast<std::uint32_t>(rng()) & 0x3fffff);
    const Keystream ks = generate_keystream(spec, sw, 64);
    in_child([&] {
      const AttackReport r = attack_single_guess(spec, sw.r1, ks);
      std::printf("  peak live candidates %llu, max depth %u\n",
                  (unsigned long long)r.peak_live_candidates, r.max_depth);
      return true;
    });
  }
  const double peak = *std::max_element(g_peak_rss_mb.begin(), g_peak_rss_mb.end());
  return {peak <= 100.0, fmt("peak RSS %.1f MB over %zu full single-guess attacks (limit 100 MB)", peak,
                             g_peak_rss_mb.size())};
}

// 9. Cipher conformance.
Outcome criterion9() {
  const CipherSpec& spec = CipherSpec::a51();
  std::mt19937_64 rng(0x0c9);
  std::string detail;
  bool ok = true;
  for (int r = 0; r < 3; ++r) {
    Word seed = 0;
    while (seed == 0) seed = static_cast<Word>(rng()) & spec.mask(r);
    const std::uint64_t want = (std::uint64_t{1} << spec.length(r)) - 1;
    std::uint64_t n = 0;
    Word w = seed;
    do {
      w = clock_register(spec, r, w);
      ++n;
    } while (w != seed && n <= want);
    ok = ok && n == want;
    detail += fmt("R%d period %llu%s; ", r + 1, (unsigned long long)n, n == want ? "" : " (WRONG)");
  }
  std::array<unsigned, 3> clocks{};
  const unsigned steps = 100000;
  CipherState s = testing::random_state(spec, rng);
  for (unsigned i = 0; i < steps; ++i) {
    const StepResult st = step(spec, s);
    for (int j = 0; j < 3; ++j) clocks[j] += (st.clocked >> j) & 1;
    s = st.state;
  }
  for (int j = 0; j < 3; ++j) {
    const double f = double(clocks[j]) / steps;
    ok = ok && std::abs(f - 0.75) <= 0.01;
    detail += fmt("R%d clocks %.4f; ", j + 1, f);
  }
  const auto j = nlohmann::json::parse(testing::fixture("a51_reference_vector.json"));
  const std::size_t n = j["block_bits"].get<std::size_t>();
  const Keystream ks = generate_keystream(
      spec,
      initialize(parse_hex(j["key"].get<std::string>()),
                 static_cast<std::uint32_t>(parse_hex(j["frame"].get<std::string>()))),
      2 * n);
  const bool vec = format_keystream(ks.prefix(n), KeystreamFormat::hex) == j["block_a"].get<std::string>() &&
                   format_keystream(ks.slice(n, n), KeystreamFormat::hex) == j["block_b"].get<std::string>();
  ok = ok && vec;
  detail += vec ? "reference vector reproduced" : "reference vector MISMATCH";
  return {ok, detail};
}

// 10. Emission soundness. Mini-cipher trees are enumerated in full with every
// emission re-checked; on full A5/1, random root-to-leaf paths are.
Outcome criterion10() {
  {
    const CipherSpec& spec = mini_spec();
    std::mt19937_64 rng(0x0ca);
    for (int i = 0; i < 100; ++i) {
      AttackOptions o;
      o.verify_emissions = true;
      o.alignment = i % 2 ? Alignment::first_output : Alignment::warmup_state;
      o.policy = i % 3 ? BranchPolicy::lazy : BranchPolicy::paper_eager_r37;
      const Keystream ks = testing::random_keystream(64, rng);
      tally(enumerate(spec, static_cast<Word>(rng()) & spec.mask(0), ks, o, {}));
    }
  }
  std::uint64_t leaves = 0, leaf_violations = 0;
  {
    const CipherSpec& spec = CipherSpec::a51();
    std::mt19937_64 rng(0x0cb);
    for (int i = 0; i < 20000; ++i) {
      const CipherState s = testing::random_state(spec, rng);
      AttackOptions o;
      o.alignment = i % 2 ? Alignment::first_output : Alignment::warmup_state;
      const Keystream ks = o.alignment == Alignment::warmup_state ? generate_keystream(spec, s, 64)
                                                                  : testing::first_output_keystream(spec, s, 64);
      const Determiner d(spec, ks, o);
      auto frontier = d.initial(s.r1);
      while (!frontier.empty()) {
        const StateCandidate c = frontier[rng() % frontier.size()];
        if (d.is_stopped(c) || c.consumed >= ks.size()) {
          for (const auto& full : d.materialize(c)) {
            ++leaves;
            if (matching_prefix(spec, full.state, ks, o.alignment) < c.consumed) ++leaf_violations;
          }
          break;
        }
        frontier = d.advance_round(c);
      }
    }
  }
  g_emission_checks += leaves;
  g_soundness_violations += leaf_violations;
  return {g_soundness_violations == 0,
          fmt("%llu violations in %llu re-checked emissions (%llu sampled full A5/1 leaves)",
              (unsigned long long)g_soundness_violations, (unsigned long long)g_emission_checks,
              (unsigned long long)leaves)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::map<int, std::pair<const char*, Outcome (*)()>> all = {
      {1, {"end-to-end recovery, full A5/1", criterion1}},
      {2, {"oracle set equality, mini cipher", criterion2}},
      {3, {"round-one determinism", criterion3}},
      {4, {"growth at rounds 2 and 3", criterion4}},
      {5, {"round expectation", criterion5}},
      {6, {"complete/total ratio trend", criterion6}},
      {7, {"complexity estimate", criterion7}},
      {8, {"memory budget", criterion8}},
      {9, {"cipher conformance", criterion9}},
      {10, {"emission soundness", criterion10}},
  };
  std::vector<int> chosen;
  for (int i = 1; i < argc; ++i) {
    const int n = std::atoi(argv[i]);
    if (!all.count(n)) {
      std::fprintf(stderr, "unknown criterion %s\n", argv[i]);
      return 2;
    }
    chosen.push_back(n);
  }
  if (chosen.empty())
    for (const auto& [n, _] : all) chosen.push_back(n);
  std::sort(chosen.begin(), chosen.end());

  int failed = 0;
  for (int n : chosen) {
    const auto& [name, fn] = all.at(n);
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("CRITERION %2d %s: %s (%s) [%.1f s]\n", n, o.pass ? "PASS" : "FAIL", name, o.detail.c_str(), secs);
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed == 0 ? 0 : 1;
}
