// a51gd: A5/1 keystream generation, guess-and-determine state recovery,
// statistics and oracle checks.
//
// Exit codes: 0 success / match found, 1 finished without a match (or an
// oracle mismatch), 2 usage or input error.

#include <atomic>
#include <csignal>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "a51/attack.hpp"
#include "a51/attack_full.hpp"
#include "a51/cipher.hpp"
#include "a51/codec.hpp"
#include "a51/kernels.hpp"
#include "a51/oracle.hpp"
#include "a51/serialize.hpp"
#include "a51/stats.hpp"

namespace {

using namespace a51;

constexpr int kOk = 0;
constexpr int kNoMatch = 1;
constexpr int kUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::atomic<bool> g_interrupted{false};

extern "C" void on_sigint(int) { g_interrupted.store(true); }

struct Common {
  std::string ks_text;
  std::string ks_file;
  std::string format = "bits";
  std::string spec_file;
  std::string out;
  std::string policy = "lazy";
  std::string align;  // empty: the subcommand's default
  std::string r1_text;
  std::uint64_t seed = 1;
  unsigned workers = 1;
};

CipherSpec load_spec(const Common& c) {
  if (c.spec_file.empty()) return CipherSpec::a51();
  return parse_spec_json(read_file(c.spec_file));
}

BranchPolicy load_policy(const Common& c) {
  if (c.policy == "lazy") return BranchPolicy::lazy;
  if (c.policy == "paper-eager") return BranchPolicy::paper_eager_r37;
  throw UsageError("--policy must be lazy or paper-eager");
}

Alignment load_alignment(const Common& c, Alignment fallback = Alignment::warmup_state) {
  if (c.align.empty()) return fallback;
  if (c.align == "warmup") return Alignment::warmup_state;
  if (c.align == "first-output") return Alignment::first_output;
  throw UsageError("--align must be warmup or first-output");
}

std::optional<Keystream> load_keystream(const Common& c) {
  if (!c.ks_text.empty() && !c.ks_file.empty()) throw UsageError("give --ks or --ks-file, not both");
  std::string text = c.ks_text;
  if (!c.ks_file.empty()) text = read_file(c.ks_file);
  if (text.empty()) return std::nullopt;
  std::string clean;
  for (char ch : text)
    if (!std::isspace(static_cast<unsigned char>(ch))) clean += ch;
  return parse_keystream(clean, parse_keystream_format(c.format));
}

Word load_word(const std::string& text, const CipherSpec& spec, int reg, const char* what) {
  const std::uint64_t v = parse_hex(text);
  if (v & ~std::uint64_t{spec.mask(reg)})
    throw UsageError(std::string(what) + " does not fit a " + std::to_string(spec.length(reg)) +
                     "-bit register");
  return static_cast<Word>(v);
}

// Writes to --out when given, else stdout.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary | std::ios::trunc);
      if (!file_) throw std::runtime_error("cannot write " + path);
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

void add_common(CLI::App* sub, Common& c, bool ks, bool spec) {
  if (ks) {
    sub->add_option("--ks", c.ks_text, "keystream text");
    sub->add_option("--ks-file", c.ks_file, "file holding the keystream text");
    sub->add_option("--format", c.format, "keystream encoding")->check(CLI::IsMember({"bits", "hex"}));
  }
  if (spec) sub->add_option("--spec", c.spec_file, "cipher spec JSON {lengths, taps, clock_bits}");
  sub->add_option("--out", c.out, "output path (default stdout)");
}

CipherState random_state(const CipherSpec& spec, std::mt19937_64& rng) {
  return {static_cast<Word>(rng()) & spec.mask(0), static_cast<Word>(rng()) & spec.mask(1),
          static_cast<Word>(rng()) & spec.mask(2)};
}

// ---- keystream -----------------------------------------------------------

struct KeystreamArgs {
  std::string key, frame, state;
  std::size_t n = kFrameKeystreamBits;
  bool show_state = false;
};

int run_keystream(const Common& c, const KeystreamArgs& a) {
  const CipherSpec spec = load_spec(c);
  CipherState s;
  if (!a.state.empty()) {
    std::vector<std::string> parts;
    std::stringstream ss(a.state);
    for (std::string p; std::getline(ss, p, ',');) parts.push_back(p);
    if (parts.size() != 3) throw UsageError("--state needs three comma-separated hex registers");
    s = {load_word(parts[0], spec, 0, "R1"), load_word(parts[1], spec, 1, "R2"),
         load_word(parts[2], spec, 2, "R3")};
  } else {
    if (a.key.empty() || a.frame.empty()) throw UsageError("keystream needs --key and --frame, or --state");
    if (!c.spec_file.empty()) throw UsageError("--key/--frame loading is defined for A5/1 only; use --state");
    const std::uint64_t frame = parse_hex(a.frame);
    if (frame >> kFrameBits) throw UsageError("--frame wider than 22 bits");
    s = initialize(parse_hex(a.key), static_cast<std::uint32_t>(frame));
  }
  if (a.show_state)
    std::cerr << "{\"r1\":\"" << hex_word(s.r1) << "\",\"r2\":\"" << hex_word(s.r2)
              << "\",\"r3\":\"" << hex_word(s.r3) << "\"}\n";
  Output out(c.out);
  out.stream() << format_keystream(generate_keystream(spec, s, a.n), parse_keystream_format(c.format))
               << "\n";
  return kOk;
}

// ---- attack --------------------------------------------------------------

struct AttackArgs {
  std::string range;
  std::string resume;
  std::string report;
  bool verify = false;
  bool progress = false;
};

int run_attack(const Common& c, const AttackArgs& a) {
  const CipherSpec spec = load_spec(c);
  const auto ks = load_keystream(c);
  if (!ks) throw UsageError("attack needs --ks or --ks-file");
  if (ks->size() < kPostProcessBits)
    throw UsageError("attack needs at least 64 keystream bits, got " + std::to_string(ks->size()));
  if (!c.r1_text.empty() && !a.range.empty()) throw UsageError("give --r1 or --r1-range, not both");

  AttackOptions opt;
  opt.policy = load_policy(c);
  opt.alignment = load_alignment(c);
  opt.verify_emissions = a.verify;

  AttackReport report;
  if (!c.r1_text.empty()) {
    report = attack_single_guess(spec, load_word(c.r1_text, spec, 0, "--r1"), *ks, opt);
  } else {
    GuessRange range{0, spec.mask(0)};
    if (!a.range.empty()) range = parse_guess_range(a.range);
    if (range.last & ~spec.mask(0)) throw UsageError("--r1-range exceeds the R1 register");
    FullAttackOptions fo;
    fo.attack = opt;
    fo.workers = c.workers;
    fo.checkpoint_path = a.resume;
    fo.cancel = &g_interrupted;
    if (a.progress)
      fo.progress = [](const FullAttackProgress& p) {
        std::fprintf(stderr, "\r%llu/%llu guesses, %zu matches", (unsigned long long)p.done,
                     (unsigned long long)p.total, p.matches);
      };
    std::signal(SIGINT, on_sigint);
    FullAttackResult res = attack_full(spec, *ks, range, fo);
    if (a.progress) std::fputc('\n', stderr);
    if (!res.complete) {
      std::cerr << "interrupted; resume from guess " << hex_word(res.next)
                << (a.resume.empty() ? " (no --resume file was given)" : "") << "\n";
      return kUsage;
    }
    report = std::move(res.report);
  }

  Output out(c.out);
  for (const auto& m : report.matches) out.stream() << match_json_line(m) << "\n";
  const std::string summary = report_json(report);
  if (!a.report.empty())
    write_file_atomic(a.report, summary + "\n");
  else
    std::cerr << summary << "\n";
  return report.matches.empty() ? kNoMatch : kOk;
}

// ---- stats ---------------------------------------------------------------

struct GrowthArgs {
  unsigned rounds = 5;
  std::string as = "csv";
};

int run_growth(const Common& c, const GrowthArgs& a) {
  const CipherSpec spec = load_spec(c);
  std::mt19937_64 rng(c.seed);
  auto ks = load_keystream(c);
  if (!ks) {
    Keystream k;
    for (std::size_t i = 0; i < std::max<std::size_t>(64, a.rounds + 1); ++i) k.push_back(rng() & 1);
    ks = k;
  }
  const Word r1 = c.r1_text.empty() ? static_cast<Word>(rng()) & spec.mask(0)
                                    : load_word(c.r1_text, spec, 0, "--r1");
  const GrowthStats g = growth_counts(spec, r1, *ks, a.rounds, load_policy(c),
                                     load_alignment(c, Alignment::first_output));
  Output out(c.out);
  out.stream() << (a.as == "json" ? growth_json(g) + "\n" : growth_csv(g));
  return kOk;
}

int run_rounds(const Common& c, unsigned trials) {
  const RoundsSample s = rounds_experiment(trials, c.seed);
  const Rational e = expected_rounds_formula();
  nlohmann::ordered_json j;
  j["trials"] = trials;
  j["seed"] = c.seed;
  j["mean"] = s.mean;
  j["stddev"] = s.stddev;
  j["min"] = s.min;
  j["max"] = s.max;
  j["expected"] = std::to_string(e.num) + "/" + std::to_string(e.den);
  Output out(c.out);
  out.stream() << j.dump() << "\n";
  return kOk;
}

// ---- oracle-verify -------------------------------------------------------

struct OracleArgs {
  unsigned instances = 20;
  bool full_range = false;
};

int run_oracle(const Common& c, const OracleArgs& a) {
  const CipherSpec spec = c.spec_file.empty() ? mini_spec() : load_spec(c);
  AttackOptions opt;
  opt.policy = load_policy(c);
  opt.alignment = load_alignment(c);
  opt.verify_emissions = true;
  std::mt19937_64 rng(c.seed);
  Output out(c.out);
  unsigned mismatches = 0;
  for (unsigned i = 0; i < a.instances; ++i) {
    const CipherState s = random_state(spec, rng);
    Keystream ks = generate_keystream(spec, s, kPostProcessBits);
    if (opt.alignment == Alignment::first_output) {
      Keystream k;
      k.push_back(output_bit(spec, s));
      for (std::size_t j = 0; j + 1 < kPostProcessBits; ++j) k.push_back(ks[j]);
      ks = k;
    }
    const auto expect = brute_force_matches(spec, ks, s.r1, opt.alignment, c.workers);
    const AttackReport rep = attack_single_guess(spec, s.r1, ks, opt);
    std::vector<CipherState> got;
    for (const auto& m : rep.matches) got.push_back(m.state);
    bool equal = got == expect && rep.soundness_violations == 0;
    if (a.full_range) {
      const auto all = brute_force_matches(spec, ks, std::nullopt, opt.alignment, c.workers);
      FullAttackOptions fo;
      fo.attack = opt;
      fo.workers = c.workers;
      const auto res = attack_full(spec, ks, {0, spec.mask(0)}, fo);
      std::vector<CipherState> got_all;
      for (const auto& m : res.report.matches) got_all.push_back(m.state);
      equal = equal && got_all == all;
    }
    if (!equal) ++mismatches;
    nlohmann::ordered_json j;
    j["instance"] = i;
    j["r1"] = hex_word(s.r1);
    j["r2"] = hex_word(s.r2);
    j["r3"] = hex_word(s.r3);
    j["oracle_matches"] = expect.size();
    j["attack_matches"] = got.size();
    j["equal"] = equal;
    out.stream() << j.dump() << "\n";
  }
  std::cerr << (a.instances - mismatches) << "/" << a.instances << " instances agree\n";
  return mismatches == 0 ? kOk : kNoMatch;
}

// ---- estimate ------------------------------------------------------------

int run_estimate(const Common& c, std::uint64_t probes) {
  const CipherSpec spec = load_spec(c);
  std::mt19937_64 rng(c.seed);
  auto ks = load_keystream(c);
  if (!ks) {
    const CipherState s = random_state(spec, rng);
    ks = generate_keystream(spec, s, kPostProcessBits);
  }
  const Word r1 = c.r1_text.empty() ? static_cast<Word>(rng()) & spec.mask(0)
                                    : load_word(c.r1_text, spec, 0, "--r1");
  AttackOptions opt;
  opt.policy = load_policy(c);
  opt.alignment = load_alignment(c);
  const TreeEstimate est = estimate_complete_count(spec, r1, *ks, probes, c.seed, opt);
  nlohmann::ordered_json j;
  j["r1"] = hex_word(r1);
  j["probes"] = est.probes;
  j["estimate"] = est.estimate;
  j["std_error"] = est.std_error;
  j["log2_per_guess"] = est.estimate > 0 ? std::log2(est.estimate) : -INFINITY;
  j["log2_all_guesses"] = est.estimate > 0 ? std::log2(est.estimate) + spec.length(0) : -INFINITY;
  Output out(c.out);
  out.stream() << j.dump() << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"A5/1 guess-and-determine state recovery"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "a51gd 1.0");
  std::string isa;
  app.add_option("--isa", isa, "force a matching kernel")->check(CLI::IsMember({"scalar", "avx2", "neon"}));

  Common c;

  KeystreamArgs ka;
  auto* ks_cmd = app.add_subcommand("keystream", "generate keystream from key/frame or a state");
  add_common(ks_cmd, c, false, true);
  ks_cmd->add_option("--key", ka.key, "64-bit key, hex");
  ks_cmd->add_option("--frame", ka.frame, "22-bit frame number, hex");
  ks_cmd->add_option("--state", ka.state, "R1,R2,R3 in hex instead of key/frame");
  ks_cmd->add_option("--n", ka.n, "number of bits");
  ks_cmd->add_option("--format", c.format, "output encoding")->check(CLI::IsMember({"bits", "hex"}));
  ks_cmd->add_flag("--show-state", ka.show_state, "print the warm-up state on stderr");

  AttackArgs aa;
  auto* atk = app.add_subcommand("attack", "recover the warm-up state from 64+ keystream bits");
  add_common(atk, c, true, true);
  atk->add_option("--r1", c.r1_text, "single R1 guess, hex");
  atk->add_option("--r1-range", aa.range, "inclusive guess range A..B");
  atk->add_option("--policy", c.policy)->check(CLI::IsMember({"lazy", "paper-eager"}));
  atk->add_option("--align", c.align)->check(CLI::IsMember({"warmup", "first-output"}));
  atk->add_option("--workers", c.workers)->check(CLI::Range(1u, 1024u));
  atk->add_option("--resume", aa.resume, "checkpoint file for range attacks");
  atk->add_option("--report", aa.report, "write the summary JSON here instead of stderr");
  atk->add_flag("--verify", aa.verify, "re-check every emitted candidate");
  atk->add_flag("--progress", aa.progress, "progress on stderr");

  GrowthArgs ga;
  auto* gr = app.add_subcommand("stats-growth", "per-round candidate counts for one guess");
  add_common(gr, c, true, true);
  gr->add_option("--r1", c.r1_text, "R1 guess, hex (default: random)");
  gr->add_option("--rounds", ga.rounds, "last round to count")->check(CLI::Range(1u, 64u));
  gr->add_option("--policy", c.policy)->check(CLI::IsMember({"lazy", "paper-eager"}));
  gr->add_option("--align", c.align)->check(CLI::IsMember({"warmup", "first-output"}));
  gr->add_option("--seed", c.seed);
  gr->add_option("--as", ga.as)->check(CLI::IsMember({"csv", "json"}));

  unsigned trials = 250;
  auto* rd = app.add_subcommand("stats-rounds", "clock cycles until t2 >= 10 and t3 >= 11");
  rd->add_option("--trials", trials)->check(CLI::Range(1u, 100000000u));
  rd->add_option("--seed", c.seed);
  rd->add_option("--out", c.out);

  OracleArgs oa;
  auto* orc = app.add_subcommand("oracle-verify", "compare the attack with brute force on a small cipher");
  add_common(orc, c, false, true);
  orc->add_option("--instances", oa.instances);
  orc->add_option("--seed", c.seed);
  orc->add_option("--workers", c.workers)->check(CLI::Range(1u, 1024u));
  orc->add_option("--policy", c.policy)->check(CLI::IsMember({"lazy", "paper-eager"}));
  orc->add_option("--align", c.align)->check(CLI::IsMember({"warmup", "first-output"}));
  orc->add_flag("--full-range", oa.full_range, "also attack every R1 guess");

  std::uint64_t probes = 100000;
  auto* est = app.add_subcommand("estimate", "random-descent estimate of complete candidates per guess");
  add_common(est, c, true, true);
  est->add_option("--r1", c.r1_text, "R1 guess, hex (default: random)");
  est->add_option("--probes", probes)->check(CLI::Range(std::uint64_t{1}, std::uint64_t{1} << 40));
  est->add_option("--seed", c.seed);
  est->add_option("--policy", c.policy)->check(CLI::IsMember({"lazy", "paper-eager"}));
  est->add_option("--align", c.align)->check(CLI::IsMember({"warmup", "first-output"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (!isa.empty()) {
      const kernels::Isa want = isa == "avx2"   ? kernels::Isa::avx2
                                : isa == "neon" ? kernels::Isa::neon
                                                : kernels::Isa::scalar;
      if (!kernels::supported(want)) throw UsageError("--isa " + isa + " is not available here");
      kernels::select(want);
    }
    if (ks_cmd->parsed()) return run_keystream(c, ka);
    if (atk->parsed()) return run_attack(c, aa);
    if (gr->parsed()) return run_growth(c, ga);
    if (rd->parsed()) return run_rounds(c, trials);
    if (orc->parsed()) return run_oracle(c, oa);
    if (est->parsed()) return run_estimate(c, probes);
  } catch (const std::exception& e) {
    std::cerr << "a51gd: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
