#include "a51/attack_full.hpp"

#include <chrono>
#include <filesystem>
#include <map>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <vector>

#include "a51/codec.hpp"
#include "a51/serialize.hpp"

namespace a51 {

GuessRange parse_guess_range(const std::string& text) {
  const auto dots = text.find("..");
  if (dots == std::string::npos) throw std::invalid_argument("range must look like A..B: " + text);
  auto number = [&](const std::string& s) -> std::uint64_t {
    if (s.empty()) throw std::invalid_argument("range bound is empty: " + text);
    if (s.size() > 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X')) return parse_hex(s);
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(s, &used, 10);
    } catch (const std::exception&) {
      throw std::invalid_argument("bad range bound: " + s);
    }
    if (used != s.size() || s[0] == '-' || s[0] == '+')
      throw std::invalid_argument("bad range bound: " + s);
    return v;
  };
  const std::uint64_t a = number(text.substr(0, dots));
  const std::uint64_t b = number(text.substr(dots + 2));
  if (a > b) throw std::invalid_argument("range start exceeds its end: " + text);
  if (b > 0xffffffffull) throw std::invalid_argument("range bound too large: " + text);
  return {static_cast<Word>(a), static_cast<Word>(b)};
}

FullAttackResult attack_full(const CipherSpec& spec, const Keystream& ks, GuessRange range,
                             const FullAttackOptions& options) {
  if (ks.size() < kPostProcessBits)
    throw std::invalid_argument("attack needs at least 64 keystream bits, got " +
                                std::to_string(ks.size()));
  if (range.first > range.last) throw std::invalid_argument("empty guess range");
  if (range.last & ~spec.mask(0)) throw std::invalid_argument("guess range does not fit R1");

  const std::string ks_hex = format_keystream(ks, KeystreamFormat::hex);
  const std::uint64_t end = std::uint64_t{range.last} + 1;

  // Everything in [range.first, next) is merged into `prefix`.
  AttackReport prefix;
  std::uint64_t next = range.first;
  if (!options.checkpoint_path.empty() && std::filesystem::exists(options.checkpoint_path)) {
    Checkpoint cp = parse_checkpoint_json(read_file(options.checkpoint_path));
    if (!(cp.range == range)) throw std::invalid_argument("checkpoint covers a different range");
    if (cp.keystream_hex != ks_hex)
      throw std::invalid_argument("checkpoint was written for a different keystream");
    if (cp.next < range.first || cp.next > end)
      throw std::invalid_argument("checkpoint position outside its range");
    prefix = std::move(cp.report);
    next = cp.next;
  }

  std::mutex mu;
  std::map<std::uint64_t, AttackReport> pending;  // finished guesses past `next`
  std::uint64_t dispatched = next;
  auto last_save = std::chrono::steady_clock::now();

  auto save_locked = [&] {
    if (options.checkpoint_path.empty()) return;
    write_file_atomic(options.checkpoint_path,
                      checkpoint_json(Checkpoint{range, next, ks_hex, prefix}));
    last_save = std::chrono::steady_clock::now();
  };
  auto cancelled = [&] {
    return options.cancel != nullptr && options.cancel->load(std::memory_order_relaxed);
  };

  std::exception_ptr failure;
  auto worker = [&] {
    for (;;) {
      std::uint64_t guess;
      {
        std::lock_guard lock(mu);
        if (failure || cancelled() || dispatched >= end) return;
        guess = dispatched++;
      }
      AttackReport rep;
      try {
        rep = attack_single_guess(spec, static_cast<Word>(guess), ks, options.attack);
      } catch (...) {
        std::lock_guard lock(mu);
        if (!failure) failure = std::current_exception();
        return;
      }
      std::lock_guard lock(mu);
      pending.emplace(guess, std::move(rep));
      while (!pending.empty() && pending.begin()->first == next) {
        prefix.merge(pending.begin()->second);
        pending.erase(pending.begin());
        ++next;
      }
      if (options.progress)
        options.progress({next - range.first + pending.size(), range.size(), prefix.matches.size()});
      if (std::chrono::steady_clock::now() - last_save > std::chrono::seconds(1)) save_locked();
    }
  };

  const unsigned workers = std::max(1u, options.workers);
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < workers; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  save_locked();
  FullAttackResult result;
  result.complete = next == end;
  result.next = next;
  result.report = std::move(prefix);
  return result;
}

}  // namespace a51
