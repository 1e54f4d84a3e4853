#include "a51/oracle.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>
#include <thread>

#include "a51/kernels.hpp"

namespace a51 {

std::uint64_t register_period(const RegisterSpec& reg) {
  const CipherSpec single({reg, reg, reg});
  const Word start = 1;
  Word w = start;
  const std::uint64_t limit = std::uint64_t{1} << reg.length;
  for (std::uint64_t n = 1; n <= limit; ++n) {
    w = clock_register(single, 0, w);
    if (w == start) return n;
  }
  return 0;
}

std::vector<unsigned> find_maximal_taps(unsigned length) {
  if (length < 2 || length > 24) throw std::invalid_argument("tap search supports lengths 2..24");
  const std::uint64_t full = (std::uint64_t{1} << length) - 1;
  const unsigned msb = length - 1;
  auto maximal = [&](const std::vector<unsigned>& taps) {
    return register_period(RegisterSpec{length, taps, 0}) == full;
  };
  for (unsigned a = 0; a < msb; ++a) {
    std::vector<unsigned> taps{a, msb};
    if (maximal(taps)) return taps;
  }
  for (unsigned a = 0; a < msb; ++a)
    for (unsigned b = a + 1; b < msb; ++b)
      for (unsigned c = b + 1; c < msb; ++c) {
        std::vector<unsigned> taps{a, b, c, msb};
        if (maximal(taps)) return taps;
      }
  throw std::invalid_argument("no maximal-length tap set of size 2 or 4 for length " +
                              std::to_string(length));
}

const CipherSpec& mini_spec() {
  static const CipherSpec spec({
      RegisterSpec{7, find_maximal_taps(7), 3},
      RegisterSpec{9, find_maximal_taps(9), 4},
      RegisterSpec{10, find_maximal_taps(10), 4},
  });
  return spec;
}

std::vector<CipherState> brute_force_matches(const CipherSpec& spec, const Keystream& ks,
                                             std::optional<Word> r1_fixed, Alignment alignment,
                                             unsigned workers) {
  const unsigned free_bits =
      (r1_fixed ? 0 : spec.length(0)) + spec.length(1) + spec.length(2);
  if (free_bits > kBruteForceMaxBits)
    throw std::invalid_argument("brute force over 2^" + std::to_string(free_bits) +
                                " states refused (limit 2^26)");
  if (r1_fixed && (*r1_fixed & ~spec.mask(0)))
    throw std::invalid_argument("fixed R1 does not fit the register");

  const Word r1_lo = r1_fixed ? *r1_fixed : 0;
  const Word r1_hi = r1_fixed ? *r1_fixed : spec.mask(0);
  const std::uint64_t n1 = std::uint64_t{r1_hi} - r1_lo + 1;
  workers = static_cast<unsigned>(std::clamp<std::uint64_t>(workers, 1, n1));

  // Worker w takes R1 values r1_lo + w, r1_lo + w + workers, ...; results are
  // sorted at the end so the split never shows.
  std::vector<std::vector<CipherState>> found(workers);
  auto run = [&](unsigned w) {
    constexpr std::size_t kBatch = 4096;
    std::vector<CipherState> batch;
    batch.reserve(kBatch);
    std::vector<std::uint8_t> hit(kBatch);
    auto flush = [&] {
      kernels::match_keystream(spec, batch, ks, alignment, hit);
      for (std::size_t i = 0; i < batch.size(); ++i)
        if (hit[i]) found[w].push_back(batch[i]);
      batch.clear();
    };
    for (std::uint64_t r1 = r1_lo + w; r1 <= r1_hi; r1 += workers)
      for (Word r2 = 0; r2 <= spec.mask(1); ++r2)
        for (Word r3 = 0; r3 <= spec.mask(2); ++r3) {
          batch.push_back({static_cast<Word>(r1), r2, r3});
          if (batch.size() == kBatch) flush();
        }
    if (!batch.empty()) flush();
  };
  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run, w);
    for (auto& t : pool) t.join();
  }
  std::vector<CipherState> out;
  for (auto& f : found) out.insert(out.end(), f.begin(), f.end());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace a51
