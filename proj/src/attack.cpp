#include "a51/attack.hpp"

#include <algorithm>
#include <bit>
#include <cassert>
#include <stdexcept>
#include <string>

#include "a51/kernels.hpp"

namespace a51 {
namespace {

inline unsigned parity(Word w) { return static_cast<unsigned>(std::popcount(w)) & 1u; }

inline Word top_bit(Word w) { return Word{1} << (31 - std::countl_zero(w)); }

template <class F>
inline void for_each_submask(Word mask, F&& f) {
  Word sub = 0;
  do {
    f(sub);
    sub = (sub - mask) & mask;
  } while (sub != 0);
}

unsigned stop_rule(const RegisterSpec& reg) {
  const int below_msb = static_cast<int>(reg.msb()) - static_cast<int>(reg.clock_bit) - 1;
  return static_cast<unsigned>(std::max(below_msb, static_cast<int>(reg.clock_bit)));
}

Word low_taps(const RegisterSpec& reg) {
  Word m = 0;
  for (unsigned t : reg.taps)
    if (t < reg.clock_bit) m |= Word{1} << t;
  return m;
}

// Depth-first search over the determination tree with an explicit stack.
// `leaf` receives every stopped (or keystream-exhausted) candidate.
template <class Leaf>
AttackReport search(const Determiner& det, Word r1_guess, RoundCounts* counts, Leaf&& leaf) {
  const CipherSpec& spec = det.spec();
  const Keystream& ks = det.keystream();
  const AttackOptions& opt = det.options();

  AttackReport rep;
  rep.guesses = 1;

  std::vector<StateCandidate> stack;
  stack.reserve(1024);
  if (opt.alignment == Alignment::first_output)
    det.append_phase1(det.root(r1_guess), stack, rep.leaves_pruned);
  else
    stack.push_back(det.root(r1_guess));
  rep.peak_live_candidates = stack.size();

  auto account = [&](const StateCandidate& c) {
    if (!counts) return;
    if (counts->live.size() <= c.rounds) {
      counts->live.resize(c.rounds + 1u, 0);
      counts->completes.resize(c.rounds + 1u, 0);
    }
    if (det.is_stopped(c))
      counts->completes[c.rounds] += det.fill_count(c);
    else
      ++counts->live[c.rounds];
  };

  auto emit = [&](const StateCandidate& c) {
    rep.candidates_emitted += det.fill_count(c);
    if (rep.min_emitted_rounds == 0 || c.rounds < rep.min_emitted_rounds)
      rep.min_emitted_rounds = c.rounds;
#ifndef NDEBUG
    const bool check = true;
#else
    const bool check = opt.verify_emissions;
#endif
    if (check) {
      for (const CompleteStateCandidate& full : det.materialize(c)) {
        const bool sound = matching_prefix(spec, full.state, ks, opt.alignment) >= c.consumed;
        assert(sound || opt.verify_emissions);
        if (!sound) ++rep.soundness_violations;
      }
    }
    leaf(c);
  };

  while (!stack.empty()) {
    const StateCandidate c = stack.back();
    stack.pop_back();
    if (det.is_stopped(c)) {
      emit(c);
      continue;
    }
    if (opt.max_rounds != 0 && c.rounds >= opt.max_rounds) continue;
    if (c.consumed >= ks.size()) {
      // No keystream left to split on: hand the partial state over whole so
      // post-processing keeps the search complete.
      ++rep.exhausted_paths;
      emit(c);
      continue;
    }
    const std::size_t before = stack.size();
    det.append_advance(c, stack, rep.leaves_pruned);
    if (stack.size() > before) rep.max_depth = std::max<unsigned>(rep.max_depth, c.rounds + 1u);
    for (std::size_t i = before; i < stack.size(); ++i) account(stack[i]);
    rep.peak_live_candidates = std::max<std::uint64_t>(rep.peak_live_candidates, stack.size());
  }
  return rep;
}

void require_attack_keystream(const Keystream& ks) {
  if (ks.size() < kPostProcessBits)
    throw std::invalid_argument("attack needs at least 64 keystream bits, got " +
                                std::to_string(ks.size()));
}

}  // namespace

void AttackReport::merge(const AttackReport& o) {
  matches.insert(matches.end(), o.matches.begin(), o.matches.end());
  std::sort(matches.begin(), matches.end());
  guesses += o.guesses;
  candidates_emitted += o.candidates_emitted;
  leaves_pruned += o.leaves_pruned;
  exhausted_paths += o.exhausted_paths;
  soundness_violations += o.soundness_violations;
  peak_live_candidates = std::max(peak_live_candidates, o.peak_live_candidates);
  max_depth = std::max(max_depth, o.max_depth);
  if (o.min_emitted_rounds != 0 &&
      (min_emitted_rounds == 0 || o.min_emitted_rounds < min_emitted_rounds))
    min_emitted_rounds = o.min_emitted_rounds;
}

Determiner::Determiner(const CipherSpec& spec, Keystream ks, AttackOptions options)
    : spec_(spec),
      ks_(std::move(ks)),
      options_(options),
      r2_(spec.reg(1), static_cast<unsigned>(ks_.size()) + 1),
      r3_(spec.reg(2), static_cast<unsigned>(ks_.size()) + 1),
      d2_(stop_rule(spec.reg(1))),
      d3_(stop_rule(spec.reg(2))),
      eager_r3_bits_(options.policy == BranchPolicy::paper_eager_r37 ? low_taps(spec.reg(2)) : 0) {
  if (ks_.empty()) throw std::invalid_argument("empty keystream");
  if (ks_.size() > 0xfff0) throw std::invalid_argument("keystream too long");
}

StateCandidate Determiner::root(Word r1_guess) const {
  if (r1_guess & ~spec_.mask(0))
    throw std::invalid_argument("R1 guess does not fit a " + std::to_string(spec_.length(0)) +
                                "-bit register");
  StateCandidate c;
  c.r1_fill = c.r1 = r1_guess;
  return c;
}

std::vector<StateCandidate> Determiner::initial(Word r1_guess) const {
  std::vector<StateCandidate> out;
  if (options_.alignment == Alignment::first_output) {
    std::uint64_t pruned = 0;
    append_phase1(root(r1_guess), out, pruned);
  } else {
    out.push_back(root(r1_guess));
  }
  return out;
}

// Appends every extension of `cand` with parity(f2 . r2) ^ parity(f3 . r3)
// equal to `target`. One unknown cell (the pivot, taken from R3 when R3 has
// any) is forced; the others are split both ways.
void Determiner::append_solutions(const StateCandidate& cand, Word f2, Word f3, unsigned target,
                                  std::vector<StateCandidate>& out, std::uint64_t& pruned) const {
  const Word u2 = f2 & ~cand.r2.known;
  const Word u3 = f3 & ~cand.r3.known;
  if ((u2 | u3) == 0) {
    if ((parity(f2 & cand.r2.value) ^ parity(f3 & cand.r3.value)) == target)
      out.push_back(cand);
    else
      ++pruned;
    return;
  }
  const Word pivot3 = u3 ? top_bit(u3) : 0;
  const Word pivot2 = u3 ? 0 : top_bit(u2);
  const Word free2 = u2 & ~pivot2;
  const Word free3 = u3 & ~pivot3;
  for_each_submask(free2, [&](Word sub2) {
    for_each_submask(free3, [&](Word sub3) {
      StateCandidate child = cand;
      child.r2.known |= free2 | pivot2;
      child.r2.value |= sub2;
      child.r3.known |= free3 | pivot3;
      child.r3.value |= sub3;
      if (parity(f2 & child.r2.value) ^ parity(f3 & child.r3.value) ^ target) {
        child.r2.value |= pivot2;
        child.r3.value |= pivot3;
      }
      out.push_back(child);
    });
  });
}

void Determiner::append_phase1(const StateCandidate& cand, std::vector<StateCandidate>& out,
                               std::uint64_t& pruned) const {
  if (cand.rounds != 0 || cand.consumed != 0)
    throw std::logic_error("phase1_round0 applies to a root candidate only");
  const Word f2 = r2_.form_at(cand.r2, r2_.msb());
  const Word f3 = r3_.form_at(cand.r3, r3_.msb());
  const unsigned target = ks_[0] ^ ((cand.r1 >> spec_.msb(0)) & 1u);
  const std::size_t first = out.size();
  append_solutions(cand, f2, f3, target, out, pruned);
  for (std::size_t i = first; i < out.size(); ++i) out[i].consumed = 1;
}

std::vector<StateCandidate> Determiner::phase1_round0(const StateCandidate& cand) const {
  std::vector<StateCandidate> out;
  std::uint64_t pruned = 0;
  append_phase1(cand, out, pruned);
  return out;
}

std::vector<StateCandidate> Determiner::branch_clocking_bits(const StateCandidate& cand) const {
  const Word u2 = r2_.form_at(cand.r2, r2_.clock_bit()) & ~cand.r2.known;
  const Word u3 = r3_.form_at(cand.r3, r3_.clock_bit()) & ~cand.r3.known;
  std::vector<StateCandidate> out;
  for_each_submask(u2, [&](Word sub2) {
    for_each_submask(u3, [&](Word sub3) {
      StateCandidate child = cand;
      child.r2.known |= u2;
      child.r2.value |= sub2;
      child.r3.known |= u3;
      child.r3.value |= sub3;
      out.push_back(child);
    });
  });
  return out;
}

unsigned Determiner::clockset(const StateCandidate& cand) const {
  const TriBit b2 = resolve(cand.r2, r2_.form_at(cand.r2, r2_.clock_bit()));
  const TriBit b3 = resolve(cand.r3, r3_.form_at(cand.r3, r3_.clock_bit()));
  if (b2 == TriBit::unknown || b3 == TriBit::unknown)
    throw std::logic_error("clocking bits must be concrete before the majority vote");
  const unsigned c1 = (cand.r1 >> spec_.clock_bit(0)) & 1u;
  const unsigned c2 = b2 == TriBit::one;
  const unsigned c3 = b3 == TriBit::one;
  const unsigned m = majority(c1, c2, c3);
  return unsigned(c1 == m) | (unsigned(c2 == m) << 1) | (unsigned(c3 == m) << 2);
}

std::vector<StateCandidate> Determiner::lookahead_constrain(const StateCandidate& cand,
                                                            unsigned clocked,
                                                            unsigned ks_next) const {
  const Word f2 = r2_.form_at(cand.r2, (clocked & 2u) ? r2_.msb() - 1 : r2_.msb());
  const Word f3 = r3_.form_at(cand.r3, (clocked & 4u) ? r3_.msb() - 1 : r3_.msb());
  const unsigned r1_bit = (cand.r1 >> ((clocked & 1u) ? spec_.msb(0) - 1 : spec_.msb(0))) & 1u;
  std::vector<StateCandidate> out;
  std::uint64_t pruned = 0;
  append_solutions(cand, f2, f3, (ks_next & 1u) ^ r1_bit, out, pruned);
  return out;
}

void Determiner::finish_round(StateCandidate& c, unsigned clocked) const {
  if (clocked & 1u) {
    c.r1 = clock_register(spec_, 0, c.r1);
    ++c.t1;
  }
  if (clocked & 2u) ++c.r2.t;
  if (clocked & 4u) ++c.r3.t;
  ++c.rounds;
  ++c.consumed;
}

void Determiner::append_advance(const StateCandidate& cand, std::vector<StateCandidate>& out,
                                std::uint64_t& pruned) const {
  if (cand.consumed >= ks_.size())
    throw std::out_of_range("keystream exhausted at bit " + std::to_string(cand.consumed));
  const unsigned ks_next = ks_[cand.consumed];
  const unsigned c1 = (cand.r1 >> spec_.clock_bit(0)) & 1u;
  const Word cb2 = r2_.form_at(cand.r2, r2_.clock_bit());
  const Word cb3 = r3_.form_at(cand.r3, r3_.clock_bit());
  const Word u2 = cb2 & ~cand.r2.known;
  const Word u3 = cb3 & ~cand.r3.known;
  const bool eager = eager_r3_bits_ != 0 && cand.rounds == 0;

  for_each_submask(u2, [&](Word sub2) {
    for_each_submask(u3, [&](Word sub3) {
      StateCandidate b = cand;
      b.r2.known |= u2;
      b.r2.value |= sub2;
      b.r3.known |= u3;
      b.r3.value |= sub3;

      const unsigned c2 = parity(cb2 & b.r2.value);
      const unsigned c3 = parity(cb3 & b.r3.value);
      const unsigned m = majority(c1, c2, c3);
      const unsigned clocked = unsigned(c1 == m) | (unsigned(c2 == m) << 1) | (unsigned(c3 == m) << 2);

      const Word f2 = r2_.form_at(b.r2, (clocked & 2u) ? r2_.msb() - 1 : r2_.msb());
      const Word f3 = r3_.form_at(b.r3, (clocked & 4u) ? r3_.msb() - 1 : r3_.msb());
      const unsigned r1_bit = (b.r1 >> ((clocked & 1u) ? spec_.msb(0) - 1 : spec_.msb(0))) & 1u;

      const std::size_t first = out.size();
      append_solutions(b, f2, f3, ks_next ^ r1_bit, out, pruned);

      if (eager) {
        const std::size_t last = out.size();
        for (std::size_t i = first; i < last; ++i) {
          const Word free = eager_r3_bits_ & ~out[i].r3.known;
          if (free == 0) continue;
          out[i].r3.known |= free;
          const StateCandidate base = out[i];
          for (Word sub = free; sub != 0; sub = (sub - 1) & free) {
            StateCandidate copy = base;
            copy.r3.value |= sub;
            out.push_back(copy);
          }
        }
      }
      for (std::size_t i = first; i < out.size(); ++i) finish_round(out[i], clocked);
    });
  });
}

std::vector<StateCandidate> Determiner::advance_round(const StateCandidate& cand) const {
  std::vector<StateCandidate> out;
  std::uint64_t pruned = 0;
  append_advance(cand, out, pruned);
  return out;
}

std::uint64_t Determiner::fill_count(const StateCandidate& c) const {
  const int u = std::popcount(r2_.mask() & ~c.r2.known) + std::popcount(r3_.mask() & ~c.r3.known);
  return std::uint64_t{1} << u;
}

std::vector<CompleteStateCandidate> Determiner::materialize(const StateCandidate& c) const {
  std::vector<CompleteStateCandidate> out;
  out.reserve(fill_count(c));
  for_each_fill(c.r2, r2_.mask(), [&](Word f2) {
    for_each_fill(c.r3, r3_.mask(), [&](Word f3) {
      out.push_back({CipherState{c.r1_fill, f2, f3}, c.rounds});
    });
  });
  return out;
}

AttackReport enumerate(const CipherSpec& spec, Word r1_guess, const Keystream& ks,
                       const AttackOptions& options, const CompleteSink& sink,
                       RoundCounts* counts) {
  require_attack_keystream(ks);
  Determiner det(spec, ks, options);
  const Word m2 = spec.mask(1);
  const Word m3 = spec.mask(2);
  return search(det, r1_guess, counts, [&](const StateCandidate& c) {
    if (!sink) return;
    for_each_fill(c.r2, m2, [&](Word f2) {
      for_each_fill(c.r3, m3, [&](Word f3) { sink({CipherState{c.r1_fill, f2, f3}, c.rounds}); });
    });
  });
}

AttackReport walk(const Determiner& det, Word r1_guess, RoundCounts* counts) {
  return search(det, r1_guess, counts, [](const StateCandidate&) {});
}

bool post_process(const CipherSpec& spec, const CompleteStateCandidate& cand, const Keystream& ks,
                  Alignment alignment) {
  require_attack_keystream(ks);
  return matching_prefix(spec, cand.state, ks.prefix(kPostProcessBits), alignment) ==
         kPostProcessBits;
}

AttackReport attack_single_guess(const CipherSpec& spec, Word r1_guess, const Keystream& ks,
                                 const AttackOptions& options) {
  require_attack_keystream(ks);
  Determiner det(spec, ks, options);
  const Keystream check = ks.prefix(kPostProcessBits);
  const Word m2 = spec.mask(1);
  const Word m3 = spec.mask(2);

  constexpr std::size_t kBatch = 4096;
  std::vector<CipherState> batch;
  std::vector<std::uint16_t> rounds;
  std::vector<std::uint8_t> hit(kBatch + 64);
  std::vector<CompleteStateCandidate> matches;
  batch.reserve(kBatch + 64);
  rounds.reserve(kBatch + 64);

  auto flush = [&] {
    if (batch.empty()) return;
    kernels::match_keystream(spec, batch, check, options.alignment, hit);
    for (std::size_t i = 0; i < batch.size(); ++i)
      if (hit[i]) matches.push_back({batch[i], rounds[i]});
    batch.clear();
    rounds.clear();
  };

  AttackReport rep = search(det, r1_guess, nullptr, [&](const StateCandidate& c) {
    for_each_fill(c.r2, m2, [&](Word f2) {
      for_each_fill(c.r3, m3, [&](Word f3) {
        batch.push_back({c.r1_fill, f2, f3});
        rounds.push_back(c.rounds);
        if (batch.size() >= kBatch) flush();
      });
    });
  });
  flush();
  std::sort(matches.begin(), matches.end());
  rep.matches = std::move(matches);
  return rep;
}

}  // namespace a51
