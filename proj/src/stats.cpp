#include "a51/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace a51 {

GrowthStats growth_counts(const CipherSpec& spec, Word r1_guess, const Keystream& ks,
                          unsigned max_round, BranchPolicy policy, Alignment alignment) {
  if (max_round == 0) throw std::invalid_argument("max_round must be at least 1");
  if (std::size_t{max_round} + 1 > ks.size())
    throw std::invalid_argument("growth to round " + std::to_string(max_round) + " needs " +
                                std::to_string(max_round + 1) + " keystream bits");
  AttackOptions opt;
  opt.policy = policy;
  opt.alignment = alignment;
  opt.max_rounds = max_round;
  Determiner det(spec, ks, opt);
  RoundCounts counts;
  walk(det, r1_guess, &counts);
  counts.live.resize(max_round + 1u, 0);
  counts.completes.resize(max_round + 1u, 0);

  GrowthStats stats;
  std::uint64_t complete = 0;
  for (unsigned r = 1; r <= max_round; ++r) {
    complete += counts.completes[r];
    GrowthRow row;
    row.round = r;
    row.complete = complete;
    row.total = counts.live[r] + complete;
    row.ratio = row.total ? static_cast<double>(row.complete) / static_cast<double>(row.total) : 0.0;
    stats.rows.push_back(row);
  }
  return stats;
}

RoundsSample rounds_experiment(unsigned trials, std::uint64_t seed) {
  if (trials == 0) throw std::invalid_argument("rounds_experiment needs at least one trial");
  const CipherSpec& spec = CipherSpec::a51();
  std::mt19937_64 rng(seed);
  RoundsSample out;
  for (unsigned i = 0; i < trials; ++i) {
    CipherState s{static_cast<Word>(rng()) & spec.mask(0), static_cast<Word>(rng()) & spec.mask(1),
                  static_cast<Word>(rng()) & spec.mask(2)};
    unsigned t2 = 0, t3 = 0, n = 0;
    while (t2 < 10 || t3 < 11) {
      const StepResult r = step(spec, s);
      s = r.state;
      t2 += (r.clocked >> 1) & 1u;
      t3 += (r.clocked >> 2) & 1u;
      ++n;
    }
    out.rounds.push_back(n);
  }
  const double sum = std::accumulate(out.rounds.begin(), out.rounds.end(), 0.0);
  out.mean = sum / trials;
  double sq = 0.0;
  for (unsigned r : out.rounds) sq += (r - out.mean) * (r - out.mean);
  out.stddev = trials > 1 ? std::sqrt(sq / (trials - 1)) : 0.0;
  out.min = *std::min_element(out.rounds.begin(), out.rounds.end());
  out.max = *std::max_element(out.rounds.begin(), out.rounds.end());
  return out;
}

Rational::Rational(std::int64_t n, std::int64_t d) {
  if (d == 0) throw std::invalid_argument("zero denominator");
  if (d < 0) {
    n = -n;
    d = -d;
  }
  const std::int64_t g = std::gcd(n, d);
  num = g ? n / g : 0;
  den = g ? d / g : 1;
}

Rational operator+(Rational a, Rational b) { return {a.num * b.den + b.num * a.den, a.den * b.den}; }
Rational operator*(Rational a, Rational b) { return {a.num * b.num, a.den * b.den}; }
Rational operator/(Rational a, Rational b) {
  if (b.num == 0) throw std::invalid_argument("division by zero");
  return {a.num * b.den, a.den * b.num};
}

Rational expected_rounds_formula(const RoundExpectationModel& m) {
  for (const Rational& p : {m.p_n1, m.p_n2a, m.p_n2b})
    if (p.num < 0) throw std::invalid_argument("negative probability");
  const Rational total = m.p_n1 + m.p_n2a + m.p_n2b;
  if (!(total == Rational{1})) throw std::invalid_argument("event probabilities must sum to 1");
  const Rational two_reg = Rational{m.x2} * m.p_n2a + Rational{m.x3} * m.p_n2b;
  return (Rational{m.x1} * m.p_n1 + Rational{2} * two_reg) / total;
}

std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("empty draw range");
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound + 1) % bound;
  for (;;) {
    const std::uint64_t x = rng();
    if (x <= limit) return x % bound;
  }
}

TreeEstimate estimate_complete_count(const CipherSpec& spec, Word r1_guess, const Keystream& ks,
                                     std::uint64_t probes, std::uint64_t seed,
                                     const AttackOptions& options) {
  if (probes == 0) throw std::invalid_argument("estimate needs at least one probe");
  AttackOptions opt = options;
  opt.max_rounds = 0;
  Determiner det(spec, ks, opt);
  std::mt19937_64 rng(seed);

  const std::vector<StateCandidate> roots = det.initial(r1_guess);
  std::vector<StateCandidate> children;
  std::uint64_t pruned = 0;
  double sum = 0.0, sum_sq = 0.0;
  for (std::uint64_t p = 0; p < probes; ++p) {
    double value = 0.0;
    if (!roots.empty()) {
      double weight = static_cast<double>(roots.size());
      StateCandidate c = roots[uniform_below(rng, roots.size())];
      for (;;) {
        if (det.is_stopped(c) || c.consumed >= ks.size()) {
          value = weight * static_cast<double>(det.fill_count(c));
          break;
        }
        children.clear();
        det.append_advance(c, children, pruned);
        if (children.empty()) break;
        weight *= static_cast<double>(children.size());
        c = children[uniform_below(rng, children.size())];
      }
    }
    sum += value;
    sum_sq += value * value;
  }
  TreeEstimate est;
  est.probes = probes;
  est.estimate = sum / static_cast<double>(probes);
  if (probes > 1) {
    const double n = static_cast<double>(probes);
    const double var = std::max(0.0, (sum_sq - sum * sum / n) / (n - 1));
    est.std_error = std::sqrt(var / n);
  }
  return est;
}

}  // namespace a51
