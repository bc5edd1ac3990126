#include "exlift/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

#include "exlift/log_space.hpp"
#include "parallel.hpp"

namespace exlift {

namespace {

// Fixed split of the world range, so results do not depend on jobs.
constexpr std::size_t kChunks = 64;

struct Mask {
  std::uint64_t mask = 0;
  std::uint64_t value = 0;
  bool matches(std::uint64_t bits) const { return (bits & mask) == value; }
};

Mask mask_of(const Evidence& e, std::size_t n) {
  Mask m;
  for (auto [a, v] : e) {
    if (a >= n) throw std::invalid_argument("evidence names an unknown atom");
    m.mask |= std::uint64_t{1} << a;
    if (v) m.value |= std::uint64_t{1} << a;
  }
  return m;
}

void check_cap(std::size_t n, const OracleOptions& options) {
  if (n > options.cap || n > 62) throw OracleCapError(n, std::min<std::size_t>(options.cap, 62));
}

template <class Fn>
void for_chunks(std::size_t n, unsigned jobs, Fn&& fn) {
  const std::uint64_t total = std::uint64_t{1} << n;
  const std::size_t chunks = std::min<std::uint64_t>(kChunks, total);
  const std::uint64_t step = total / chunks;
  detail::run_chunks(chunks, detail::worker_count(jobs, chunks), [&](unsigned, std::size_t c) {
    fn(c, c * step, c + 1 == chunks ? total : (c + 1) * step);
  });
}

}  // namespace

OracleCapError::OracleCapError(std::size_t atoms, std::size_t cap)
    : std::runtime_error("oracle would enumerate " + std::to_string(atoms) + " atoms; the cap is " +
                         std::to_string(cap)) {}

std::vector<double> brute_log_masses(const GroundModel& model, std::span<const Evidence> evidences,
                                     const OracleOptions& options) {
  const std::size_t n = model.atom_count();
  check_cap(n, options);
  std::vector<Mask> masks;
  for (const auto& e : evidences) masks.push_back(mask_of(e, n));
  masks.push_back(Mask{});

  std::vector<std::vector<LogSumExp>> acc(kChunks, std::vector<LogSumExp>(masks.size()));
  for_chunks(n, options.jobs, [&](std::size_t c, std::uint64_t lo, std::uint64_t hi) {
    for (std::uint64_t bits = lo; bits < hi; ++bits) {
      const double w = model.log_weight_bits(bits);
      for (std::size_t r = 0; r < masks.size(); ++r)
        if (masks[r].matches(bits)) acc[c][r].add(w);
    }
  });
  std::vector<LogSumExp> total(masks.size());
  for (const auto& chunk : acc)
    for (std::size_t r = 0; r < total.size(); ++r) total[r].merge(chunk[r]);
  std::vector<double> out;
  for (const auto& t : total) out.push_back(t.value());
  return out;
}

OracleResult brute_marginal(const GroundModel& model, const Evidence& e, const OracleOptions& options) {
  const Evidence sets[] = {e};
  auto masses = brute_log_masses(model, sets, options);
  OracleResult r;
  r.log_partition = masses[1];
  r.feasible = masses[0] != kNegInf;
  r.probability = r.feasible ? std::exp(masses[0] - masses[1]) : 0.0;
  return r;
}

OracleResult brute_mpe(const GroundModel& model, const Evidence& e, const OracleOptions& options) {
  const std::size_t n = model.atom_count();
  check_cap(n, options);
  const Mask m = mask_of(e, n);
  struct Best {
    bool found = false;
    std::uint64_t bits = 0;
    double log_weight = 0.0;
    LogSumExp z;
  };
  std::vector<Best> best(kChunks);
  for_chunks(n, options.jobs, [&](std::size_t c, std::uint64_t lo, std::uint64_t hi) {
    Best& b = best[c];
    for (std::uint64_t bits = lo; bits < hi; ++bits) {
      const double w = model.log_weight_bits(bits);
      b.z.add(w);
      if (!m.matches(bits)) continue;
      if (!b.found || w > b.log_weight) {
        b.found = true;
        b.bits = bits;
        b.log_weight = w;
      }
    }
  });
  OracleResult r;
  r.feasible = false;
  LogSumExp z;
  std::uint64_t winner = 0;
  for (const auto& b : best) {
    z.merge(b.z);
    if (b.found && (!r.feasible || b.log_weight > r.log_weight)) {
      r.feasible = true;
      r.log_weight = b.log_weight;
      winner = b.bits;
    }
  }
  r.log_partition = z.value();
  r.probability = std::nan("");
  if (r.feasible) r.world = World::from_bits(winner, n);
  return r;
}

OracleResult brute_marginal_mpe(const GroundModel& model, std::span<const AtomId> maximized, const Evidence& e,
                                const OracleOptions& options) {
  const std::size_t n = model.atom_count();
  check_cap(n, options);
  std::vector<AtomId> keep(maximized.begin(), maximized.end());
  std::sort(keep.begin(), keep.end());
  keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
  for (auto a : keep)
    if (a >= n) throw std::invalid_argument("maximized atom out of range");
  const Mask m = mask_of(e, n);
  const std::size_t keys = std::size_t{1} << keep.size();

  std::vector<std::vector<LogSumExp>> acc(kChunks);
  std::vector<LogSumExp> z(kChunks);
  for_chunks(n, options.jobs, [&](std::size_t c, std::uint64_t lo, std::uint64_t hi) {
    acc[c].resize(keys);
    for (std::uint64_t bits = lo; bits < hi; ++bits) {
      const double w = model.log_weight_bits(bits);
      z[c].add(w);
      if (!m.matches(bits)) continue;
      std::size_t key = 0;
      for (std::size_t i = 0; i < keep.size(); ++i)
        if ((bits >> keep[i]) & 1) key |= std::size_t{1} << i;
      acc[c][key].add(w);
    }
  });
  std::vector<LogSumExp> mass(keys);
  LogSumExp total;
  for (std::size_t c = 0; c < kChunks; ++c) {
    total.merge(z[c]);
    for (std::size_t key = 0; key < acc[c].size(); ++key) mass[key].merge(acc[c][key]);
  }
  OracleResult r;
  r.feasible = false;
  r.log_partition = total.value();
  r.probability = std::nan("");
  std::size_t winner = 0;
  for (std::size_t key = 0; key < keys; ++key) {
    if (mass[key].empty()) continue;
    const double v = mass[key].value();
    if (!r.feasible || v > r.log_weight) {
      r.feasible = true;
      r.log_weight = v;
      winner = key;
    }
  }
  if (r.feasible) {
    r.world = World(n);
    for (std::size_t i = 0; i < keep.size(); ++i) r.world.set(keep[i], (winner >> i) & 1);
  }
  return r;
}

std::map<Statistic, BigInt> brute_suborbit_histogram(const Evidence& e, const Decomposition& decomp,
                                                     std::size_t cap) {
  if (decomp.scope_size() > cap || decomp.scope_size() > 62) throw OracleCapError(decomp.scope_size(), cap);
  const std::size_t k = decomp.block_count();
  const std::size_t w = decomp.width();
  // Scope positions in block-major order; evidence fixes some of them.
  std::vector<int> fixed(k * w, -1);
  for (auto [a, v] : e) {
    auto slot = decomp.locate(a);
    if (!slot) throw std::invalid_argument("evidence atom outside the decomposition");
    fixed[slot->block * w + slot->position] = v ? 1 : 0;
  }
  std::vector<std::size_t> free;
  for (std::size_t i = 0; i < fixed.size(); ++i)
    if (fixed[i] < 0) free.push_back(i);

  std::vector<std::uint8_t> bits(k * w, 0);
  for (std::size_t i = 0; i < fixed.size(); ++i)
    if (fixed[i] > 0) bits[i] = 1;
  std::map<Statistic, std::uint64_t> counts;
  Statistic s(bit_pattern_count(w));
  const std::uint64_t assignments = std::uint64_t{1} << free.size();
  for (std::uint64_t x = 0; x < assignments; ++x) {
    for (std::size_t i = 0; i < free.size(); ++i) bits[free[i]] = (x >> i) & 1;
    std::fill(s.begin(), s.end(), 0);
    for (std::size_t b = 0; b < k; ++b) {
      std::size_t pattern = 0;
      for (std::size_t p = 0; p < w; ++p) pattern = pattern * 2 + bits[b * w + p];
      ++s[pattern];
    }
    ++counts[s];
  }
  std::map<Statistic, BigInt> out;
  for (const auto& [t, n] : counts) out.emplace(t, BigInt(static_cast<unsigned long>(n)));
  return out;
}

BigInt brute_suborbit(const Statistic& t, const Evidence& e, const Decomposition& decomp, std::size_t cap) {
  if (t.size() != bit_pattern_count(decomp.width()))
    throw std::invalid_argument("statistic has the wrong length for the width");
  const auto histogram = brute_suborbit_histogram(e, decomp, cap);
  auto it = histogram.find(t);
  return it == histogram.end() ? BigInt(0) : it->second;
}

}  // namespace exlift
