#pragma once

// Philox4x32-10 counter-based pseudo-random generator (Salmon, Moraes,
// Dror, Shaw: "Parallel random numbers: as easy as 1, 2, 3", 2011), plus a
// splittable-stream interface and the samplers used throughout the library.
//
// Counter-based generation makes reproducibility trivial under parallelism:
// every logical work item (trial, strand, read, ...) folds its identifiers
// into a child generator, and the random values it sees depend only on
// (seed, identifiers), never on scheduling or thread count.
//
// Layout: the 64-bit Philox key is derived from the seed (and re-derived on
// each fold); the 128-bit counter holds a 64-bit block index in words 0..1,
// word 3 = 0 for generation and 1 for key derivation, so derivation blocks
// can never collide with generation blocks of the same stream.

#include <array>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace dnastore {

class Philox {
 public:
  using result_type = std::uint32_t;

  explicit Philox(std::uint64_t seed)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)} {}

  /// Child generator for the given identifier.  Folding is stateless with
  /// respect to the parent's position: `g.fold(i)` yields the same stream no
  /// matter how much (or little) `g` has generated.  Chain folds for nested
  /// identifiers: `root.fold(trial).fold(read)`.
  [[nodiscard]] Philox fold(std::uint64_t id) const {
    std::array<std::uint32_t, 4> ctr = {static_cast<std::uint32_t>(id),
                                        static_cast<std::uint32_t>(id >> 32), 0u, 1u};
    const std::array<std::uint32_t, 4> out = block(ctr, key_);
    Philox child(0);
    child.key_ = {out[0], out[1]};
    return child;
  }

  [[nodiscard]] Philox fold(std::initializer_list<std::uint64_t> ids) const {
    Philox g = *this;
    for (std::uint64_t id : ids) g = g.fold(id);
    return g;
  }

  std::uint32_t next_u32() {
    if (buf_pos_ == 4) refill();
    return buf_[buf_pos_++];
  }

  std::uint64_t next_u64() {
    const std::uint64_t lo = next_u32();
    const std::uint64_t hi = next_u32();
    return lo | (hi << 32);
  }

  /// Uniform double in [0, 1), 53 random bits.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return next_double() < p; }

  /// Uniform integer in [0, n), unbiased (rejection sampling).
  std::uint64_t below(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("Philox::below(0)");
    const std::uint64_t rem = (~std::uint64_t{0} % n + 1) % n;  // 2^64 mod n
    const std::uint64_t limit = ~std::uint64_t{0} - rem;        // last accepted value
    std::uint64_t x = next_u64();
    while (x > limit) x = next_u64();
    return x % n;
  }

  /// Sample an index with probability proportional to weights[i].
  std::size_t categorical(std::span<const double> weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    double u = next_double() * total;
    for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
      u -= weights[i];
      if (u < 0.0) return i;
    }
    return weights.empty() ? throw std::invalid_argument("Philox::categorical: empty")
                           : weights.size() - 1;
  }

  /// In-place Fisher-Yates shuffle.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  // UniformRandomBitGenerator interface (for interoperability; the library's
  // own samplers above are what guarantee cross-platform determinism).
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return 0xFFFFFFFFu; }
  result_type operator()() { return next_u32(); }

  /// One raw Philox4x32-10 block (exposed for known-answer tests).
  static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> ctr,
                                            std::array<std::uint32_t, 2> key) {
    constexpr std::uint32_t kM0 = 0xD2511F53u, kM1 = 0xCD9E8D57u;
    constexpr std::uint32_t kW0 = 0x9E3779B9u, kW1 = 0xBB67AE85u;
    for (int round = 0;; ++round) {
      const std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * ctr[0];
      const std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * ctr[2];
      const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
      const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
      const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
      const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
      ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
      if (round == 9) return ctr;
      key[0] += kW0;
      key[1] += kW1;
    }
  }

 private:
  void refill() {
    buf_ = block({static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
                  0u, 0u},
                 key_);
    ++block_;
    buf_pos_ = 0;
  }

  std::array<std::uint32_t, 2> key_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buf_ = {};
  int buf_pos_ = 4;
};

}  // namespace dnastore
