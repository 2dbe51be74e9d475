#pragma once

// Full sampling channel over a pool of M strands: multinomial draw with
// per-strand probabilities, random reverse complementing, per-copy
// transmission through direction-specific IDS models, and a final uniform
// permutation.  The trace-reconstruction variant draws every strand exactly
// A times, keeps grouping by origin, and skips the permutation.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "dnastore/gf4.hpp"
#include "dnastore/ioutil.hpp"
#include "dnastore/kmer_channel.hpp"
#include "dnastore/parallel.hpp"
#include "dnastore/rng.hpp"

namespace dnastore::sampling {

using channel::Read;
using channel::TransitionModel;

// ---------------------------------------------------------------------------

struct DrawDistribution {
  std::vector<double> probs;  // p_i^d, one per strand

  static DrawDistribution uniform(std::size_t M) {
    return DrawDistribution{std::vector<double>(M, 1.0 / static_cast<double>(M))};
  }

  void validate() const {
    double s = 0.0;
    for (double p : probs) {
      if (p < 0.0) throw std::invalid_argument("DrawDistribution: negative probability");
      s += p;
    }
    if (std::abs(s - 1.0) > 1e-9)
      throw std::invalid_argument("DrawDistribution: probabilities do not sum to 1");
  }
};

/// File format: one probability per line.
inline DrawDistribution load_draw_distribution(std::istream& is) {
  DrawDistribution d;
  std::string line;
  while (std::getline(is, line)) {
    const auto t = io::trim(line);
    if (t.empty()) continue;
    d.probs.push_back(io::parse_double(t));
  }
  d.validate();
  return d;
}

inline void save_draw_distribution(const DrawDistribution& d, std::ostream& os) {
  for (double p : d.probs) os << io::format_double(p) << '\n';
}

struct DrawOutcome {
  std::vector<std::int64_t> counts;  // D_i, one per strand
  std::int64_t total = 0;            // N = sum of counts

  /// Q_d = number of strands drawn exactly d times, for d = 0..max(D).
  std::vector<std::int64_t> histogram() const {
    std::int64_t dmax = 0;
    for (auto c : counts) dmax = std::max(dmax, c);
    std::vector<std::int64_t> q(static_cast<std::size_t>(dmax) + 1, 0);
    for (auto c : counts) ++q[static_cast<std::size_t>(c)];
    return q;
  }
};

/// theta(d) = Q_d / M, the fraction of strands drawn exactly d times.
inline std::vector<double> theta_histogram(const DrawOutcome& outcome) {
  const auto q = outcome.histogram();
  std::vector<double> theta(q.size());
  const double M = static_cast<double>(outcome.counts.size());
  for (std::size_t d = 0; d < q.size(); ++d) theta[d] = static_cast<double>(q[d]) / M;
  return theta;
}

/// CSV rows (d, theta).
inline void write_theta_csv(const std::vector<double>& theta, std::ostream& os) {
  os << "d,theta\n";
  for (std::size_t d = 0; d < theta.size(); ++d)
    os << d << ',' << io::format_double(theta[d]) << '\n';
}

/// D ~ Multinom(N; P^d): N independent categorical draws, counted per strand.
inline DrawOutcome draw(const DrawDistribution& dist, std::int64_t N, Philox& rng) {
  DrawOutcome out;
  out.counts.assign(dist.probs.size(), 0);
  out.total = N;
  std::vector<double> cdf(dist.probs.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < dist.probs.size(); ++i) {
    acc += dist.probs[i];
    cdf[i] = acc;
  }
  for (std::int64_t n = 0; n < N; ++n) {
    const double u = rng.next_double() * acc;
    const auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
    const auto i = static_cast<std::size_t>(it == cdf.end() ? cdf.size() - 1
                                                            : static_cast<std::size_t>(it - cdf.begin()));
    ++out.counts[i];
  }
  return out;
}

// ---------------------------------------------------------------------------

struct ChannelParams {
  std::int64_t M = 0;   // number of strands
  int L = 0;            // region length in nt used for rate bookkeeping
  double coverage = 0;  // c
  double p_rc = 0.5;    // reverse-complement probability

  std::int64_t N() const { return std::llround(coverage * static_cast<double>(M)); }
  double beta() const { return std::log2(static_cast<double>(M)) / static_cast<double>(L); }
};

namespace detail {

/// One drawn copy: Bernoulli(p_rc) orientation flip, then transmission
/// through the matching direction model.  Backward copies transmit the
/// reverse complement of the strand.
inline Read make_read(const NucSeq& x, std::int64_t origin, double p_rc,
                      const TransitionModel& fwd, const TransitionModel& bwd, Philox rng) {
  Read r;
  r.backward = rng.bernoulli(p_rc);
  r.origin = origin;
  if (r.backward) {
    r.seq = channel::transmit_seq(reverse_complement(x), bwd, rng);
  } else {
    r.seq = channel::transmit_seq(x, fwd, rng);
  }
  return r;
}

}  // namespace detail

/// The sampling channel.  Reads are generated on per-read substreams of
/// `rng` (identifiers = position in strand-major copy order), so the result
/// is identical for any thread count.
inline std::vector<Read> sample_channel(const std::vector<NucSeq>& X, const ChannelParams& params,
                                        const DrawDistribution& dist, const TransitionModel& fwd,
                                        const TransitionModel& bwd, Philox& rng,
                                        int threads = 1) {
  if (static_cast<std::int64_t>(X.size()) != params.M)
    throw std::invalid_argument("sample_channel: |X| != M");
  if (dist.probs.size() != X.size())
    throw std::invalid_argument("sample_channel: draw distribution size != M");
  Philox draw_rng = rng.fold(0);
  const DrawOutcome outcome = draw(dist, params.N(), draw_rng);

  // Flatten to (strand, copy) work items in strand-major order.
  std::vector<std::int64_t> origin_of;
  origin_of.reserve(static_cast<std::size_t>(outcome.total));
  for (std::size_t i = 0; i < X.size(); ++i)
    for (std::int64_t c = 0; c < outcome.counts[i]; ++c)
      origin_of.push_back(static_cast<std::int64_t>(i));

  std::vector<Read> reads(origin_of.size());
  const Philox read_root = rng.fold(1);
  parallel_for(reads.size(), threads, [&](std::size_t r) {
    reads[r] = detail::make_read(X[static_cast<std::size_t>(origin_of[r])], origin_of[r],
                                 params.p_rc, fwd, bwd, read_root.fold(r));
  });

  Philox perm_rng = rng.fold(2);
  perm_rng.shuffle(reads);
  return reads;
}

/// Extended trace-reconstruction channel: exactly A reads per strand, no
/// permutation, grouping by true origin retained.
inline std::vector<std::vector<Read>> trace_channel(const std::vector<NucSeq>& X, int A,
                                                    double p_rc, const TransitionModel& fwd,
                                                    const TransitionModel& bwd, Philox& rng,
                                                    int threads = 1) {
  if (A < 1) throw std::invalid_argument("trace_channel: A must be >= 1");
  std::vector<std::vector<Read>> groups(X.size());
  const Philox read_root = rng.fold(1);
  for (auto& g : groups) g.resize(static_cast<std::size_t>(A));
  parallel_for(X.size() * static_cast<std::size_t>(A), threads, [&](std::size_t item) {
    const std::size_t i = item / static_cast<std::size_t>(A);
    const std::size_t c = item % static_cast<std::size_t>(A);
    groups[i][c] = detail::make_read(X[i], static_cast<std::int64_t>(i), p_rc, fwd, bwd,
                                     read_root.fold(item));
  });
  return groups;
}

}  // namespace dnastore::sampling
