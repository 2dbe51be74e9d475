#pragma once

// Channel parameter estimation from paired data: each record couples an input
// strand with the reads it produced (orientation-labelled).  Alignment-based
// counting recovers the transition model:
//
//   1. per pair, a minimum-edit event chain via Wagner-Fischer backtracking
//      (ties broken randomly so homopolymer ambiguity spreads evenly),
//   2. every event annotated with (kmer of the queued symbol, previous
//      event) exactly as the channel conditions its draws,
//   3. p(e | kmer, e') = count ratio; contexts below a minimum count back
//      off to the across-kmer fallback of the transition model.
//
// The module also estimates the strand-draw distribution and the backward
// fraction, and fits per-strand offsets so arbitrary codes can be evaluated
// against raw random-payload strands.

#include <algorithm>
#include <array>
#include <cstdint>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "dnastore/gf4.hpp"
#include "dnastore/ioutil.hpp"
#include "dnastore/joint_code.hpp"
#include "dnastore/kmer_channel.hpp"
#include "dnastore/rng.hpp"
#include "dnastore/sampling_channel.hpp"

namespace dnastore {
namespace estimation {

// ---------------------------------------------------------------------------
// Paired dataset.

struct ClusterRecord {
  NucSeq input;
  std::vector<channel::Read> reads;
};

struct PairedDataset {
  std::vector<ClusterRecord> clusters;

  std::size_t read_count() const {
    std::size_t n = 0;
    for (const auto& c : clusters) n += c.reads.size();
    return n;
  }

  std::size_t backward_count() const {
    std::size_t n = 0;
    for (const auto& c : clusters)
      for (const auto& r : c.reads) n += r.backward ? 1 : 0;
    return n;
  }

  void validate() const {
    if (clusters.empty()) throw std::invalid_argument("PairedDataset: no clusters");
    for (const auto& c : clusters)
      if (c.input.empty()) throw std::invalid_argument("PairedDataset: empty input strand");
  }
};

// Text format, one record per cluster:
//   >cluster 1
//   ACGTTGCA          (input strand)
//   +f ACGTGCA        (forward read)
//   +b TGCAACGT       (backward read, stored as sequenced)
inline void write_dataset(const PairedDataset& d, std::ostream& os) {
  for (std::size_t i = 0; i < d.clusters.size(); ++i) {
    os << ">cluster " << (i + 1) << '\n';
    os << to_string(d.clusters[i].input) << '\n';
    for (const auto& r : d.clusters[i].reads)
      os << (r.backward ? "+b " : "+f ") << to_string(r.seq) << '\n';
  }
}

inline PairedDataset parse_dataset(std::istream& is) {
  PairedDataset d;
  std::string line;
  bool expect_input = false;
  while (std::getline(is, line)) {
    const std::string_view sv = io::trim(line);
    if (sv.empty()) continue;
    if (sv.front() == '>') {
      d.clusters.emplace_back();
      expect_input = true;
      continue;
    }
    if (d.clusters.empty()) throw std::invalid_argument("parse_dataset: data before first record");
    auto& c = d.clusters.back();
    if (expect_input) {
      c.input = parse_nucs(sv);
      expect_input = false;
      continue;
    }
    if (sv.size() < 2 || sv[0] != '+' || (sv[1] != 'f' && sv[1] != 'b'))
      throw std::invalid_argument("parse_dataset: expected +f/+b read line");
    channel::Read r;
    r.backward = sv[1] == 'b';
    r.seq = parse_nucs(io::trim(sv.substr(2)));
    r.origin = static_cast<std::int64_t>(d.clusters.size() - 1);
    c.reads.push_back(std::move(r));
  }
  d.validate();
  return d;
}

// ---------------------------------------------------------------------------
// Edit distance and alignment.

/// Plain Levenshtein distance with unit insertion/deletion/substitution
/// costs.
inline int edit_distance(const NucSeq& a, const NucSeq& b) {
  const std::size_t n = b.size();
  std::vector<int> row(n + 1);
  for (std::size_t j = 0; j <= n; ++j) row[j] = static_cast<int>(j);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    int diag = row[0];
    row[0] = static_cast<int>(i);
    for (std::size_t j = 1; j <= n; ++j) {
      const int sub = diag + (a[i - 1] == b[j - 1] ? 0 : 1);
      diag = row[j];
      row[j] = std::min({sub, diag + 1, row[j - 1] + 1});
    }
  }
  return row[n];
}

/// Number of non-transmission events in a chain (its edit cost).
inline int chain_cost(const channel::EventChain& chain) {
  int c = 0;
  for (const auto& s : chain) c += s.e == channel::Event::Tra ? 0 : 1;
  return c;
}

/// Minimum-edit event chain from x to y: the full Wagner-Fischer matrix is
/// backtracked from the end, always stepping to a predecessor consistent with
/// the cell value and deciding ties randomly.  The chain replays x -> y
/// exactly; insertions precede the consumption of the symbol they are queued
/// behind, matching the channel's event order.
inline channel::EventChain align_events(const NucSeq& x, const NucSeq& y, Philox& rng) {
  const std::size_t L = x.size();
  const std::size_t n = y.size();
  std::vector<int> dp((L + 1) * (n + 1));
  const auto at = [&](std::size_t i, std::size_t j) -> int& { return dp[i * (n + 1) + j]; };
  for (std::size_t j = 0; j <= n; ++j) at(0, j) = static_cast<int>(j);
  for (std::size_t i = 1; i <= L; ++i) {
    at(i, 0) = static_cast<int>(i);
    for (std::size_t j = 1; j <= n; ++j)
      at(i, j) = std::min({at(i - 1, j - 1) + (x[i - 1] == y[j - 1] ? 0 : 1),
                           at(i - 1, j) + 1, at(i, j - 1) + 1});
  }

  channel::EventChain chain;
  chain.reserve(L + static_cast<std::size_t>(at(L, n)));
  std::size_t i = L, j = n;
  while (i > 0 || j > 0) {
    std::array<channel::ChainStep, 3> opt;
    int n_opt = 0;
    if (i > 0 && j > 0 && at(i - 1, j - 1) + (x[i - 1] == y[j - 1] ? 0 : 1) == at(i, j))
      opt[static_cast<std::size_t>(n_opt++)] = {
          x[i - 1] == y[j - 1] ? channel::Event::Tra : channel::Event::Sub, y[j - 1]};
    if (i > 0 && at(i - 1, j) + 1 == at(i, j))
      opt[static_cast<std::size_t>(n_opt++)] = {channel::Event::Del, 0};
    if (j > 0 && at(i, j - 1) + 1 == at(i, j))
      opt[static_cast<std::size_t>(n_opt++)] = {channel::Event::Ins, y[j - 1]};
    const auto pick = opt[static_cast<std::size_t>(
        n_opt == 1 ? 0 : static_cast<int>(rng.below(static_cast<std::uint64_t>(n_opt))))];
    chain.push_back(pick);
    if (pick.e != channel::Event::Ins) --i;
    if (pick.e != channel::Event::Del) --j;
  }
  std::reverse(chain.begin(), chain.end());
  return chain;
}

// ---------------------------------------------------------------------------
// Transition counting.

struct TransitionCounts {
  using EventCounts = std::array<std::array<double, 4>, 5>;  // [prev][event]

  int k = 1;
  std::unordered_map<channel::KmerKey, EventCounts> events;
  std::array<std::array<double, 4>, 4> sub{};  // sub[x][emitted]

  void merge(const TransitionCounts& o) {
    if (o.k != k) throw std::invalid_argument("TransitionCounts: mixed k");
    for (const auto& [key, cnt] : o.events) {
      auto& mine = events[key];
      for (std::size_t p = 0; p < 5; ++p)
        for (std::size_t e = 0; e < 4; ++e) mine[p][e] += cnt[p][e];
    }
    for (std::size_t v = 0; v < 4; ++v)
      for (std::size_t a = 0; a < 4; ++a) sub[v][a] += o.sub[v][a];
  }
};

/// Accumulate one annotated chain.  Each event is filed under the kmer of the
/// symbol queued when it happened and the preceding event; insertions behind
/// the end of the strand (possible in edit scripts, impossible in the
/// channel) are filed under the final symbol's kmer.
inline void count_chain(TransitionCounts& tc, const NucSeq& x, const channel::EventChain& chain) {
  const std::size_t L = x.size();
  std::size_t t = 1;
  auto prev = channel::Event::Beg;
  for (const auto& s : chain) {
    const auto key = channel::kmer_at(x, std::min(t, L), tc.k);
    tc.events[key][static_cast<std::size_t>(prev)][static_cast<std::size_t>(s.e)] += 1.0;
    if (s.e == channel::Event::Sub) tc.sub[x[t - 1]][s.emitted] += 1.0;
    if (s.e != channel::Event::Ins) ++t;
    prev = s.e;
  }
  if (t != L + 1) throw std::invalid_argument("count_chain: chain does not consume the strand");
}

struct EstimateParams {
  int k = 1;
  bool backward = false;   // which read direction to estimate
  int min_count = 50;      // (kmer, prev) rows below this back off to the fallback
  std::uint64_t tie_seed = 0;

  void validate() const {
    if (k < 1 || k % 2 == 0) throw std::invalid_argument("EstimateParams: k must be odd and >= 1");
    if (min_count < 1) throw std::invalid_argument("EstimateParams: min_count must be >= 1");
  }
};

/// Count annotated events over all reads of the requested direction.
/// Backward reads are aligned against the reverse-complemented input, which
/// is the strand they physically traversed.  Tie-breaking randomness is keyed
/// per (cluster, read), so partitioning work across threads cannot change
/// any chain.
inline TransitionCounts count_events(const PairedDataset& data, const EstimateParams& prm,
                                     std::size_t cluster_begin, std::size_t cluster_end) {
  prm.validate();
  TransitionCounts tc;
  tc.k = prm.k;
  const Philox root(prm.tie_seed);
  for (std::size_t ci = cluster_begin; ci < cluster_end && ci < data.clusters.size(); ++ci) {
    const auto& c = data.clusters[ci];
    const NucSeq xb = reverse_complement(c.input);
    const NucSeq& x = prm.backward ? xb : c.input;
    for (std::size_t ri = 0; ri < c.reads.size(); ++ri) {
      if (c.reads[ri].backward != prm.backward) continue;
      Philox rng = root.fold({ci, ri});
      count_chain(tc, x, align_events(x, c.reads[ri].seq, rng));
    }
  }
  return tc;
}

/// Ratio estimator over a count table.  Rows with at least `min_count`
/// events become probabilities; the rest stay empty and are filled from the
/// across-kmer fallback when the model is finalized.
inline channel::TransitionModel build_model(const TransitionCounts& tc, bool backward,
                                            int min_count) {
  channel::TransitionModel m;
  m.k = tc.k;
  m.backward = backward;
  bool any = false;
  for (const auto& [key, cnt] : tc.events) {
    channel::TransitionModel::PrevTable rows{};
    bool keep = false;
    for (std::size_t p = 0; p < 5; ++p) {
      double tot = 0.0;
      for (std::size_t e = 0; e < 4; ++e) tot += cnt[p][e];
      if (tot < static_cast<double>(min_count)) continue;
      for (std::size_t e = 0; e < 4; ++e) rows[p][e] = cnt[p][e] / tot;
      keep = true;
    }
    if (keep) {
      m.table.emplace(key, rows);
      any = true;
    }
  }
  if (!any) throw std::runtime_error("build_model: no context reached the minimum count");
  for (std::size_t v = 0; v < 4; ++v) {
    double tot = 0.0;
    for (std::size_t a = 0; a < 4; ++a) tot += tc.sub[v][a];
    for (std::size_t a = 0; a < 4; ++a)
      m.sub[v][a] = tot > 0.0 ? tc.sub[v][a] / tot : (a == v ? 0.0 : 1.0 / 3.0);
  }
  m.finalize();
  m.validate();
  return m;
}

/// One-call estimator (serial).  Fails if the dataset holds no reads of the
/// requested direction.
inline channel::TransitionModel estimate_transitions(const PairedDataset& data,
                                                     const EstimateParams& prm) {
  data.validate();
  const auto tc = count_events(data, prm, 0, data.clusters.size());
  if (tc.events.empty())
    throw std::invalid_argument("estimate_transitions: no reads in the requested direction");
  return build_model(tc, prm.backward, prm.min_count);
}

// ---------------------------------------------------------------------------
// Draw distribution and orientation fraction.

struct DrawEstimate {
  sampling::DrawDistribution draw;
  double p_rc = 0.0;
};

/// p^d_i = (reads of cluster i) / (all reads); p_rc = backward fraction.
inline DrawEstimate estimate_draw(const PairedDataset& data) {
  data.validate();
  const double n = static_cast<double>(data.read_count());
  if (n == 0) throw std::invalid_argument("estimate_draw: dataset has no reads");
  DrawEstimate est;
  est.draw.probs.reserve(data.clusters.size());
  for (const auto& c : data.clusters)
    est.draw.probs.push_back(static_cast<double>(c.reads.size()) / n);
  est.draw.validate();
  est.p_rc = static_cast<double>(data.backward_count()) / n;
  return est;
}

/// Uniform subsample of m clusters (order preserved), for evaluating smaller
/// codes against a larger measured dataset.
inline PairedDataset subsample_clusters(const PairedDataset& data, std::size_t m, Philox& rng) {
  data.validate();
  if (m == 0 || m > data.clusters.size())
    throw std::invalid_argument("subsample_clusters: m out of range");
  std::vector<std::size_t> ids(data.clusters.size());
  for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = i;
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(ids.size() - i));
    std::swap(ids[i], ids[j]);
  }
  ids.resize(m);
  std::sort(ids.begin(), ids.end());
  PairedDataset out;
  out.clusters.reserve(m);
  for (const std::size_t i : ids) out.clusters.push_back(data.clusters[i]);
  return out;
}

// ---------------------------------------------------------------------------
// Offset fitting for raw random-payload strands.

/// The offset z over the index+payload region (primers excluded) such that
/// encoding (w, i) with offset z reproduces x exactly.  Lets any code layout
/// be replayed over strands whose payload was drawn at random.
inline NucSeq fit_offset(const NucSeq& x, const NucSeq& w, std::int64_t i,
                         const code::JointCodeLayout& lay) {
  if (static_cast<int>(x.size()) != lay.L_seq())
    throw std::invalid_argument("fit_offset: strand length does not match the layout");
  const NucSeq zero(static_cast<std::size_t>(lay.region_nt()), 0);
  const NucSeq enc = code::encode_strand(w, i, lay, zero);
  NucSeq z(static_cast<std::size_t>(lay.region_nt()));
  const std::size_t r0 = static_cast<std::size_t>(lay.L_p);
  for (std::size_t t = 0; t < z.size(); ++t)
    z[t] = gf4::add(x[r0 + t], enc[r0 + t]);  // addition is its own inverse in GF(4)
  return z;
}

/// Nearest input strand by edit distance (ties to the lowest index).  O(N*M)
/// utility for assembling desk-scale paired datasets.
inline std::size_t nearest_input(const std::vector<NucSeq>& inputs, const NucSeq& y) {
  if (inputs.empty()) throw std::invalid_argument("nearest_input: no inputs");
  std::size_t best = 0;
  int best_d = edit_distance(inputs[0], y);
  for (std::size_t i = 1; i < inputs.size(); ++i) {
    const int d = edit_distance(inputs[i], y);
    if (d < best_d) {
      best = i;
      best_d = d;
    }
  }
  return best;
}

}  // namespace estimation
}  // namespace dnastore
