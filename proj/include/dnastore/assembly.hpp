#pragma once

// Read assembly: turning per-read symbol posteriors into per-block payload
// posteriors.  The stages mirror the receiver pipeline:
//
//   1. optional single-linkage clustering of reads by APP distance,
//   2. scaled mismatched combining of index APPs per cluster,
//   3. thresholded index decisions (confident clusters claim a block,
//      the rest go to a reject pool),
//   4. post-assignment of rejected reads by payload distance against the
//      decided blocks' combined APPs,
//   5. final per-block payload APPs, uniform for blocks nobody claimed.
//
// Combining uses the mismatched rule q = gamma * [prod_j p_j]^s(A) where A is
// the number of combined reads; s(.) mitigates the overconfidence of the
// independence assumption and is tabulated per basecaller with s(0) = 0 and
// s(A) ~ 1/A beyond the table.  All products run in the log domain and every
// reduction is over reads sorted by id, so results are bit-stable regardless
// of scheduling.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dnastore/bcjr.hpp"
#include "dnastore/joint_code.hpp"

namespace dnastore {
namespace assembly {

// ---------------------------------------------------------------------------
// Scaling schedule s(A).

/// Piecewise-linear exponent schedule over trace counts.  s(0) = 0 always;
/// between anchors the value is interpolated linearly in the count; beyond
/// the last anchor it decays as s(A) = s_last * A_last / A.
struct ScalingSchedule {
  std::vector<std::pair<int, double>> anchors;  // (count, s), strictly increasing counts

  void validate() const {
    if (anchors.empty()) throw std::invalid_argument("ScalingSchedule: no anchors");
    int prev = 0;
    for (const auto& [count, s] : anchors) {
      if (count <= prev) throw std::invalid_argument("ScalingSchedule: counts must increase");
      if (!(s >= 0) || !std::isfinite(s))
        throw std::invalid_argument("ScalingSchedule: values must be finite and >= 0");
      prev = count;
    }
  }

  double at(int count) const {
    if (count <= 0) return 0.0;
    if (count <= anchors.front().first) {
      // Linear from the implicit (0, 0) anchor.
      return anchors.front().second * static_cast<double>(count) /
             static_cast<double>(anchors.front().first);
    }
    for (std::size_t j = 1; j < anchors.size(); ++j) {
      if (count > anchors[j].first) continue;
      const auto& [c0, s0] = anchors[j - 1];
      const auto& [c1, s1] = anchors[j];
      return s0 + (s1 - s0) * static_cast<double>(count - c0) / static_cast<double>(c1 - c0);
    }
    const auto& [cl, sl] = anchors.back();
    return sl * static_cast<double>(cl) / static_cast<double>(count);
  }

  /// Schedule tuned for the high-accuracy basecaller pipeline.
  static ScalingSchedule accurate() {
    return {{{1, 1.00},
             {2, 0.90},
             {4, 0.75},
             {6, 0.65},
             {8, 0.57},
             {10, 0.52},
             {15, 0.42},
             {20, 0.35},
             {30, 0.26},
             {50, 0.18}}};
  }

  /// Schedule tuned for the fast basecaller pipeline.
  static ScalingSchedule fast() {
    return {{{1, 1.01},
             {2, 0.88},
             {4, 0.69},
             {6, 0.57},
             {8, 0.49},
             {10, 0.43},
             {15, 0.33},
             {20, 0.27},
             {30, 0.20},
             {50, 0.13}}};
  }
};

// ---------------------------------------------------------------------------
// Parameters.

struct AssemblyParams {
  double delta_I = 0.995;      // min index posterior to claim a block
  double delta_C = 44.0;       // APP-distance threshold (clustering & post-assignment)
  int top_candidates = 5;      // |T|: candidate indices tried per rejected read
  bool cluster = false;        // optional pre-clustering (off: singleton clusters)
  bool post_assign = true;     // rescue rejected reads by payload distance
  bool redecide_index = false; // re-check index decisions after post-assignment
  ScalingSchedule scaling = ScalingSchedule::accurate();

  void validate() const {
    if (!(delta_I >= 0.0) || !(delta_I <= 1.0))
      throw std::invalid_argument("AssemblyParams: delta_I must lie in [0,1]");
    if (!(delta_C >= 0.0)) throw std::invalid_argument("AssemblyParams: delta_C must be >= 0");
    if (top_candidates < 1)
      throw std::invalid_argument("AssemblyParams: top_candidates must be >= 1");
    scaling.validate();
  }
};

// ---------------------------------------------------------------------------
// Row geometry helpers: posteriors rows are (primer | front index | payload |
// back index | primer); distances and index extraction skip the primers.

namespace detail {

inline std::size_t region_row0(const code::JointCodeLayout& lay) {
  return static_cast<std::size_t>(lay.L_p);
}

inline std::size_t region_rows(const code::JointCodeLayout& lay) {
  return static_cast<std::size_t>(lay.index.n() + lay.L_o);
}

inline std::size_t payload_row0(const code::JointCodeLayout& lay) {
  return static_cast<std::size_t>(lay.L_p + lay.index.front_nt());
}

}  // namespace detail

// ---------------------------------------------------------------------------
// APP distances.

/// Half-L1 distance between two row blocks of length n.
inline double row_distance(const std::vector<std::array<double, 4>>& a, std::size_t a0,
                           const std::vector<std::array<double, 4>>& b, std::size_t b0,
                           std::size_t n) {
  if (a0 + n > a.size() || b0 + n > b.size())
    throw std::invalid_argument("row_distance: row range out of bounds");
  double d = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    const auto& ra = a[a0 + t];
    const auto& rb = b[b0 + t];
    for (int v = 0; v < 4; ++v) d += 0.5 * std::abs(ra[v] - rb[v]);
  }
  return d;
}

/// Aggregated statistical distance between two reads' posteriors over the
/// index+payload region (primers excluded).  Symmetric, zero iff the summed
/// rows coincide; at most one per row.
inline double payload_distance(const bcjr::AppMatrix& a, const bcjr::AppMatrix& b,
                               const code::JointCodeLayout& lay) {
  const std::size_t r0 = detail::region_row0(lay);
  return row_distance(a.rows, r0, b.rows, r0, detail::region_rows(lay));
}

/// Same distance between a block's combined region posteriors (rows starting
/// at the front index nucleotide) and a read.
inline double payload_distance(const std::vector<std::array<double, 4>>& block_region,
                               const bcjr::AppMatrix& read, const code::JointCodeLayout& lay) {
  return row_distance(block_region, 0, read.rows, detail::region_row0(lay),
                      detail::region_rows(lay));
}

// ---------------------------------------------------------------------------
// Clustering.

struct Cluster {
  std::vector<int> members;  // read ids, ascending
};

/// One cluster per read (clustering disabled).
inline std::vector<Cluster> singleton_clusters(int n_reads) {
  std::vector<Cluster> out(static_cast<std::size_t>(n_reads));
  for (int j = 0; j < n_reads; ++j) out[static_cast<std::size_t>(j)].members = {j};
  return out;
}

/// Single-linkage agglomeration halted at delta_C: clusters merge while any
/// inter-cluster pair sits at distance < delta_C, which is exactly the
/// connected components of the "distance < delta_C" graph.  O(N^2) distance
/// evaluations.
inline std::vector<Cluster> cluster_reads(const std::vector<bcjr::AppMatrix>& apps,
                                          const code::JointCodeLayout& lay, double delta_C) {
  const int n = static_cast<int>(apps.size());
  std::vector<int> parent(static_cast<std::size_t>(n));
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int v) {
    while (parent[static_cast<std::size_t>(v)] != v) {
      parent[static_cast<std::size_t>(v)] =
          parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(v)])];
      v = parent[static_cast<std::size_t>(v)];
    }
    return v;
  };
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) {
      if (find(a) == find(b)) continue;
      if (payload_distance(apps[static_cast<std::size_t>(a)], apps[static_cast<std::size_t>(b)],
                           lay) < delta_C)
        parent[static_cast<std::size_t>(find(b))] = find(a);
    }
  std::vector<std::vector<int>> groups(static_cast<std::size_t>(n));
  for (int v = 0; v < n; ++v) groups[static_cast<std::size_t>(find(v))].push_back(v);
  std::vector<Cluster> out;
  for (auto& g : groups)
    if (!g.empty()) out.push_back({std::move(g)});  // already ascending
  return out;
}

// ---------------------------------------------------------------------------
// Scaled mismatched combining.

/// q(v_t | reads) = gamma * [prod_j p(v_t | y_j)]^s per row, computed in the
/// log domain over `members` sorted ascending.  s = 0 (or no members) yields
/// uniform rows; rows whose product vanishes everywhere fall back to uniform.
inline std::vector<std::array<double, 4>> combine_apps(const std::vector<bcjr::AppMatrix>& apps,
                                                       std::vector<int> members, std::size_t row0,
                                                       std::size_t n_rows, double s) {
  std::sort(members.begin(), members.end());
  std::vector<std::array<double, 4>> out(n_rows, {0.25, 0.25, 0.25, 0.25});
  if (members.empty() || s == 0.0) return out;
  for (std::size_t t = 0; t < n_rows; ++t) {
    std::array<double, 4> acc{0.0, 0.0, 0.0, 0.0};
    for (const int j : members) {
      const auto& row = apps[static_cast<std::size_t>(j)].rows[row0 + t];
      for (int v = 0; v < 4; ++v) acc[v] += std::log(row[v]);
    }
    const double mx = *std::max_element(acc.begin(), acc.end());
    if (!std::isfinite(mx)) continue;  // contradictory point masses: keep uniform
    double tot = 0.0;
    std::array<double, 4> q{};
    for (int v = 0; v < 4; ++v) {
      q[v] = std::exp(s * (acc[v] - mx));
      tot += q[v];
    }
    for (int v = 0; v < 4; ++v) out[t][v] = q[v] / tot;
  }
  return out;
}

/// Combined per-position index APPs of a cluster, ordered as the index
/// codeword nucleotides (front half, then back half).
inline std::vector<std::array<double, 4>> combine_index_apps(
    const std::vector<bcjr::AppMatrix>& apps, const Cluster& c,
    const code::JointCodeLayout& lay, const ScalingSchedule& scaling) {
  if (c.members.empty()) throw std::invalid_argument("combine_index_apps: empty cluster");
  const double s = scaling.at(static_cast<int>(c.members.size()));
  const std::size_t fn = static_cast<std::size_t>(lay.index.front_nt());
  const std::size_t bn = static_cast<std::size_t>(lay.index.n()) - fn;
  auto front = combine_apps(apps, c.members, detail::region_row0(lay), fn, s);
  auto back = combine_apps(apps, c.members,
                           detail::payload_row0(lay) + static_cast<std::size_t>(lay.L_o), bn, s);
  front.insert(front.end(), back.begin(), back.end());
  return front;
}

// ---------------------------------------------------------------------------
// Index decisions.

/// Precomputed index codeword nucleotides (front half || back half) for
/// i = 1..M; the per-candidate evaluation is then a flat lookup.
struct IndexCodebook {
  std::vector<NucSeq> nts;  // nts[i-1], each of length index.n()

  std::int64_t M() const { return static_cast<std::int64_t>(nts.size()); }
};

inline IndexCodebook index_codebook(const code::IndexCode& ix, std::int64_t M) {
  if (M < 1 || M > ix.capacity())
    throw std::invalid_argument("index_codebook: M out of range for the index code");
  IndexCodebook cb;
  cb.nts.reserve(static_cast<std::size_t>(M));
  for (std::int64_t i = 1; i <= M; ++i) {
    auto [front, back] = code::encode_index(i, ix);
    front.insert(front.end(), back.begin(), back.end());
    cb.nts.push_back(std::move(front));
  }
  return cb;
}

/// Memoryless mismatched index posterior: q(i) = gamma * prod_k q_k(nt_k(i)),
/// normalized over i = 1..M.  Degenerate inputs (all candidates at zero)
/// yield the uniform posterior.
inline std::vector<double> index_posterior(const std::vector<std::array<double, 4>>& digit_q,
                                           const IndexCodebook& cb) {
  const std::size_t M = cb.nts.size();
  std::vector<std::array<double, 4>> lq(digit_q.size());
  for (std::size_t k = 0; k < digit_q.size(); ++k)
    for (int v = 0; v < 4; ++v) lq[k][v] = std::log(digit_q[k][v]);
  std::vector<double> logq(M, 0.0);
  double mx = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < M; ++j) {
    const NucSeq& nts = cb.nts[j];
    if (nts.size() != digit_q.size())
      throw std::invalid_argument("index_posterior: digit count mismatch");
    double acc = 0.0;
    for (std::size_t k = 0; k < nts.size(); ++k) acc += lq[k][nts[k]];
    logq[j] = acc;
    mx = std::max(mx, acc);
  }
  std::vector<double> q(M, 1.0 / static_cast<double>(M));
  if (!std::isfinite(mx)) return q;
  double tot = 0.0;
  for (std::size_t j = 0; j < M; ++j) {
    q[j] = std::exp(logq[j] - mx);
    tot += q[j];
  }
  for (double& v : q) v /= tot;
  return q;
}

/// Thresholded decision: the argmax index when its posterior reaches
/// delta_I, otherwise 0 ("no decision").  `confidence` always carries the
/// max posterior.
struct IndexDecision {
  std::int64_t index = 0;
  double confidence = 0.0;
};

inline IndexDecision decide_index(const std::vector<std::array<double, 4>>& digit_q,
                                  const IndexCodebook& cb, double delta_I) {
  const auto q = index_posterior(digit_q, cb);
  const auto it = std::max_element(q.begin(), q.end());
  IndexDecision d;
  d.confidence = *it;
  if (d.confidence >= delta_I) d.index = static_cast<std::int64_t>(it - q.begin()) + 1;
  return d;
}

// ---------------------------------------------------------------------------
// Assignment state and report.

enum class Stage { Index, Post, Rejected };

struct ReadReport {
  int read_id = -1;
  std::int64_t index = 0;  // 0: none
  double confidence = 0.0;
  Stage stage = Stage::Rejected;
};

struct AssignmentState {
  std::vector<std::vector<int>> members;  // per block (index i at slot i-1), sorted ids
  std::vector<int> rejects;               // unassigned read ids, sorted
  // Combined region posteriors per block (front index | payload | back
  // index), with the scaling exponent for the block's member count; uniform
  // rows for empty blocks.
  std::vector<std::vector<std::array<double, 4>>> block_region;
};

/// Per-block payload posteriors (the payload slice of the block region),
/// uniform for empty blocks; input to outer decoding after deinterleaving.
inline std::vector<std::vector<std::array<double, 4>>> combine_payload_apps(
    const AssignmentState& st, const code::JointCodeLayout& lay) {
  const std::size_t off = static_cast<std::size_t>(lay.index.front_nt());
  const std::size_t L_o = static_cast<std::size_t>(lay.L_o);
  std::vector<std::vector<std::array<double, 4>>> out(st.block_region.size());
  for (std::size_t b = 0; b < st.block_region.size(); ++b)
    out[b].assign(st.block_region[b].begin() + static_cast<std::ptrdiff_t>(off),
                  st.block_region[b].begin() + static_cast<std::ptrdiff_t>(off + L_o));
  return out;
}

namespace detail {

inline void rebuild_block(AssignmentState& st, std::size_t b,
                          const std::vector<bcjr::AppMatrix>& apps,
                          const code::JointCodeLayout& lay, const ScalingSchedule& scaling) {
  const double s = scaling.at(static_cast<int>(st.members[b].size()));
  st.block_region[b] =
      combine_apps(apps, st.members[b], region_row0(lay), region_rows(lay), s);
}

}  // namespace detail

/// Stage 2+3: index decisions per cluster.  Confident clusters claim their
/// block; everything else lands in the reject pool.  Block posteriors are
/// combined afterwards with s(|S_i|).
inline AssignmentState assign_by_index(const std::vector<bcjr::AppMatrix>& apps,
                                       const std::vector<Cluster>& clusters,
                                       const code::JointCodeLayout& lay,
                                       const IndexCodebook& cb, const AssemblyParams& prm,
                                       std::vector<ReadReport>* report = nullptr) {
  prm.validate();
  AssignmentState st;
  st.members.resize(cb.nts.size());
  for (const auto& c : clusters) {
    const auto digit_q = combine_index_apps(apps, c, lay, prm.scaling);
    const auto d = decide_index(digit_q, cb, prm.delta_I);
    for (const int j : c.members) {
      if (d.index > 0)
        st.members[static_cast<std::size_t>(d.index - 1)].push_back(j);
      else
        st.rejects.push_back(j);
      if (report)
        report->push_back({j, d.index, d.confidence,
                           d.index > 0 ? Stage::Index : Stage::Rejected});
    }
  }
  for (auto& m : st.members) std::sort(m.begin(), m.end());
  std::sort(st.rejects.begin(), st.rejects.end());
  st.block_region.resize(st.members.size());
  for (std::size_t b = 0; b < st.members.size(); ++b)
    detail::rebuild_block(st, b, apps, lay, prm.scaling);
  return st;
}

/// Stage 4: try to rescue rejected reads.  Each read proposes its
/// top-candidate indices by singleton index posterior; among candidates with
/// a non-empty block and payload distance below delta_C it joins the one
/// with the highest posterior.  Blocks touched are re-combined with
/// s(|W_i|); empty blocks never receive reads.
inline void post_assign(AssignmentState& st, const std::vector<bcjr::AppMatrix>& apps,
                        const code::JointCodeLayout& lay, const IndexCodebook& cb,
                        const AssemblyParams& prm,
                        std::vector<ReadReport>* report = nullptr) {
  prm.validate();
  const double s1 = prm.scaling.at(1);
  std::vector<int> still_rejected;
  std::vector<std::vector<int>> pending(st.members.size());
  for (const int j : st.rejects) {
    const auto digit_q =
        combine_index_apps(apps, Cluster{{j}}, lay, ScalingSchedule{{{1, s1}}});
    const auto q = index_posterior(digit_q, cb);
    std::vector<std::int64_t> order(q.size());
    std::iota(order.begin(), order.end(), 0);
    const std::size_t top =
        std::min<std::size_t>(static_cast<std::size_t>(prm.top_candidates), order.size());
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(top),
                      order.end(), [&](std::int64_t a, std::int64_t b) {
                        return q[static_cast<std::size_t>(a)] != q[static_cast<std::size_t>(b)]
                                   ? q[static_cast<std::size_t>(a)] >
                                         q[static_cast<std::size_t>(b)]
                                   : a < b;
                      });
    std::int64_t best = -1;
    for (std::size_t r = 0; r < top; ++r) {
      const std::size_t b = static_cast<std::size_t>(order[r]);
      if (st.members[b].empty()) continue;
      if (payload_distance(st.block_region[b], apps[static_cast<std::size_t>(j)], lay) <
          prm.delta_C) {
        best = order[r];  // candidates are visited in decreasing posterior
        break;
      }
    }
    if (best >= 0) {
      pending[static_cast<std::size_t>(best)].push_back(j);
      if (report)
        report->push_back(
            {j, best + 1, q[static_cast<std::size_t>(best)], Stage::Post});
    } else {
      still_rejected.push_back(j);
    }
  }
  st.rejects = std::move(still_rejected);
  for (std::size_t b = 0; b < st.members.size(); ++b) {
    if (pending[b].empty()) continue;
    st.members[b].insert(st.members[b].end(), pending[b].begin(), pending[b].end());
    std::sort(st.members[b].begin(), st.members[b].end());
    detail::rebuild_block(st, b, apps, lay, prm.scaling);
  }
  if (prm.redecide_index) {
    // Optional sanity pass: a block whose enlarged read set no longer
    // re-decides to its own index sheds the post-assigned reads again.
    for (std::size_t b = 0; b < st.members.size(); ++b) {
      if (pending[b].empty()) continue;
      const auto digit_q =
          combine_index_apps(apps, Cluster{st.members[b]}, lay, prm.scaling);
      const auto d = decide_index(digit_q, cb, prm.delta_I);
      if (d.index == static_cast<std::int64_t>(b) + 1) continue;
      for (const int j : pending[b]) {
        st.members[b].erase(std::find(st.members[b].begin(), st.members[b].end(), j));
        st.rejects.push_back(j);
        if (report)
          report->push_back({j, 0, d.confidence, Stage::Rejected});
      }
      detail::rebuild_block(st, b, apps, lay, prm.scaling);
    }
    std::sort(st.rejects.begin(), st.rejects.end());
  }
}

// ---------------------------------------------------------------------------
// Full pipeline.

struct Assembly {
  AssignmentState state;
  std::vector<ReadReport> report;  // one row per read, ascending read_id
};

inline Assembly assemble(const std::vector<bcjr::AppMatrix>& apps,
                         const code::JointCodeLayout& lay, const AssemblyParams& prm) {
  prm.validate();
  const auto clusters = prm.cluster
                            ? cluster_reads(apps, lay, prm.delta_C)
                            : singleton_clusters(static_cast<int>(apps.size()));
  const auto cb = index_codebook(lay.index, lay.M);
  Assembly out;
  std::vector<ReadReport> rows;
  out.state = assign_by_index(apps, clusters, lay, cb, prm, &rows);
  if (prm.post_assign) post_assign(out.state, apps, lay, cb, prm, &rows);
  // Last report entry per read wins (post-assignment upgrades rejections).
  out.report.assign(apps.size(), ReadReport{});
  for (const auto& r : rows) out.report[static_cast<std::size_t>(r.read_id)] = r;
  for (std::size_t j = 0; j < out.report.size(); ++j)
    out.report[j].read_id = static_cast<int>(j);
  return out;
}

/// Assignment report as CSV: read_id, decided index (0 = none), confidence,
/// stage in {index, post, rejected}.
inline std::string report_csv(const std::vector<ReadReport>& report) {
  std::ostringstream os;
  os << "read_id,index,confidence,stage\n";
  for (const auto& r : report) {
    const char* stage = r.stage == Stage::Index ? "index"
                        : r.stage == Stage::Post ? "post"
                                                 : "rejected";
    os << r.read_id << ',' << r.index << ',' << r.confidence << ',' << stage << '\n';
  }
  return os.str();
}

}  // namespace assembly
}  // namespace dnastore
