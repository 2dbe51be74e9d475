#pragma once

// Symbolwise MAP (BCJR) decoding of one read against the per-strand joint
// code over the memory-k IDS channel, producing per-symbol posteriors
// p(v_t | y) for every code symbol v_t (primers, index nucleotides, payload).
//
// The decoder runs a forward/backward recursion over a section trellis: one
// section per code symbol (primers and payload; a payload symbol followed by
// markers emits all its copies in one section) or per index-code section
// (one hypothesis per codeword).  The trellis state between sections is
//
//   (last-two-symbol context, previous channel event, drift d)
//
// where d = (read symbols produced) - (strand symbols consumed).  For k = 1
// models the context is empty; for k = 3 the channel window of a symbol
// includes its right neighbor, so each symbol's events are accounted one
// section late, when the neighbor is part of the hypothesis (the context
// carries the two symbols that windows still need).  Contexts are enumerated
// only as reachable from the code hypotheses, so the state space stays
// pruned to valid code paths.
//
// Within a section, all event chains between two drift states are summed by
// a small lattice F[consumed][read used][event] mirroring the channel's
// queue semantics: insertions (uniform emission, factor 1/4) condition on
// the queued symbol's window and are capped at i_max consecutive ones;
// deletions, substitutions (emission from the model's substitution matrix),
// and transmissions consume the queued symbol.  A section's terminal event
// can never be an insertion - insertions before the next symbol belong to
// the next section's lattice - so inter-section event states are only
// {Beg, Del, Sub, Tra}.
//
// Drift ranges per boundary come from a Gaussian-style closed form around
// the expected drift, intersected with hard feasibility (what insertions/
// deletions can still reach the observed read length), floored/ceiled to
// integers.  A read whose length cannot be reconciled with any drift path
// is returned as an erasure with uniform posteriors rather than clamped.
//
// All recursions run in the linear domain with per-boundary rescaling; the
// normalization logs are kept, so the read log-likelihood (up to a constant
// fixed by the layout and model) is available and posteriors are exact
// ratios.  Backward reads are decoded against the reverse-complemented
// strand hypotheses (codebooks walked in reverse complement) composed with
// the backward-direction channel model; their posteriors are reported in
// forward coordinates, so both orientations combine directly.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "dnastore/gf4.hpp"
#include "dnastore/joint_code.hpp"
#include "dnastore/kmer_channel.hpp"

namespace dnastore::bcjr {

using channel::Event;
using channel::KmerKey;
using channel::TransitionModel;

// ---------------------------------------------------------------------------
// Decoder knobs.

struct DecodeParams {
  int i_max = 2;                  // max consecutive insertion hypotheses
  double window_mult = 3.5;       // drift half-width multiplier
  double fixed_halfwidth = -1.0;  // >= 0 pins the half-width (diagnostics)

  void validate() const {
    if (i_max < 0) throw std::invalid_argument("DecodeParams: i_max must be >= 0");
    if (window_mult <= 0) throw std::invalid_argument("DecodeParams: window_mult must be > 0");
  }
};

/// Average insertion/deletion rates of a model: unweighted mean over the
/// populated (window, previous-event) rows, excluding the transient Beg
/// context.  Used only to center and size the drift windows.
struct AvgRates {
  double p_ins = 0.0, p_del = 0.0;
};

inline AvgRates average_rates(const TransitionModel& m) {
  AvgRates r;
  std::size_t n = 0;
  for (const auto& [key, t] : m.table) {
    (void)key;
    for (int p = 0; p < 4; ++p) {  // Ins, Del, Sub, Tra contexts
      r.p_ins += t[static_cast<std::size_t>(p)][static_cast<int>(Event::Ins)];
      r.p_del += t[static_cast<std::size_t>(p)][static_cast<int>(Event::Del)];
      ++n;
    }
  }
  if (n == 0) throw std::invalid_argument("average_rates: empty model");
  r.p_ins /= static_cast<double>(n);
  r.p_del /= static_cast<double>(n);
  return r;
}

// ---------------------------------------------------------------------------
// Drift windows.

/// Expected drift after P consumed symbols.
inline double drift_center(double P, double p_ins, double p_del) {
  return P * (p_ins - p_del) / (1.0 - p_ins);
}

/// Half-width of the drift window for a length-L strand (same at every
/// boundary; grows as sqrt(L)).
inline double drift_halfwidth(double L, double p_ins, double p_del, double mult = 3.5) {
  return mult * std::sqrt(L * (1.0 - p_del) * (p_del + p_ins)) / (1.0 - p_ins);
}

/// Per-boundary integer drift bounds for a read of length L_read against a
/// strand of length L.  `cuts[t]` is the number of strand symbols consumed
/// by boundary t (cuts[0] = 0, cuts.back() = L).  The closed-form window is
/// intersected with feasibility: a drift d at cut P must be reachable from
/// d = 0 (at most i_max insertions per consumed symbol, at most one deletion
/// each) and must still admit reaching the terminal drift L_read - L with
/// the remaining L - P symbols.  `ok` is false when any boundary ends up
/// empty - such a read cannot be explained and is treated as an erasure.
struct DriftWindow {
  std::vector<int> lo, hi;
  bool ok = true;

  int width(std::size_t t) const { return hi[t] - lo[t] + 1; }
};

inline DriftWindow drift_window(const std::vector<int>& cuts, int L, int L_read, double p_ins,
                                double p_del, const DecodeParams& prm = {}) {
  if (p_ins < 0 || p_ins >= 1 || p_del < 0 || p_del >= 1 || p_ins + p_del >= 1)
    throw std::invalid_argument("drift_window: rates must lie in [0,1) with p_ins + p_del < 1");
  prm.validate();
  if (cuts.empty() || cuts.front() != 0 || cuts.back() != L)
    throw std::invalid_argument("drift_window: cuts must run from 0 to L");
  const double half = prm.fixed_halfwidth >= 0
                          ? prm.fixed_halfwidth
                          : drift_halfwidth(L, p_ins, p_del, prm.window_mult);
  const int d_end = L_read - L;
  DriftWindow w;
  w.lo.resize(cuts.size());
  w.hi.resize(cuts.size());
  for (std::size_t t = 0; t < cuts.size(); ++t) {
    const int P = cuts[t];
    const int R = L - P;
    const double center = drift_center(P, p_ins, p_del);
    std::int64_t lo = static_cast<std::int64_t>(std::ceil(center - half));
    std::int64_t hi = static_cast<std::int64_t>(std::floor(center + half));
    lo = std::max<std::int64_t>({lo, -P, d_end - static_cast<std::int64_t>(prm.i_max) * R});
    hi = std::min<std::int64_t>(
        {hi, static_cast<std::int64_t>(prm.i_max) * P, d_end + R, L_read - P});
    if (lo > hi) w.ok = false;
    w.lo[t] = static_cast<int>(lo);
    w.hi[t] = static_cast<int>(hi);
  }
  return w;
}

// ---------------------------------------------------------------------------
// Section lattice.
//
// Inter-section event states use slots {0: Beg, 1: Del, 2: Sub, 3: Tra}; the
// lattice extends them with insertion-run slots {4: run 1, ..., 3+i_max}.

namespace detail {

inline constexpr int kStateEvents = 4;

inline Event slot_event(int slot) {
  switch (slot) {
    case 0: return Event::Beg;
    case 1: return Event::Del;
    case 2: return Event::Sub;
    case 3: return Event::Tra;
    default: return Event::Ins;
  }
}

inline int event_slot(Event e) {
  switch (e) {
    case Event::Beg: return 0;
    case Event::Del: return 1;
    case Event::Sub: return 2;
    case Event::Tra: return 3;
    case Event::Ins: break;
  }
  throw std::invalid_argument("event_slot: Ins is not an inter-section state");
}

/// Forward lattice over one section: m queued symbols `ex` with channel
/// windows `km`, read suffix starting at y + ys.  `init[e]` seeds
/// F[0][0][e]; on return `term` holds the terminal row F[m][u][e] for
/// u = 0..mu_max and e in the four state slots (stride kStateEvents).
inline void forward_lattice(int m, const Nuc* ex, const KmerKey* km, const Nuc* y, int ys,
                            int mu_max, const std::array<double, 4>& init,
                            const TransitionModel& mdl, int i_max, std::vector<double>& work,
                            std::vector<double>& term) {
  const int ne = kStateEvents + i_max;
  const int cols = mu_max + 1;
  work.assign(static_cast<std::size_t>(m + 1) * cols * ne, 0.0);
  auto at = [&](int i, int u) { return work.data() + (static_cast<std::size_t>(i) * cols + u) * ne; };
  {
    double* f0 = at(0, 0);
    for (int e = 0; e < 4; ++e) f0[e] = init[static_cast<std::size_t>(e)];
  }
  for (int i = 0; i < m; ++i) {
    const auto& pt = mdl.prev_table(km[i]);
    const Nuc x = ex[i];
    const auto& srow = mdl.sub[x];
    for (int u = 0; u < cols; ++u) {
      const double* f = at(i, u);
      const Nuc yy = u < mu_max ? y[ys + u] : 0;
      for (int e = 0; e < ne; ++e) {
        const double fv = f[e];
        if (fv == 0.0) continue;
        const auto& pr = pt[static_cast<std::size_t>(slot_event(e))];
        const int run = e >= kStateEvents ? e - kStateEvents + 1 : 0;
        if (run < i_max && u < mu_max)
          at(i, u + 1)[kStateEvents + run] += pr[static_cast<int>(Event::Ins)] * 0.25 * fv;
        at(i + 1, u)[1] += pr[static_cast<int>(Event::Del)] * fv;
        if (u < mu_max) {
          at(i + 1, u + 1)[2] += pr[static_cast<int>(Event::Sub)] * srow[yy] * fv;
          if (yy == x) at(i + 1, u + 1)[3] += pr[static_cast<int>(Event::Tra)] * fv;
        }
      }
    }
  }
  term.assign(static_cast<std::size_t>(cols) * kStateEvents, 0.0);
  for (int u = 0; u < cols; ++u) {
    const double* f = at(m, u);
    for (int e = 0; e < kStateEvents; ++e) term[static_cast<std::size_t>(u) * kStateEvents + e] = f[e];
  }
}

/// Reverse lattice over one section: `fin[u * kStateEvents + e]` supplies the
/// completion weights at the terminal row (u = 0..mu_max); on return
/// `start[e]` holds G[0][0][e] for the four state slots.
inline void reverse_lattice(int m, const Nuc* ex, const KmerKey* km, const Nuc* y, int ys,
                            int mu_max, const std::vector<double>& fin, const TransitionModel& mdl,
                            int i_max, std::vector<double>& work, std::array<double, 4>& start) {
  const int ne = kStateEvents + i_max;
  const int cols = mu_max + 1;
  work.assign(static_cast<std::size_t>(m + 1) * cols * ne, 0.0);
  auto at = [&](int i, int u) { return work.data() + (static_cast<std::size_t>(i) * cols + u) * ne; };
  for (int u = 0; u < cols; ++u) {
    double* g = at(m, u);
    for (int e = 0; e < kStateEvents; ++e) g[e] = fin[static_cast<std::size_t>(u) * kStateEvents + e];
  }
  for (int i = m - 1; i >= 0; --i) {
    const auto& pt = mdl.prev_table(km[i]);
    const Nuc x = ex[i];
    const auto& srow = mdl.sub[x];
    for (int u = cols - 1; u >= 0; --u) {
      double* g = at(i, u);
      const Nuc yy = u < mu_max ? y[ys + u] : 0;
      for (int e = 0; e < ne; ++e) {
        const auto& pr = pt[static_cast<std::size_t>(slot_event(e))];
        double acc = pr[static_cast<int>(Event::Del)] * at(i + 1, u)[1];
        if (u < mu_max) {
          acc += pr[static_cast<int>(Event::Sub)] * srow[yy] * at(i + 1, u + 1)[2];
          if (yy == x) acc += pr[static_cast<int>(Event::Tra)] * at(i + 1, u + 1)[3];
          const int run = e >= kStateEvents ? e - kStateEvents + 1 : 0;
          if (run < i_max)
            acc += pr[static_cast<int>(Event::Ins)] * 0.25 * at(i, u + 1)[kStateEvents + run];
        }
        g[e] = acc;
      }
    }
  }
  const double* g0 = at(0, 0);
  for (int e = 0; e < kStateEvents; ++e) start[static_cast<std::size_t>(e)] = g0[e];
}

}  // namespace detail

/// Sum over all event chains that consume `xdot` (channel windows `kmers`,
/// one per symbol; insertions before a symbol condition on that symbol's
/// window) and produce exactly `ydot`, starting from previous event `e_in`,
/// with insertion runs capped at i_max.  Returned per terminal event,
/// indexed by Event; the Ins slot is always 0 (a section cannot end on an
/// insertion).
inline std::array<double, 4> branch_metric(const NucSeq& xdot, const std::vector<KmerKey>& kmers,
                                           const NucSeq& ydot, Event e_in,
                                           const TransitionModel& mdl, int i_max = 2) {
  if (xdot.empty()) throw std::invalid_argument("branch_metric: empty section");
  if (kmers.size() != xdot.size())
    throw std::invalid_argument("branch_metric: one window per consumed symbol required");
  if (i_max < 0) throw std::invalid_argument("branch_metric: i_max must be >= 0");
  std::array<double, 4> init = {0, 0, 0, 0};
  init[static_cast<std::size_t>(detail::event_slot(e_in))] = 1.0;
  const int m = static_cast<int>(xdot.size());
  const int mu = static_cast<int>(ydot.size());
  std::vector<double> work, term;
  detail::forward_lattice(m, xdot.data(), kmers.data(), ydot.data(), 0, mu, init, mdl, i_max,
                          work, term);
  std::array<double, 4> out = {0, 0, 0, 0};
  out[static_cast<int>(Event::Del)] = term[static_cast<std::size_t>(mu) * 4 + 1];
  out[static_cast<int>(Event::Sub)] = term[static_cast<std::size_t>(mu) * 4 + 2];
  out[static_cast<int>(Event::Tra)] = term[static_cast<std::size_t>(mu) * 4 + 3];
  return out;
}

// ---------------------------------------------------------------------------
// Posterior matrix.

/// Per-symbol posteriors for one read, rows ordered as the code symbols:
/// front primer, front index nucleotides, payload, back index nucleotides,
/// back primer (markers are not code symbols and have no rows).  `erasure`
/// marks reads the trellis cannot explain; their rows are uniform.
struct AppMatrix {
  std::vector<std::array<double, 4>> rows;
  bool erasure = false;
  double log_py = -std::numeric_limits<double>::infinity();  // up to a fixed constant
};

inline int app_rows(const code::JointCodeLayout& lay) {
  return 2 * lay.L_p + lay.index.n() + lay.L_o;
}

inline AppMatrix uniform_apps(const code::JointCodeLayout& lay, bool erasure = true) {
  AppMatrix m;
  m.rows.assign(static_cast<std::size_t>(app_rows(lay)), {0.25, 0.25, 0.25, 0.25});
  m.erasure = erasure;
  return m;
}

// ---------------------------------------------------------------------------
// Read decoder.

class ReadDecoder {
 public:
  ReadDecoder(const code::JointCodeLayout& lay, const TransitionModel& fwd,
              const TransitionModel& bwd, DecodeParams prm = {})
      : lay_(lay), fwd_model_(fwd), bwd_model_(bwd), prm_(prm) {
    prm_.validate();
    lay_.validate();
    fwd_rates_ = average_rates(fwd_model_);
    bwd_rates_ = average_rates(bwd_model_);
    fwd_chain_ = build_chain(fwd_model_, false);
    bwd_chain_ = build_chain(bwd_model_, true);
  }

  /// Per-boundary diagnostics: log p(y) recomputed at every trellis boundary
  /// (identical up to rounding when the recursion is consistent).
  struct Trace {
    std::vector<double> boundary_loglik;
  };

  AppMatrix decode(const channel::Read& r, Trace* trace = nullptr) const {
    const Chain& ch = r.backward ? bwd_chain_ : fwd_chain_;
    const TransitionModel& mdl = r.backward ? bwd_model_ : fwd_model_;
    const AvgRates& rates = r.backward ? bwd_rates_ : fwd_rates_;
    return run(ch, mdl, rates, r.seq, trace);
  }

  int rows() const { return app_rows(lay_); }
  const code::JointCodeLayout& layout() const { return lay_; }

 private:
  // One code hypothesis for a section: `vs` are the code symbols (forward
  // row order), `ex`/`km` the emitted strand symbols and their channel
  // windows in decode order, `from`/`to` context indices at the boundaries.
  struct Trans {
    std::uint16_t from = 0, to = 0;
    NucSeq ex;
    std::vector<KmerKey> km;
    NucSeq vs;
  };

  struct Section {
    std::vector<Trans> trans;
    int m = 0;       // strand symbols emitted by this section
    int l = 0;       // code symbols (posterior rows)
    int vrow = 0;    // first posterior row
    double prior = 1.0;
  };

  struct Chain {
    int L = 0;
    std::vector<Section> secs;
    std::vector<int> cuts;        // per boundary: strand symbols emitted
    std::vector<int> n_ctx;       // per boundary: context-state count
  };

  // Rescaled belief over (context, event slot, drift) at one boundary.
  struct Belief {
    std::vector<double> v;
    int lo = 0, w = 0;

    void init(int n_ctx, int lo_, int w_) {
      lo = lo_;
      w = w_;
      v.assign(static_cast<std::size_t>(n_ctx) * 4 * w, 0.0);
    }
    double* at(int s, int e) { return v.data() + (static_cast<std::size_t>(s) * 4 + e) * w; }
    const double* at(int s, int e) const {
      return v.data() + (static_cast<std::size_t>(s) * 4 + e) * w;
    }
    double normalize() {
      double sum = 0.0;
      for (double x : v) sum += x;
      if (sum > 0.0)
        for (double& x : v) x /= sum;
      return sum;
    }
  };

  code::JointCodeLayout lay_;
  TransitionModel fwd_model_, bwd_model_;
  DecodeParams prm_;
  AvgRates fwd_rates_, bwd_rates_;
  Chain fwd_chain_, bwd_chain_;

  // Pre-offset code content of one forward section: each candidate pairs the
  // code symbols (rows) with the strand symbols they place.
  struct CodeSec {
    std::vector<std::pair<NucSeq, NucSeq>> cands;  // (vs, strand symbols pre-offset)
    int a = 0;   // first strand position, 1-based
    int lx = 0;  // strand symbols
    int vrow = 0;
  };

  Chain build_chain(const TransitionModel& mdl, bool backward) const {
    const int k = mdl.k;
    if (k != 1 && k != 3)
      throw std::invalid_argument("ReadDecoder: only k = 1 and k = 3 models are supported");
    const int L = lay_.L_seq();

    // Forward code sections with offset applied.
    std::vector<CodeSec> fsecs;
    const NucSeq z = lay_.offset();
    int pos = 1, row = 0;
    auto add = [&](std::vector<std::pair<NucSeq, NucSeq>> cands, int l) {
      CodeSec cs;
      const int lx = static_cast<int>(cands.front().second.size());
      for (auto& [vs, pre] : cands) {
        for (int j = 0; j < lx; ++j) {
          const int q = pos + j;  // strand position
          const int rq = q - lay_.L_p;
          if (rq >= 1 && rq <= lay_.region_nt())
            pre[static_cast<std::size_t>(j)] =
                gf4::add(pre[static_cast<std::size_t>(j)], z[static_cast<std::size_t>(rq - 1)]);
        }
        cs.cands.emplace_back(std::move(vs), std::move(pre));
      }
      cs.a = pos;
      cs.lx = lx;
      cs.vrow = row;
      pos += lx;
      row += l;
      fsecs.push_back(std::move(cs));
    };
    auto add_known = [&](const NucSeq& p) {
      for (Nuc s : p) add({{NucSeq{s}, NucSeq{s}}}, 1);
    };
    auto add_index_half = [&](bool front) {
      const auto& ix = lay_.index;
      const std::size_t f = ix.front_sections();
      const std::size_t s0 = front ? 0 : f;
      const std::size_t s1 = front ? f : ix.sections.size();
      for (std::size_t s = s0; s < s1; ++s) {
        std::vector<std::pair<NucSeq, NucSeq>> cands;
        for (const NucSeq& wd : ix.sections[s].codebook) cands.emplace_back(wd, wd);
        add(std::move(cands), static_cast<int>(ix.sections[s].codebook.front().size()));
      }
    };
    add_known(lay_.primer1);
    add_index_half(true);
    const auto copies = lay_.inner.copies_after(lay_.L_o);
    for (int d = 0; d < lay_.L_o; ++d) {
      std::vector<std::pair<NucSeq, NucSeq>> cands;
      for (Nuc v = 0; v < 4; ++v)
        cands.emplace_back(NucSeq{v}, NucSeq(static_cast<std::size_t>(1 + copies[d]), v));
      add(std::move(cands), 1);
    }
    add_index_half(false);
    add_known(lay_.primer2);
    if (pos - 1 != L || row != app_rows(lay_))
      throw std::logic_error("ReadDecoder: section layout mismatch");

    // Map to decode order (reverse complement for backward reads).
    if (backward) {
      std::reverse(fsecs.begin(), fsecs.end());
      for (CodeSec& cs : fsecs) {
        cs.a = L + 1 - (cs.a + cs.lx - 1);
        for (auto& [vs, sx] : cs.cands) {
          (void)vs;
          sx = reverse_complement(sx);
        }
      }
    }

    // Expand into the section trellis: emission schedule, contexts, windows.
    Chain ch;
    ch.L = L;
    ch.cuts.push_back(0);
    std::vector<std::uint8_t> from_set = {0};  // boundary 0: nothing transmitted
    ch.n_ctx.push_back(1);
    for (const CodeSec& cs : fsecs) {
      const int a = cs.a, b = cs.a + cs.lx - 1;
      std::vector<int> emits;
      if (k == 3) {
        const int pend = a - 1;
        if (pend >= 1 && channel::kmer_radius(k, static_cast<std::size_t>(pend),
                                              static_cast<std::size_t>(L)) == 1)
          emits.push_back(pend);
      }
      for (int j = a; j <= b; ++j)
        if (j + channel::kmer_radius(k, static_cast<std::size_t>(j), static_cast<std::size_t>(L)) <=
            b)
          emits.push_back(j);

      Section sec;
      sec.m = static_cast<int>(emits.size());
      sec.l = static_cast<int>(cs.cands.front().first.size());
      sec.vrow = cs.vrow;
      sec.prior = 1.0 / static_cast<double>(cs.cands.size());

      std::vector<std::uint8_t> to_set;
      std::array<int, 16> to_idx;
      to_idx.fill(-1);
      for (std::size_t fi = 0; fi < from_set.size(); ++fi) {
        const Nuc c1 = (from_set[fi] >> 2) & 3, c2 = from_set[fi] & 3;
        for (const auto& [vs, sx] : cs.cands) {
          auto sym = [&](int q) -> Nuc {
            if (q >= a) return sx[static_cast<std::size_t>(q - a)];
            return q == a - 1 ? c2 : c1;
          };
          Trans tr;
          tr.from = static_cast<std::uint16_t>(fi);
          tr.vs = vs;
          tr.ex.reserve(emits.size());
          tr.km.reserve(emits.size());
          for (int j : emits) {
            const int r = channel::kmer_radius(k, static_cast<std::size_t>(j),
                                               static_cast<std::size_t>(L));
            Nuc win[3];
            for (int q = j - r; q <= j + r; ++q) win[q - (j - r)] = sym(q);
            tr.km.push_back(channel::kmer_key(win, static_cast<std::size_t>(2 * r + 1)));
            tr.ex.push_back(sym(j));
          }
          std::uint8_t tc = 0;
          if (k == 3) {
            const Nuc n2 = sym(b);
            tc = b >= 2 ? static_cast<std::uint8_t>((sym(b - 1) << 2) | n2) : n2;
          }
          if (to_idx[tc] < 0) {
            to_idx[tc] = static_cast<int>(to_set.size());
            to_set.push_back(tc);
          }
          tr.to = static_cast<std::uint16_t>(to_idx[tc]);
          sec.trans.push_back(std::move(tr));
        }
      }
      ch.cuts.push_back(ch.cuts.back() + sec.m);
      ch.n_ctx.push_back(static_cast<int>(to_set.size()));
      ch.secs.push_back(std::move(sec));
      from_set = std::move(to_set);
    }
    if (ch.cuts.back() != L) throw std::logic_error("ReadDecoder: emission schedule mismatch");
    return ch;
  }

  AppMatrix run(const Chain& ch, const TransitionModel& mdl, const AvgRates& rates,
                const NucSeq& y, Trace* trace) const {
    const int L_read = static_cast<int>(y.size());
    const DriftWindow win =
        drift_window(ch.cuts, ch.L, L_read, rates.p_ins, rates.p_del, prm_);
    if (!win.ok) return uniform_apps(lay_);
    const std::size_t S = ch.secs.size();

    // Backward pass: completion beliefs per boundary, rescaled.
    std::vector<Belief> beta(S + 1);
    std::vector<double> beta_log(S + 1, 0.0);
    beta[S].init(ch.n_ctx[S], win.lo[S], win.width(S));
    {
      const int dn = (L_read - ch.L) - win.lo[S];
      for (int s = 0; s < ch.n_ctx[S]; ++s)
        for (int e = 1; e < 4; ++e) beta[S].at(s, e)[dn] = 1.0 / 12.0;
    }
    std::vector<double> work, fin;
    std::array<double, 4> g0;
    for (std::size_t t = S; t-- > 0;) {
      const Section& sec = ch.secs[t];
      Belief& prev = beta[t];
      const Belief& next = beta[t + 1];
      prev.init(ch.n_ctx[t], win.lo[t], win.width(t));
      for (const Trans& tr : sec.trans) {
        for (int d = win.lo[t]; d <= win.hi[t]; ++d) {
          const int ys = ch.cuts[t] + d;
          const int mu_max =
              std::min(sec.m + win.hi[t + 1] - d, L_read - ys);
          const int u0 = std::max(0, sec.m + win.lo[t + 1] - d);
          if (mu_max < u0) continue;
          fin.assign(static_cast<std::size_t>(mu_max + 1) * 4, 0.0);
          bool any = false;
          for (int u = u0; u <= mu_max; ++u) {
            const int dn = d + u - sec.m - win.lo[t + 1];
            for (int e = 0; e < 4; ++e) {
              const double bv = next.at(tr.to, e)[dn];
              if (bv != 0.0) {
                fin[static_cast<std::size_t>(u) * 4 + e] = bv;
                any = true;
              }
            }
          }
          if (!any) continue;
          detail::reverse_lattice(sec.m, tr.ex.data(), tr.km.data(), y.data(), ys, mu_max, fin,
                                  mdl, prm_.i_max, work, g0);
          const int di = d - win.lo[t];
          for (int e = 0; e < 4; ++e) prev.at(tr.from, e)[di] += sec.prior * g0[e];
        }
      }
      const double scale = prev.normalize();
      if (scale <= 0.0) return uniform_apps(lay_);
      beta_log[t] = beta_log[t + 1] + std::log(scale);
    }

    // Forward pass with posterior accumulation.
    AppMatrix out;
    out.rows.assign(static_cast<std::size_t>(app_rows(lay_)), {0, 0, 0, 0});
    Belief alpha;
    alpha.init(ch.n_ctx[0], win.lo[0], win.width(0));
    alpha.at(0, 0)[0 - win.lo[0]] = 1.0;
    double alpha_log = 0.0;
    if (trace) {
      trace->boundary_loglik.assign(S + 1, 0.0);
      trace->boundary_loglik[0] = boundary_loglik(alpha, beta[0], alpha_log, beta_log[0]);
    }
    out.log_py = boundary_loglik(alpha, beta[0], alpha_log, beta_log[0]);
    std::array<double, 4> init;
    std::vector<double> term;
    for (std::size_t t = 0; t < S; ++t) {
      const Section& sec = ch.secs[t];
      const Belief& next_beta = beta[t + 1];
      Belief next;
      next.init(ch.n_ctx[t + 1], win.lo[t + 1], win.width(t + 1));
      for (const Trans& tr : sec.trans) {
        double mass = 0.0;
        for (int d = win.lo[t]; d <= win.hi[t]; ++d) {
          const int di = d - win.lo[t];
          bool live = false;
          for (int e = 0; e < 4; ++e) {
            init[static_cast<std::size_t>(e)] = alpha.at(tr.from, e)[di];
            live = live || init[static_cast<std::size_t>(e)] != 0.0;
          }
          if (!live) continue;
          const int ys = ch.cuts[t] + d;
          const int mu_max = std::min(sec.m + win.hi[t + 1] - d, L_read - ys);
          const int u0 = std::max(0, sec.m + win.lo[t + 1] - d);
          if (mu_max < u0) continue;
          detail::forward_lattice(sec.m, tr.ex.data(), tr.km.data(), y.data(), ys, mu_max, init,
                                  mdl, prm_.i_max, work, term);
          for (int u = u0; u <= mu_max; ++u) {
            const int dn = d + u - sec.m - win.lo[t + 1];
            for (int e = 0; e < 4; ++e) {
              const double v = term[static_cast<std::size_t>(u) * 4 + e];
              if (v == 0.0) continue;
              next.at(tr.to, e)[dn] += sec.prior * v;
              mass += sec.prior * v * next_beta.at(tr.to, e)[dn];
            }
          }
        }
        if (mass != 0.0)
          for (int j = 0; j < sec.l; ++j)
            out.rows[static_cast<std::size_t>(sec.vrow + j)][tr.vs[static_cast<std::size_t>(j)]] +=
                mass;
      }
      const double scale = next.normalize();
      if (scale <= 0.0) return uniform_apps(lay_);
      alpha_log += std::log(scale);
      alpha = std::move(next);
      if (trace)
        trace->boundary_loglik[t + 1] =
            boundary_loglik(alpha, beta[t + 1], alpha_log, beta_log[t + 1]);
    }

    for (auto& row : out.rows) {
      const double sum = row[0] + row[1] + row[2] + row[3];
      if (sum <= 0.0) return uniform_apps(lay_);
      for (double& x : row) x /= sum;
    }
    return out;
  }

  static double boundary_loglik(const Belief& a, const Belief& b, double a_log, double b_log) {
    double dot = 0.0;
    for (std::size_t i = 0; i < a.v.size(); ++i) dot += a.v[i] * b.v[i];
    return dot > 0.0 ? std::log(dot) + a_log + b_log
                     : -std::numeric_limits<double>::infinity();
  }
};

/// One-shot convenience wrapper; building a ReadDecoder amortizes the
/// trellis over many reads.
inline AppMatrix decode_read(const channel::Read& r, const code::JointCodeLayout& lay,
                             const TransitionModel& fwd, const TransitionModel& bwd,
                             DecodeParams prm = {}) {
  return ReadDecoder(lay, fwd, bwd, prm).decode(r);
}

}  // namespace dnastore::bcjr
