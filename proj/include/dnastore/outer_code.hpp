#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <utility>
#include <vector>

#include "gf4.hpp"
#include "parallel.hpp"
#include "rng.hpp"

namespace dnastore::code {

/// Per-symbol probability 4-vector over the nucleotide alphabet.
using AppVec = std::array<double, 4>;

inline AppVec uniform_app() { return {0.25, 0.25, 0.25, 0.25}; }

inline AppVec delta_app(Nuc v) {
  AppVec a{0.0, 0.0, 0.0, 0.0};
  a[v] = 1.0;
  return a;
}

namespace detail {

/// In-place 4-point Walsh-Hadamard transform; self-inverse up to a factor 4.
/// Diagonalizes convolution over the additive group of GF(4).
inline void wht4(AppVec& p) {
  const double a = p[0] + p[1], b = p[0] - p[1];
  const double c = p[2] + p[3], d = p[2] - p[3];
  p = {a + c, b + d, a - c, b - d};
}

/// Dense GF(4) matrix stored as two bit planes (value = p0 + p1*w with
/// w^2 = w + 1).  Row operations cost O(cols/64) words, which keeps the
/// one-time terminal-block inversion of the encoder cheap.
class Gf4Planes {
 public:
  Gf4Planes(int rows, int cols)
      : rows_(rows), cols_(cols), words_((cols + 63) / 64),
        p0_(static_cast<std::size_t>(rows) * words_, 0),
        p1_(static_cast<std::size_t>(rows) * words_, 0) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  Nuc get(int r, int c) const {
    const std::size_t w = idx(r) + static_cast<std::size_t>(c >> 6);
    const int b = c & 63;
    return static_cast<Nuc>(((p0_[w] >> b) & 1u) | (((p1_[w] >> b) & 1u) << 1));
  }

  void set(int r, int c, Nuc v) {
    const std::size_t w = idx(r) + static_cast<std::size_t>(c >> 6);
    const std::uint64_t bit = std::uint64_t{1} << (c & 63);
    p0_[w] = (p0_[w] & ~bit) | ((v & 1u) ? bit : 0);
    p1_[w] = (p1_[w] & ~bit) | ((v & 2u) ? bit : 0);
  }

  void row_swap(int a, int b) {
    if (a == b) return;
    for (int w = 0; w < words_; ++w) {
      std::swap(p0_[idx(a) + w], p0_[idx(b) + w]);
      std::swap(p1_[idx(a) + w], p1_[idx(b) + w]);
    }
  }

  /// row r *= s (s != 0).
  void row_scale(int r, Nuc s) {
    if (s == 1) return;
    std::uint64_t* a = &p0_[idx(r)];
    std::uint64_t* b = &p1_[idx(r)];
    for (int w = 0; w < words_; ++w) {
      const std::uint64_t q0 = a[w], q1 = b[w];
      if (s == 2) {  // w * (q0 + q1 w) = q1 + (q0 + q1) w
        a[w] = q1;
        b[w] = q0 ^ q1;
      } else {  // (1 + w) * (q0 + q1 w) = (q0 + q1) + q0 w
        a[w] = q0 ^ q1;
        b[w] = q0;
      }
    }
  }

  /// row dst += s * row src (s != 0).
  void row_addmul(int dst, int src, Nuc s) {
    std::uint64_t* d0 = &p0_[idx(dst)];
    std::uint64_t* d1 = &p1_[idx(dst)];
    const std::uint64_t* s0 = &p0_[idx(src)];
    const std::uint64_t* s1 = &p1_[idx(src)];
    for (int w = 0; w < words_; ++w) {
      if (s == 1) {
        d0[w] ^= s0[w];
        d1[w] ^= s1[w];
      } else if (s == 2) {
        d0[w] ^= s1[w];
        d1[w] ^= s0[w] ^ s1[w];
      } else {
        d0[w] ^= s0[w] ^ s1[w];
        d1[w] ^= s0[w];
      }
    }
  }

  /// Gauss-Jordan inverse; returns false when the matrix is singular.
  bool invert(Gf4Planes& out) const {
    if (rows_ != cols_) throw std::logic_error("Gf4Planes::invert: not square");
    Gf4Planes work = *this;
    out = Gf4Planes(rows_, cols_);
    for (int i = 0; i < rows_; ++i) out.set(i, i, 1);
    for (int col = 0; col < cols_; ++col) {
      int piv = -1;
      for (int r = col; r < rows_; ++r)
        if (work.get(r, col) != 0) {
          piv = r;
          break;
        }
      if (piv < 0) return false;
      work.row_swap(piv, col);
      out.row_swap(piv, col);
      const Nuc v = work.get(col, col);
      if (v != 1) {
        const Nuc s = gf4::inv(v);
        work.row_scale(col, s);
        out.row_scale(col, s);
      }
      for (int r = 0; r < rows_; ++r) {
        if (r == col) continue;
        const Nuc f = work.get(r, col);
        if (f == 0) continue;
        work.row_addmul(r, col, f);
        out.row_addmul(r, col, f);
      }
    }
    return true;
  }

  /// y = M * x over GF(4).
  NucSeq matvec(const NucSeq& x) const {
    if (static_cast<int>(x.size()) != cols_)
      throw std::invalid_argument("Gf4Planes::matvec: size mismatch");
    std::vector<std::uint64_t> x0(words_, 0), x1(words_, 0);
    for (int c = 0; c < cols_; ++c) {
      if (x[static_cast<std::size_t>(c)] & 1u) x0[c >> 6] |= std::uint64_t{1} << (c & 63);
      if (x[static_cast<std::size_t>(c)] & 2u) x1[c >> 6] |= std::uint64_t{1} << (c & 63);
    }
    NucSeq y(static_cast<std::size_t>(rows_), 0);
    for (int r = 0; r < rows_; ++r) {
      const std::uint64_t* r0 = &p0_[idx(r)];
      const std::uint64_t* r1 = &p1_[idx(r)];
      std::uint64_t a = 0, b = 0, c = 0;
      for (int w = 0; w < words_; ++w) {
        a ^= r0[w] & x0[w];
        b ^= r1[w] & x1[w];
        c ^= (r0[w] ^ r1[w]) & x1[w];
        c ^= r1[w] & x0[w];
      }
      // value = (par(r0&x0) ^ par(r1&x1)) + (par(r0&x1) ^ par(r1&x0) ^ par(r1&x1)) w
      const int c0 = (std::popcount(a) ^ std::popcount(b)) & 1;
      const int c1 = std::popcount(c) & 1;
      y[static_cast<std::size_t>(r)] = static_cast<Nuc>(c0 | (c1 << 1));
    }
    return y;
  }

 private:
  std::size_t idx(int r) const { return static_cast<std::size_t>(r) * words_; }

  int rows_, cols_, words_;
  std::vector<std::uint64_t> p0_, p1_;
};

}  // namespace detail

/// Uniformly random symbol permutation applied to the outer codeword.
struct Interleaver {
  std::vector<std::int32_t> perm;  // out[i] = in[perm[i]]

  static Interleaver random(std::int64_t n, Philox rng) {
    Interleaver il;
    il.perm.resize(static_cast<std::size_t>(n));
    for (std::int64_t i = 0; i < n; ++i) il.perm[static_cast<std::size_t>(i)] = static_cast<std::int32_t>(i);
    rng.shuffle(il.perm);
    return il;
  }

  template <class T>
  std::vector<T> interleave(const std::vector<T>& in) const {
    if (in.size() != perm.size()) throw std::invalid_argument("interleave: size mismatch");
    std::vector<T> out(in.size());
    for (std::size_t i = 0; i < in.size(); ++i) out[i] = in[static_cast<std::size_t>(perm[i])];
    return out;
  }

  template <class T>
  std::vector<T> deinterleave(const std::vector<T>& in) const {
    if (in.size() != perm.size()) throw std::invalid_argument("deinterleave: size mismatch");
    std::vector<T> out(in.size());
    for (std::size_t i = 0; i < in.size(); ++i) out[static_cast<std::size_t>(perm[i])] = in[i];
    return out;
  }
};

/// Spatially coupled protograph: the base all-ones row of width n_B is copied
/// o_sc times and each copy is spread over its own and the m_sc following
/// block-rows, preserving symbol degree m_sc+1 everywhere.  Lifting replaces
/// every protograph edge by a Q_p x Q_p single-shift circulant whose entries
/// carry independent nonzero GF(4) weights.
struct ScLdpcSpec {
  int n_B = 3;
  int m_sc = 2;
  int o_sc = 8;
  int Q_p = 16;
  std::int64_t target_n_o = 0;  // 0 => no shortening

  std::int64_t n_full() const { return static_cast<std::int64_t>(Q_p) * n_B * o_sc; }
  std::int64_t check_count() const { return static_cast<std::int64_t>(Q_p) * (o_sc + m_sc); }
  std::int64_t k_full() const { return n_full() - check_count(); }
  std::int64_t n_o() const { return target_n_o > 0 ? target_n_o : n_full(); }
  std::int64_t shortened_count() const { return n_full() - n_o(); }
  std::int64_t k_o() const { return k_full() - shortened_count(); }
  double rate_fraction() const { return static_cast<double>(k_o()) / static_cast<double>(n_o()); }
  double rate_bits_per_nt() const { return 2.0 * rate_fraction(); }

  void validate() const {
    if (m_sc < 1) throw std::invalid_argument("ScLdpcSpec: m_sc must be >= 1");
    if (n_B < m_sc + 1) throw std::invalid_argument("ScLdpcSpec: n_B must be >= m_sc + 1");
    if (o_sc < m_sc + 1) throw std::invalid_argument("ScLdpcSpec: o_sc must be >= m_sc + 1");
    if (Q_p < 1) throw std::invalid_argument("ScLdpcSpec: Q_p must be >= 1");
    if (target_n_o < 0 || target_n_o > n_full())
      throw std::invalid_argument("ScLdpcSpec: target_n_o out of range");
    if (target_n_o > 0 && shortened_count() > k_full())
      throw std::invalid_argument("ScLdpcSpec: cannot shorten below dimension zero");
    if (k_o() <= 0) throw std::invalid_argument("ScLdpcSpec: nonpositive dimension");
  }
};

/// Two-sided sliding-window belief-propagation schedule.  Each window runs a
/// doubled iteration count while it still covers the terminal block-rows at
/// its own end of the chain, to kick-start decoding.
struct WindowSchedule {
  int window_rows = 9;
  int iters = 5;
  int boundary_iters = 10;
};

class OuterCode {
 public:
  struct DecodeResult {
    NucSeq u_hat;          // recovered data symbols (length k_o)
    NucSeq word;           // codeword in natural order (length n_full); the
                           // re-encoding of u_hat on success, raw decisions otherwise
    bool success = false;  // data determined: stable, tie-free, self-consistent
    bool stable = false;        // no decision flip over the final two steps
    int unresolved_data = 0;    // data symbols with tied beliefs
    int inconsistent = 0;       // confident symbols disagreeing with re-encoding
  };

  OuterCode(const ScLdpcSpec& spec, Philox rng) : spec_(spec) {
    spec_.validate();
    constexpr int kMaxAttempts = 16;
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
      if (build(rng.fold({1, static_cast<std::uint64_t>(attempt)}))) {
        construction_attempts_ = attempt + 1;
        return;
      }
    }
    throw std::runtime_error("OuterCode: terminal block rank-deficient after retries");
  }

  const ScLdpcSpec& spec() const { return spec_; }
  std::int64_t n_full() const { return spec_.n_full(); }
  std::int64_t n_o() const { return spec_.n_o(); }
  std::int64_t k_o() const { return spec_.k_o(); }
  std::int64_t check_count() const { return spec_.check_count(); }
  int construction_attempts() const { return construction_attempts_; }
  const std::vector<std::int32_t>& shortened_vns() const { return shortened_; }
  const std::vector<std::int32_t>& data_vns() const { return data_vns_; }
  const std::vector<std::int32_t>& transmitted_vns() const { return transmitted_; }

  /// Encode data symbols; returns the transmitted codeword (natural VN order
  /// with shortened positions removed).
  NucSeq encode(const NucSeq& u) const {
    NucSeq natural = encode_natural(u);
    NucSeq out(transmitted_.size());
    for (std::size_t i = 0; i < transmitted_.size(); ++i)
      out[i] = natural[static_cast<std::size_t>(transmitted_[i])];
    return out;
  }

  /// Encode and keep shortened zeros in place (length n_full).
  NucSeq encode_natural(const NucSeq& u) const {
    if (static_cast<std::int64_t>(u.size()) != k_o())
      throw std::invalid_argument("OuterCode::encode: data length mismatch");
    const int Q = spec_.Q_p;
    NucSeq x(static_cast<std::size_t>(n_full()), 0);
    for (std::size_t i = 0; i < data_vns_.size(); ++i)
      x[static_cast<std::size_t>(data_vns_[i])] = u[i];

    // Forward pass: block-row r determines the single parity group of
    // spatial position r.
    std::vector<Nuc> rhs(static_cast<std::size_t>(Q));
    for (int r = 0; r <= spec_.o_sc - 2; ++r) {
      std::fill(rhs.begin(), rhs.end(), Nuc{0});
      const BlockEdge* target = nullptr;
      for (const BlockEdge& be : row_blocks_[static_cast<std::size_t>(r)]) {
        if (be.t == r && be.j == spec_.n_B - 1) {
          target = &be;
          continue;
        }
        accumulate(be, x, rhs);
      }
      for (int l = 0; l < Q; ++l) {
        const Nuc w = weights_[static_cast<std::size_t>(target->woff + l)];
        x[static_cast<std::size_t>(vn_id(r, spec_.n_B - 1, (l + target->shift) % Q))] =
            gf4::mul(gf4::inv(w), rhs[static_cast<std::size_t>(l)]);
      }
    }

    // Terminal pass: the last m_sc+1 block-rows jointly determine the m_sc+1
    // parity groups of the final spatial position via the precomputed
    // inverse of the terminal block.
    const int pg = spec_.m_sc + 1;
    NucSeq b(static_cast<std::size_t>(pg) * Q, 0);
    for (int rho = 0; rho < pg; ++rho) {
      const int r = spec_.o_sc - 1 + rho;
      std::fill(rhs.begin(), rhs.end(), Nuc{0});
      for (const BlockEdge& be : row_blocks_[static_cast<std::size_t>(r)]) {
        if (be.t == spec_.o_sc - 1 && be.j >= spec_.n_B - pg) continue;
        accumulate(be, x, rhs);
      }
      std::copy(rhs.begin(), rhs.end(), b.begin() + static_cast<std::ptrdiff_t>(rho) * Q);
    }
    const NucSeq p = tinv_.matvec(b);
    for (int kappa = 0; kappa < pg; ++kappa)
      for (int m = 0; m < Q; ++m)
        x[static_cast<std::size_t>(vn_id(spec_.o_sc - 1, spec_.n_B - pg + kappa, m))] =
            p[static_cast<std::size_t>(kappa) * Q + static_cast<std::size_t>(m)];
    return x;
  }

  bool syndrome_ok(const NucSeq& natural) const {
    if (static_cast<std::int64_t>(natural.size()) != n_full())
      throw std::invalid_argument("syndrome_ok: expects natural-order word");
    for (std::int64_t cn = 0; cn < check_count(); ++cn) {
      Nuc acc = 0;
      for (std::int64_t e = cn_off_[static_cast<std::size_t>(cn)];
           e < cn_off_[static_cast<std::size_t>(cn) + 1]; ++e)
        acc = static_cast<Nuc>(acc ^ gf4::mul(cn_w_[static_cast<std::size_t>(e)],
                                              natural[static_cast<std::size_t>(cn_vn_[static_cast<std::size_t>(e)])]));
      if (acc != 0) return false;
    }
    return true;
  }

  /// Two windows slide simultaneously from the two chain ends across all
  /// block-rows; each window step runs flooding iterations restricted to the
  /// window's checks and adjacent symbols.
  DecodeResult decode_window(const std::vector<AppVec>& apps, const WindowSchedule& ws = {},
                             int threads = 1) const {
    Workspace wk = init_workspace(apps);
    const bool stable = window_sweep(wk, ws, threads);
    return finish(wk, stable);
  }

  /// Erasure-channel decoding: the sliding-window pass peels everything the
  /// propagation waves can reach, and any residual unknowns are then solved
  /// exactly as a sparse linear system over the field.  Propagation stalls
  /// when a stretch of the chain is locally erased beyond its threshold even
  /// though the system there is still uniquely solvable — including the case
  /// where both waves die and strand most of the chain — and the algebraic
  /// step closes exactly that gap.  Because checks span only adjacent
  /// spatial positions the elimination stays banded and affordable even for
  /// chain-wide residues; max_unknowns merely guards against degenerate
  /// inputs (e.g. everything erased).  Inputs should be erasure-like
  /// (certain or uniform per symbol).
  DecodeResult decode_erasures(const std::vector<AppVec>& apps, const WindowSchedule& ws = {},
                               int threads = 1, std::int64_t max_unknowns = 30000) const {
    Workspace wk = init_workspace(apps);
    const bool stable = window_sweep(wk, ws, threads);
    refresh_decisions(wk, 0, spec_.o_sc + spec_.m_sc - 1, threads);
    solve_residual(wk, max_unknowns);
    return finish(wk, stable);
  }

  /// Full-graph flooding schedule (reference decoder).
  DecodeResult decode_flooding(const std::vector<AppVec>& apps, int max_iters,
                               int threads = 1) const {
    const int R = spec_.o_sc + spec_.m_sc;
    Workspace wk = init_workspace(apps);
    bool changed_prev = false, changed_last = false;
    for (int it = 0; it < max_iters; ++it) {
      run_window(wk, 0, R - 1, 1, threads);
      const bool changed = refresh_decisions(wk, 0, R - 1, threads);
      changed_prev = changed_last;
      changed_last = changed;
      if (!changed && !changed_prev && syndrome_ok(wk.hard)) break;
    }
    return finish(wk, !changed_last && !changed_prev);
  }

  /// Support and weights in an alist-style text layout:
  /// "n m q", max degrees, degree lists, then (index, weight) pairs
  /// per symbol node and per check node (1-based indices).
  void export_alist(std::ostream& os) const {
    const std::int64_t n = n_full(), m = check_count();
    os << n << ' ' << m << " 4\n";
    std::int64_t dcmax = 0;
    for (std::int64_t cn = 0; cn < m; ++cn)
      dcmax = std::max(dcmax, cn_off_[static_cast<std::size_t>(cn) + 1] - cn_off_[static_cast<std::size_t>(cn)]);
    os << (spec_.m_sc + 1) << ' ' << dcmax << '\n';
    for (std::int64_t v = 0; v < n; ++v)
      os << (vn_off_[static_cast<std::size_t>(v) + 1] - vn_off_[static_cast<std::size_t>(v)])
         << (v + 1 == n ? '\n' : ' ');
    for (std::int64_t cn = 0; cn < m; ++cn)
      os << (cn_off_[static_cast<std::size_t>(cn) + 1] - cn_off_[static_cast<std::size_t>(cn)])
         << (cn + 1 == m ? '\n' : ' ');
    for (std::int64_t v = 0; v < n; ++v) {
      for (std::int64_t k = vn_off_[static_cast<std::size_t>(v)]; k < vn_off_[static_cast<std::size_t>(v) + 1]; ++k) {
        const std::int64_t e = vn_edge_[static_cast<std::size_t>(k)];
        os << (edge_cn_[static_cast<std::size_t>(e)] + 1) << ' '
           << static_cast<int>(cn_w_[static_cast<std::size_t>(e)])
           << (k + 1 == vn_off_[static_cast<std::size_t>(v) + 1] ? '\n' : ' ');
      }
    }
    for (std::int64_t cn = 0; cn < m; ++cn) {
      for (std::int64_t e = cn_off_[static_cast<std::size_t>(cn)]; e < cn_off_[static_cast<std::size_t>(cn) + 1]; ++e)
        os << (cn_vn_[static_cast<std::size_t>(e)] + 1) << ' '
           << static_cast<int>(cn_w_[static_cast<std::size_t>(e)])
           << (e + 1 == cn_off_[static_cast<std::size_t>(cn) + 1] ? '\n' : ' ');
    }
  }

 private:
  struct BlockEdge {
    int t, j;           // spatial position and symbol group
    int shift;          // circulant shift: check row l connects lifted column (l+shift) mod Q_p
    std::int64_t woff;  // weights_[woff + l] is the edge weight at check row l
  };

  struct Workspace {
    std::vector<AppVec> prior;            // natural order
    std::vector<AppVec> v2c, c2v;         // per edge, check-major order
    NucSeq hard;                          // current decision, natural order
    std::vector<std::uint8_t> tie;        // belief has no unique maximizer
  };

  std::int64_t vn_id(int t, int j, int l) const {
    return (static_cast<std::int64_t>(t) * spec_.n_B + j) * spec_.Q_p + l;
  }

  /// The m_sc+1 checks attached to a symbol (available before the flat
  /// adjacency arrays exist).
  void checks_of(std::int32_t vn, std::vector<std::int32_t>& out) const {
    const int Q = spec_.Q_p, nB = spec_.n_B;
    const int l = static_cast<int>(vn % Q);
    const int tj = static_cast<int>(vn / Q);
    const int j = tj % nB, t = tj / nB;
    out.clear();
    for (int r = t; r <= t + spec_.m_sc; ++r) {
      for (const BlockEdge& be : row_blocks_[static_cast<std::size_t>(r)])
        if (be.t == t && be.j == j) {
          const int ell = ((l - be.shift) % Q + Q) % Q;
          out.push_back(static_cast<std::int32_t>(r * Q + ell));
          break;
        }
    }
  }

  /// Shortening policy: the budget is spread as evenly as possible across
  /// the spatial positions, and within a position it fills one systematic
  /// group after another (random group order, random lanes within the last,
  /// partially filled group).  Every check then sees nearly the same number
  /// of known symbols, so the surviving check degrees stay concentrated and
  /// the erasure threshold is preserved even under heavy shortening.  Both
  /// extremes fail: scattering the budget over uniformly random symbols
  /// leaves a heavy tail of checks with few known neighbors, while
  /// shortening whole positions carves low-rate walls across the coupling
  /// chain that stall the decoding wave.
  void pick_shortened(const std::vector<std::int32_t>& systematic, std::int64_t s, Philox rng) {
    const int Q = spec_.Q_p;
    std::vector<std::int32_t> groups;
    for (auto v : systematic)
      if (groups.empty() || groups.back() != v / Q) groups.push_back(v / Q);
    std::vector<std::int32_t> positions;
    std::map<std::int32_t, std::vector<std::int32_t>> by_pos;
    for (auto g : groups) {
      const std::int32_t t = g / spec_.n_B;
      auto& lst = by_pos[t];
      if (lst.empty()) positions.push_back(t);
      lst.push_back(g);
    }
    rng.fold(0).shuffle(positions);
    std::size_t seed_ix = 1;
    for (auto& [t, lst] : by_pos) rng.fold(seed_ix++).shuffle(lst);

    // Split the lane budget evenly over positions, respecting capacities.
    std::map<std::int32_t, std::int64_t> quota;
    std::int64_t assigned = 0;
    std::vector<std::int32_t> open(positions);
    while (assigned < s) {
      const std::int64_t per = (s - assigned) / static_cast<std::int64_t>(open.size());
      std::vector<std::int32_t> still_open;
      for (auto t : open) {
        const std::int64_t cap = static_cast<std::int64_t>(by_pos[t].size()) * Q;
        const std::int64_t step = std::min<std::int64_t>(
            {cap - quota[t], s - assigned, std::max<std::int64_t>(per, 1)});
        quota[t] += step;
        assigned += step;
        if (quota[t] < cap) still_open.push_back(t);
        if (assigned >= s) break;
      }
      open = std::move(still_open);
    }

    shortened_.clear();
    shortened_.reserve(static_cast<std::size_t>(s));
    for (auto t : positions) {
      std::int64_t left = quota[t];
      for (auto g : by_pos[t]) {
        if (left <= 0) break;
        const std::int64_t take = std::min<std::int64_t>(left, Q);
        if (take == Q) {
          for (int l = 0; l < Q; ++l) shortened_.push_back(g * Q + l);
        } else {
          std::vector<std::int32_t> lanes(static_cast<std::size_t>(Q));
          std::iota(lanes.begin(), lanes.end(), 0);
          rng.fold(seed_ix++).shuffle(lanes);
          for (std::int64_t i = 0; i < take; ++i)
            shortened_.push_back(g * Q + lanes[static_cast<std::size_t>(i)]);
        }
        left -= take;
      }
    }
    std::sort(shortened_.begin(), shortened_.end());
  }

  void accumulate(const BlockEdge& be, const NucSeq& x, std::vector<Nuc>& rhs) const {
    const int Q = spec_.Q_p;
    for (int l = 0; l < Q; ++l) {
      const Nuc w = weights_[static_cast<std::size_t>(be.woff + l)];
      const Nuc v = x[static_cast<std::size_t>(vn_id(be.t, be.j, (l + be.shift) % Q))];
      rhs[static_cast<std::size_t>(l)] = static_cast<Nuc>(rhs[static_cast<std::size_t>(l)] ^ gf4::mul(w, v));
    }
  }

  bool build(Philox rng) {
    const int Q = spec_.Q_p, nB = spec_.n_B, o = spec_.o_sc, msc = spec_.m_sc;
    const int R = o + msc;
    Philox shift_rng = rng.fold(0);
    Philox weight_rng = rng.fold(1);
    Philox shorten_rng = rng.fold(2);

    row_blocks_.assign(static_cast<std::size_t>(R), {});
    weights_.clear();
    for (int r = 0; r < R; ++r) {
      const int t_lo = std::max(0, r - msc), t_hi = std::min(r, o - 1);
      for (int t = t_lo; t <= t_hi; ++t)
        for (int j = 0; j < nB; ++j) {
          BlockEdge be;
          be.t = t;
          be.j = j;
          be.shift = static_cast<int>(shift_rng.below(static_cast<std::uint64_t>(Q)));
          be.woff = static_cast<std::int64_t>(weights_.size());
          for (int l = 0; l < Q; ++l)
            weights_.push_back(static_cast<Nuc>(1 + weight_rng.below(3)));
          row_blocks_[static_cast<std::size_t>(r)].push_back(be);
        }
    }

    // Terminal block: last m_sc+1 rows restricted to the parity groups of the
    // final spatial position.
    const int pg = msc + 1;
    detail::Gf4Planes T(pg * Q, pg * Q);
    for (int rho = 0; rho < pg; ++rho)
      for (const BlockEdge& be : row_blocks_[static_cast<std::size_t>(o - 1 + rho)]) {
        if (be.t != o - 1 || be.j < nB - pg) continue;
        const int kappa = be.j - (nB - pg);
        for (int l = 0; l < Q; ++l)
          T.set(rho * Q + l, kappa * Q + (l + be.shift) % Q,
                weights_[static_cast<std::size_t>(be.woff + l)]);
      }
    tinv_ = detail::Gf4Planes(0, 0);
    if (!T.invert(tinv_)) return false;

    // Parity bookkeeping and systematic shortening.
    std::vector<std::uint8_t> is_parity(static_cast<std::size_t>(n_full()), 0);
    for (int t = 0; t <= o - 2; ++t)
      for (int l = 0; l < Q; ++l) is_parity[static_cast<std::size_t>(vn_id(t, nB - 1, l))] = 1;
    for (int j = nB - pg; j < nB; ++j)
      for (int l = 0; l < Q; ++l) is_parity[static_cast<std::size_t>(vn_id(o - 1, j, l))] = 1;

    std::vector<std::int32_t> systematic;
    systematic.reserve(static_cast<std::size_t>(spec_.k_full()));
    for (std::int64_t v = 0; v < n_full(); ++v)
      if (!is_parity[static_cast<std::size_t>(v)]) systematic.push_back(static_cast<std::int32_t>(v));

    shortened_.clear();
    const std::int64_t s = spec_.shortened_count();
    if (s > 0) {
      pick_shortened(systematic, s, shorten_rng);
      std::vector<std::uint8_t> cut(static_cast<std::size_t>(n_full()), 0);
      for (auto v : shortened_) cut[static_cast<std::size_t>(v)] = 1;
      std::erase_if(systematic, [&](std::int32_t v) { return cut[static_cast<std::size_t>(v)] != 0; });
    }
    data_vns_ = std::move(systematic);
    is_data_.assign(static_cast<std::size_t>(n_full()), 0);
    for (auto v : data_vns_) is_data_[static_cast<std::size_t>(v)] = 1;

    transmitted_.clear();
    transmitted_.reserve(static_cast<std::size_t>(n_o()));
    std::size_t sp = 0;
    for (std::int64_t v = 0; v < n_full(); ++v) {
      if (sp < shortened_.size() && shortened_[sp] == static_cast<std::int32_t>(v)) {
        ++sp;
        continue;
      }
      transmitted_.push_back(static_cast<std::int32_t>(v));
    }

    // Check-major adjacency.
    const std::int64_t m = check_count();
    cn_off_.assign(static_cast<std::size_t>(m) + 1, 0);
    for (int r = 0; r < R; ++r) {
      const std::int64_t deg = static_cast<std::int64_t>(row_blocks_[static_cast<std::size_t>(r)].size());
      for (int l = 0; l < Q; ++l)
        cn_off_[static_cast<std::size_t>(r) * Q + static_cast<std::size_t>(l) + 1] = deg;
    }
    for (std::size_t i = 1; i < cn_off_.size(); ++i) cn_off_[i] += cn_off_[i - 1];
    const std::int64_t edges = cn_off_.back();
    cn_vn_.assign(static_cast<std::size_t>(edges), 0);
    cn_w_.assign(static_cast<std::size_t>(edges), 0);
    edge_cn_.assign(static_cast<std::size_t>(edges), 0);
    for (int r = 0; r < R; ++r)
      for (int l = 0; l < Q; ++l) {
        const std::int64_t cn = static_cast<std::int64_t>(r) * Q + l;
        std::int64_t e = cn_off_[static_cast<std::size_t>(cn)];
        for (const BlockEdge& be : row_blocks_[static_cast<std::size_t>(r)]) {
          cn_vn_[static_cast<std::size_t>(e)] =
              static_cast<std::int32_t>(vn_id(be.t, be.j, (l + be.shift) % Q));
          cn_w_[static_cast<std::size_t>(e)] = weights_[static_cast<std::size_t>(be.woff + l)];
          edge_cn_[static_cast<std::size_t>(e)] = static_cast<std::int32_t>(cn);
          ++e;
        }
      }

    // Symbol-major mirror.
    vn_off_.assign(static_cast<std::size_t>(n_full()) + 1, 0);
    for (std::int64_t e = 0; e < edges; ++e) ++vn_off_[static_cast<std::size_t>(cn_vn_[static_cast<std::size_t>(e)]) + 1];
    for (std::size_t i = 1; i < vn_off_.size(); ++i) vn_off_[i] += vn_off_[i - 1];
    vn_edge_.assign(static_cast<std::size_t>(edges), 0);
    std::vector<std::int64_t> cursor(vn_off_.begin(), vn_off_.end() - 1);
    for (std::int64_t e = 0; e < edges; ++e) {
      const std::int32_t v = cn_vn_[static_cast<std::size_t>(e)];
      vn_edge_[static_cast<std::size_t>(cursor[static_cast<std::size_t>(v)]++)] = e;
    }
    return true;
  }

  Workspace init_workspace(const std::vector<AppVec>& apps) const {
    if (static_cast<std::int64_t>(apps.size()) != n_o())
      throw std::invalid_argument("decode: expected one probability vector per transmitted symbol");
    Workspace wk;
    wk.prior.assign(static_cast<std::size_t>(n_full()), delta_app(0));
    for (std::size_t i = 0; i < transmitted_.size(); ++i) {
      AppVec a = apps[i];
      double sum = 0.0;
      for (double& q : a) {
        if (q < 0.0 || !(q == q))
          throw std::invalid_argument("decode: probability entries must be nonnegative");
        sum += q;
      }
      if (sum <= 0.0)
        a = uniform_app();
      else
        for (double& q : a) q /= sum;
      wk.prior[static_cast<std::size_t>(transmitted_[i])] = a;
    }
    const std::int64_t edges = cn_off_.back();
    wk.v2c.assign(static_cast<std::size_t>(edges), uniform_app());
    wk.c2v.assign(static_cast<std::size_t>(edges), uniform_app());
    for (std::int64_t e = 0; e < edges; ++e)
      wk.v2c[static_cast<std::size_t>(e)] = wk.prior[static_cast<std::size_t>(cn_vn_[static_cast<std::size_t>(e)])];
    wk.hard.resize(static_cast<std::size_t>(n_full()));
    wk.tie.resize(static_cast<std::size_t>(n_full()));
    for (std::int64_t v = 0; v < n_full(); ++v)
      wk.hard[static_cast<std::size_t>(v)] =
          argmax(wk.prior[static_cast<std::size_t>(v)], &wk.tie[static_cast<std::size_t>(v)]);
    return wk;
  }

  static Nuc argmax(const AppVec& a, std::uint8_t* tie = nullptr) {
    int best = 0;
    for (int x = 1; x < 4; ++x)
      if (a[static_cast<std::size_t>(x)] > a[static_cast<std::size_t>(best)]) best = x;
    if (tie) {
      int hits = 0;
      for (int x = 0; x < 4; ++x)
        if (a[static_cast<std::size_t>(x)] == a[static_cast<std::size_t>(best)]) ++hits;
      *tie = hits > 1 ? 1 : 0;
    }
    return static_cast<Nuc>(best);
  }

  static void normalize_max(AppVec& a) {
    double mx = 0.0;
    for (double q : a) mx = std::max(mx, q);
    if (mx <= 0.0) {
      a = uniform_app();
      return;
    }
    for (double& q : a) q /= mx;
  }

  /// Flooding iterations over block-rows [r_lo, r_hi] and adjacent symbols.
  void run_window(Workspace& wk, int r_lo, int r_hi, int iters, int threads) const {
    const int Q = spec_.Q_p, nB = spec_.n_B;
    const std::int64_t cn_lo = static_cast<std::int64_t>(r_lo) * Q;
    const std::int64_t cn_hi = static_cast<std::int64_t>(r_hi + 1) * Q;
    const int p_lo = std::max(0, r_lo - spec_.m_sc);
    const int p_hi = std::min(r_hi, spec_.o_sc - 1);
    const std::int64_t vn_lo = static_cast<std::int64_t>(p_lo) * nB * Q;
    const std::int64_t vn_hi = static_cast<std::int64_t>(p_hi + 1) * nB * Q;
    for (int it = 0; it < iters; ++it) {
      parallel_for(cn_hi - cn_lo, threads, [&](std::int64_t i) { update_cn(wk, cn_lo + i); });
      parallel_for(vn_hi - vn_lo, threads, [&](std::int64_t i) { update_vn(wk, vn_lo + i); });
    }
  }

  void update_cn(Workspace& wk, std::int64_t cn) const {
    const std::int64_t lo = cn_off_[static_cast<std::size_t>(cn)];
    const std::int64_t hi = cn_off_[static_cast<std::size_t>(cn) + 1];
    const int deg = static_cast<int>(hi - lo);
    constexpr int kMaxDeg = 64;
    AppVec f[kMaxDeg], pre[kMaxDeg + 1], suf[kMaxDeg + 1];
    // Transform each incoming message to the distribution of weight*symbol,
    // then move to the Hadamard domain where the check constraint becomes a
    // pointwise product.
    for (int i = 0; i < deg; ++i) {
      const Nuc w = cn_w_[static_cast<std::size_t>(lo + i)];
      const Nuc wi = gf4::inv(w);
      const AppVec& m = wk.v2c[static_cast<std::size_t>(lo + i)];
      AppVec q;
      for (int sgm = 0; sgm < 4; ++sgm)
        q[static_cast<std::size_t>(sgm)] = m[gf4::mul(wi, static_cast<Nuc>(sgm))];
      detail::wht4(q);
      f[i] = q;
    }
    pre[0] = {1.0, 1.0, 1.0, 1.0};
    for (int i = 0; i < deg; ++i)
      for (int s = 0; s < 4; ++s)
        pre[i + 1][static_cast<std::size_t>(s)] =
            pre[i][static_cast<std::size_t>(s)] * f[i][static_cast<std::size_t>(s)];
    suf[deg] = {1.0, 1.0, 1.0, 1.0};
    for (int i = deg - 1; i >= 0; --i)
      for (int s = 0; s < 4; ++s)
        suf[i][static_cast<std::size_t>(s)] =
            suf[i + 1][static_cast<std::size_t>(s)] * f[i][static_cast<std::size_t>(s)];
    for (int i = 0; i < deg; ++i) {
      AppVec g;
      for (int s = 0; s < 4; ++s)
        g[static_cast<std::size_t>(s)] =
            pre[i][static_cast<std::size_t>(s)] * suf[i + 1][static_cast<std::size_t>(s)];
      detail::wht4(g);  // back to the probability domain (x4, absorbed below)
      const Nuc w = cn_w_[static_cast<std::size_t>(lo + i)];
      AppVec out;
      for (int x = 0; x < 4; ++x) {
        double q = g[gf4::mul(w, static_cast<Nuc>(x))];
        out[static_cast<std::size_t>(x)] = q > 0.0 ? q : 0.0;
      }
      normalize_max(out);
      wk.c2v[static_cast<std::size_t>(lo + i)] = out;
    }
  }

  void update_vn(Workspace& wk, std::int64_t vn) const {
    const std::int64_t lo = vn_off_[static_cast<std::size_t>(vn)];
    const std::int64_t hi = vn_off_[static_cast<std::size_t>(vn) + 1];
    const int deg = static_cast<int>(hi - lo);
    constexpr int kMaxDeg = 16;
    AppVec pre[kMaxDeg + 1], suf[kMaxDeg + 1];
    pre[0] = wk.prior[static_cast<std::size_t>(vn)];
    for (int i = 0; i < deg; ++i) {
      const AppVec& m = wk.c2v[static_cast<std::size_t>(vn_edge_[static_cast<std::size_t>(lo + i)])];
      for (int x = 0; x < 4; ++x)
        pre[i + 1][static_cast<std::size_t>(x)] =
            pre[i][static_cast<std::size_t>(x)] * m[static_cast<std::size_t>(x)];
    }
    suf[deg] = {1.0, 1.0, 1.0, 1.0};
    for (int i = deg - 1; i >= 0; --i) {
      const AppVec& m = wk.c2v[static_cast<std::size_t>(vn_edge_[static_cast<std::size_t>(lo + i)])];
      for (int x = 0; x < 4; ++x)
        suf[i][static_cast<std::size_t>(x)] =
            suf[i + 1][static_cast<std::size_t>(x)] * m[static_cast<std::size_t>(x)];
    }
    for (int i = 0; i < deg; ++i) {
      AppVec out;
      for (int x = 0; x < 4; ++x)
        out[static_cast<std::size_t>(x)] =
            pre[i][static_cast<std::size_t>(x)] * suf[i + 1][static_cast<std::size_t>(x)];
      normalize_max(out);
      wk.v2c[static_cast<std::size_t>(vn_edge_[static_cast<std::size_t>(lo + i)])] = out;
    }
  }

  /// The two-sided sliding-window pass shared by the decode entry points;
  /// returns whether the data decisions were quiet over the final two steps.
  bool window_sweep(Workspace& wk, const WindowSchedule& ws, int threads) const {
    const int R = spec_.o_sc + spec_.m_sc;
    const int W = std::min(ws.window_rows, R);
    const int last = R - W;
    bool changed_prev = false, changed_last = false;
    for (int s = 0; s <= last; ++s) {
      const int iters = (s < spec_.m_sc) ? ws.boundary_iters : ws.iters;
      bool changed = false;
      run_window(wk, s, s + W - 1, iters, threads);
      changed |= refresh_decisions(wk, s, s + W - 1, threads);
      if (last - s != s) {
        run_window(wk, last - s, last - s + W - 1, iters, threads);
        changed |= refresh_decisions(wk, last - s, last - s + W - 1, threads);
      }
      changed_prev = changed_last;
      changed_last = changed;
    }
    return !changed_last && !changed_prev;
  }

  /// Solve the symbols still ambiguous after propagation as a linear system:
  /// every check adjacent to an unknown contributes one equation whose
  /// right-hand side folds in the settled neighbors.  Unknowns whose value
  /// the system pins down uniquely are committed; unknowns that remain free
  /// keep their ambiguity flag (data among them fails the decode).
  void solve_residual(Workspace& wk, std::int64_t max_unknowns) const {
    std::vector<std::int32_t> unknowns;
    for (std::int64_t v = 0; v < n_full(); ++v)
      if (wk.tie[static_cast<std::size_t>(v)]) unknowns.push_back(static_cast<std::int32_t>(v));
    if (unknowns.empty() || static_cast<std::int64_t>(unknowns.size()) > max_unknowns) return;
    std::vector<std::int32_t> col(static_cast<std::size_t>(n_full()), -1);
    for (std::size_t i = 0; i < unknowns.size(); ++i)
      col[static_cast<std::size_t>(unknowns[i])] = static_cast<std::int32_t>(i);

    // Gather the equations: one row per check that touches an unknown.
    std::vector<std::int32_t> eq_cns;
    for (std::int64_t cn = 0; cn < check_count(); ++cn)
      for (std::int64_t e = cn_off_[static_cast<std::size_t>(cn)];
           e < cn_off_[static_cast<std::size_t>(cn) + 1]; ++e)
        if (col[static_cast<std::size_t>(cn_vn_[static_cast<std::size_t>(e)])] >= 0) {
          eq_cns.push_back(static_cast<std::int32_t>(cn));
          break;
        }
    const int nr = static_cast<int>(eq_cns.size());
    const int nc = static_cast<int>(unknowns.size());
    detail::Gf4Planes a(nr, nc);
    NucSeq rhs(static_cast<std::size_t>(nr), 0);
    for (int r = 0; r < nr; ++r) {
      const auto cn = static_cast<std::size_t>(eq_cns[static_cast<std::size_t>(r)]);
      for (std::int64_t e = cn_off_[cn]; e < cn_off_[cn + 1]; ++e) {
        const auto v = static_cast<std::size_t>(cn_vn_[static_cast<std::size_t>(e)]);
        const Nuc w = cn_w_[static_cast<std::size_t>(e)];
        if (col[v] >= 0)
          a.set(r, col[v], static_cast<Nuc>(a.get(r, col[v]) ^ w));
        else
          rhs[static_cast<std::size_t>(r)] = static_cast<Nuc>(
              rhs[static_cast<std::size_t>(r)] ^ gf4::mul(w, wk.hard[v]));
      }
    }

    // Gauss-Jordan elimination with the right-hand side carried along.
    std::vector<std::int32_t> pivot_row_of_col(static_cast<std::size_t>(nc), -1);
    int rank = 0;
    for (int c = 0; c < nc && rank < nr; ++c) {
      int pr = -1;
      for (int r = rank; r < nr; ++r)
        if (a.get(r, c) != 0) {
          pr = r;
          break;
        }
      if (pr < 0) continue;
      a.row_swap(rank, pr);
      std::swap(rhs[static_cast<std::size_t>(rank)], rhs[static_cast<std::size_t>(pr)]);
      const Nuc inv = gf4::inv(a.get(rank, c));
      a.row_scale(rank, inv);
      rhs[static_cast<std::size_t>(rank)] = gf4::mul(inv, rhs[static_cast<std::size_t>(rank)]);
      for (int r = 0; r < nr; ++r) {
        if (r == rank) continue;
        const Nuc f = a.get(r, c);
        if (f == 0) continue;
        a.row_addmul(r, rank, f);
        rhs[static_cast<std::size_t>(r)] = static_cast<Nuc>(
            rhs[static_cast<std::size_t>(r)] ^ gf4::mul(f, rhs[static_cast<std::size_t>(rank)]));
      }
      pivot_row_of_col[static_cast<std::size_t>(c)] = rank;
      ++rank;
    }

    // Commit unknowns pinned uniquely: a pivot column whose row is clear of
    // free columns.  Columns without a pivot stay ambiguous; with full column
    // rank every pivot is determined outright.
    const bool full_rank = (rank == nc);
    std::vector<std::uint8_t> is_free(static_cast<std::size_t>(nc), 0);
    for (int c = 0; c < nc; ++c)
      if (pivot_row_of_col[static_cast<std::size_t>(c)] < 0) is_free[static_cast<std::size_t>(c)] = 1;
    for (int c = 0; c < nc; ++c) {
      const int r = pivot_row_of_col[static_cast<std::size_t>(c)];
      if (r < 0) continue;
      bool determined = true;
      for (int c2 = 0; c2 < nc && determined && !full_rank; ++c2)
        if (is_free[static_cast<std::size_t>(c2)] && a.get(r, c2) != 0) determined = false;
      if (!determined) continue;
      const auto v = static_cast<std::size_t>(unknowns[static_cast<std::size_t>(c)]);
      wk.hard[v] = rhs[static_cast<std::size_t>(r)];
      wk.tie[v] = 0;
    }
  }

  /// Recompute decisions for symbols adjacent to block-rows [r_lo, r_hi];
  /// returns whether any *data* decision flipped.  Parity symbols inside an
  /// unresolvable region can oscillate between near-tied beliefs forever, so
  /// convergence is judged on the data symbols the decode exists to recover.
  bool refresh_decisions(Workspace& wk, int r_lo, int r_hi, int threads) const {
    const int Q = spec_.Q_p, nB = spec_.n_B;
    const int p_lo = std::max(0, r_lo - spec_.m_sc);
    const int p_hi = std::min(r_hi, spec_.o_sc - 1);
    const std::int64_t vn_lo = static_cast<std::int64_t>(p_lo) * nB * Q;
    const std::int64_t count = static_cast<std::int64_t>(p_hi + 1) * nB * Q - vn_lo;
    std::vector<std::uint8_t> flips(static_cast<std::size_t>(count), 0);
    parallel_for(count, threads, [&](std::int64_t i) {
      const std::int64_t vn = vn_lo + i;
      AppVec b = wk.prior[static_cast<std::size_t>(vn)];
      for (std::int64_t k = vn_off_[static_cast<std::size_t>(vn)]; k < vn_off_[static_cast<std::size_t>(vn) + 1]; ++k) {
        const AppVec& m = wk.c2v[static_cast<std::size_t>(vn_edge_[static_cast<std::size_t>(k)])];
        for (int x = 0; x < 4; ++x)
          b[static_cast<std::size_t>(x)] *= m[static_cast<std::size_t>(x)];
      }
      const Nuc d = argmax(b, &wk.tie[static_cast<std::size_t>(vn)]);
      if (d != wk.hard[static_cast<std::size_t>(vn)]) {
        wk.hard[static_cast<std::size_t>(vn)] = d;
        flips[static_cast<std::size_t>(i)] = is_data_[static_cast<std::size_t>(vn)];
      }
    });
    return std::find(flips.begin(), flips.end(), std::uint8_t{1}) != flips.end();
  }

  /// Success means the data symbols are determined: every data symbol has a
  /// unique belief maximizer and the re-encoding of the recovered data agrees
  /// with the hard decision at every symbol whose belief is unambiguous — in
  /// particular at every symbol the channel delivered with certainty.  When
  /// that holds the decisions form a codeword consistent with all confident
  /// observations, which subsumes a zero-syndrome check.  Tied or oscillating
  /// beliefs confined to parity symbols do not block success: once the data
  /// is pinned down they carry no information.
  DecodeResult finish(Workspace& wk, bool stable) const {
    DecodeResult res;
    res.word = std::move(wk.hard);
    res.stable = stable;
    res.u_hat.resize(data_vns_.size());
    for (std::size_t i = 0; i < data_vns_.size(); ++i) {
      const auto v = static_cast<std::size_t>(data_vns_[i]);
      res.u_hat[i] = res.word[v];
      res.unresolved_data += wk.tie[v] ? 1 : 0;
    }
    if (res.unresolved_data == 0) {
      const NucSeq x_hat = encode_natural(res.u_hat);
      for (std::int64_t v = 0; v < n_full(); ++v)
        if (!wk.tie[static_cast<std::size_t>(v)] &&
            x_hat[static_cast<std::size_t>(v)] != res.word[static_cast<std::size_t>(v)])
          ++res.inconsistent;
      if (res.inconsistent == 0) {
        res.success = true;
        res.word = x_hat;
      }
    }
    return res;
  }

  ScLdpcSpec spec_;
  int construction_attempts_ = 0;
  std::vector<std::vector<BlockEdge>> row_blocks_;
  std::vector<Nuc> weights_;
  detail::Gf4Planes tinv_{0, 0};
  std::vector<std::int32_t> shortened_, data_vns_, transmitted_;
  std::vector<std::uint8_t> is_data_;
  std::vector<std::int64_t> cn_off_;
  std::vector<std::int32_t> cn_vn_, edge_cn_;
  std::vector<Nuc> cn_w_;
  std::vector<std::int64_t> vn_off_, vn_edge_;
};

/// Encode and interleave: the stored word is the interleaved codeword.
inline NucSeq outer_encode(const OuterCode& code, const Interleaver& il, const NucSeq& u) {
  return il.interleave(code.encode(u));
}

/// Deinterleave received symbol probabilities and decode.
inline OuterCode::DecodeResult outer_decode(const OuterCode& code, const Interleaver& il,
                                            const std::vector<AppVec>& apps_interleaved,
                                            const WindowSchedule& ws = {}, int threads = 1) {
  return code.decode_window(il.deinterleave(apps_interleaved), ws, threads);
}

}  // namespace dnastore::code
