#pragma once

// Per-strand joint code: index codes, marker-repeat inner code, primers, and
// the random offset.
//
// A strand for data block w and index i is laid out as
//
//   p1 | front index half | MR-encoded payload | back index half | p2
//
// with a pseudorandom offset (one sequence per codeword realization, shared
// by all strands and known to the decoder; derived from offset_seed) added
// over the index+payload region, never over the primers.  Sharing the offset
// across strands is what lets a read of unknown origin be decoded: the
// decoder removes the same z at every trellis position regardless of which
// strand produced the read.
//
// Index codes map the integer i-1 to mixed-radix digits, most-significant
// digit first, one digit per *code section*; each section encodes its digit
// with a small codebook over the DNA alphabet:
//   UC   - uncoded: one symbol per digit (radix 4);
//   REP  - 2-fold repetition: (u,u) per digit (radix 4);
//   VT   - single-indel-correcting Tenengolts code of length 6 (radix 178);
//   ES   - length-4 codebooks of cardinality 14 and minimum Levenshtein
//          distance 3, found by exhaustive search; two codebooks alternate.
// When every radix is 4 (UC, REP) the digits are exactly the base-4 digits
// of i-1.  Half the sections sit in front of the payload, half behind it.
//
// The inner marker-repeat code repeats selected payload symbols once,
// spacing the m markers evenly: marker j follows data symbol min(j*g, L_o)
// with g = ceil(L_o/m), so the last marker precedes the back index half.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "dnastore/gf4.hpp"
#include "dnastore/rng.hpp"

namespace dnastore::code {

// ---------------------------------------------------------------------------
// Index codes.

enum class IndexKind { UC, REP, VT, ES };

inline constexpr std::array<const char*, 4> kIndexKindName = {"uc", "rep", "vt", "es"};

inline IndexKind index_kind_from_name(const std::string& s) {
  for (int i = 0; i < 4; ++i)
    if (s == kIndexKindName[i]) return static_cast<IndexKind>(i);
  throw std::invalid_argument("unknown index code '" + s + "' (uc|rep|vt|es)");
}

/// One code section: a digit of radix |codebook| encoded as codebook[digit].
struct CodeSection {
  int n = 0;                      // codeword length in nt
  std::vector<NucSeq> codebook;   // digit value -> codeword; all length n
  std::int64_t radix() const { return static_cast<std::int64_t>(codebook.size()); }
};

struct IndexCode {
  IndexKind kind = IndexKind::UC;
  std::vector<CodeSection> sections;  // digit order, most significant first
  int a = 0;                          // declared number of serial component codes

  int n() const {
    int total = 0;
    for (const auto& s : sections) total += s.n;
    return total;
  }
  std::int64_t capacity() const {
    std::int64_t c = 1;
    for (const auto& s : sections) {
      if (c > (std::int64_t{1} << 62) / s.radix()) return std::int64_t{1} << 62;
      c *= s.radix();
    }
    return c;
  }
  std::size_t front_sections() const { return (sections.size() + 1) / 2; }
  int front_nt() const {
    int total = 0;
    for (std::size_t j = 0; j < front_sections(); ++j) total += sections[j].n;
    return total;
  }
  /// Fractional rate log4(capacity) / n.
  double rate_fraction() const {
    double bits = 0;
    for (const auto& s : sections) bits += std::log2(static_cast<double>(s.radix()));
    return bits / 2.0 / static_cast<double>(n());
  }
};

/// Mixed-radix digits of i-1 (i is 1-based), most significant first.
inline std::vector<int> index_digits(std::int64_t i, const IndexCode& code) {
  if (i < 1 || i > code.capacity())
    throw std::out_of_range("index_digits: index " + std::to_string(i) + " out of range");
  std::int64_t rem = i - 1;
  std::vector<int> digits(code.sections.size());
  for (std::size_t j = code.sections.size(); j-- > 0;) {
    const auto r = code.sections[j].radix();
    digits[j] = static_cast<int>(rem % r);
    rem /= r;
  }
  return digits;
}

inline std::int64_t index_from_digits(const std::vector<int>& digits, const IndexCode& code) {
  std::int64_t i = 0;
  for (std::size_t j = 0; j < digits.size(); ++j) i = i * code.sections[j].radix() + digits[j];
  return i + 1;
}

/// Codeword halves for index i: front half before the payload, back half after.
inline std::pair<NucSeq, NucSeq> encode_index(std::int64_t i, const IndexCode& code) {
  const auto digits = index_digits(i, code);
  NucSeq front, back;
  for (std::size_t j = 0; j < code.sections.size(); ++j) {
    const NucSeq& cw = code.sections[j].codebook[static_cast<std::size_t>(digits[j])];
    auto& half = j < code.front_sections() ? front : back;
    half.insert(half.end(), cw.begin(), cw.end());
  }
  return {front, back};
}

namespace detail {

inline std::vector<NucSeq> all_words(int n) {
  std::vector<NucSeq> words;
  words.reserve(static_cast<std::size_t>(1) << (2 * n));
  NucSeq w(static_cast<std::size_t>(n), 0);
  for (;;) {
    words.push_back(w);
    int pos = n - 1;
    while (pos >= 0 && w[static_cast<std::size_t>(pos)] == 3) w[static_cast<std::size_t>(pos--)] = 0;
    if (pos < 0) break;
    ++w[static_cast<std::size_t>(pos)];
  }
  return words;
}

// The two length-4, cardinality-14 codebooks with minimum Levenshtein
// distance 3, alternated to build the ES index code.
inline const std::vector<NucSeq>& es_codebook(int which) {
  static const std::vector<NucSeq> one = {
      {0, 0, 3, 3}, {0, 1, 0, 1}, {0, 2, 2, 0}, {0, 3, 1, 2}, {1, 1, 2, 2},
      {1, 2, 0, 3}, {1, 3, 3, 1}, {2, 0, 0, 2}, {2, 1, 3, 0}, {2, 2, 1, 1},
      {3, 0, 2, 1}, {3, 1, 1, 3}, {3, 2, 3, 2}, {3, 3, 0, 0}};
  static const std::vector<NucSeq> two = {
      {0, 0, 2, 0}, {0, 2, 3, 2}, {0, 3, 0, 1}, {1, 1, 3, 1}, {1, 2, 1, 0},
      {1, 3, 2, 3}, {2, 0, 1, 1}, {2, 1, 2, 2}, {2, 2, 0, 3}, {2, 3, 3, 0},
      {3, 0, 3, 3}, {3, 1, 0, 0}, {3, 2, 2, 1}, {3, 3, 1, 2}};
  return which == 0 ? one : two;
}

}  // namespace detail

/// Tenengolts-style single-indel-correcting quaternary code of length n:
/// bucket all q-ary words by (sum of i*alpha_i mod n, sum of x_i mod q) where
/// alpha_1 = 1 and alpha_i = 1 iff x_i >= x_{i-1}; keep the largest bucket
/// (ties: smallest key), sorted lexicographically.
inline std::vector<NucSeq> build_vt_component(int n, int q = 4) {
  if (q != 4) throw std::invalid_argument("build_vt_component: only q=4 supported");
  std::map<std::pair<int, int>, std::vector<NucSeq>> buckets;
  for (const auto& w : detail::all_words(n)) {
    // Ascent signature s_i = [w_{i+1} >= w_i] for i = 1..n-1; the weighted
    // signature sum mod n together with the symbol sum mod q partitions the
    // words into single-indel-correcting buckets.
    int a = 0, b = w.empty() ? 0 : w[0];
    for (int i = 1; i < n; ++i) {
      if (w[static_cast<std::size_t>(i)] >= w[static_cast<std::size_t>(i - 1)]) a += i;
      b += w[static_cast<std::size_t>(i)];
    }
    buckets[{a % n, b % q}].push_back(w);
  }
  const std::vector<NucSeq>* best = nullptr;
  for (const auto& [key, words] : buckets) {
    (void)key;
    if (!best || words.size() > best->size()) best = &words;  // map order = smallest key first
  }
  std::vector<NucSeq> out = *best;
  std::sort(out.begin(), out.end());
  return out;
}

/// Smallest instance of each index-code family whose capacity covers M.
inline IndexCode make_index_code(IndexKind kind, std::int64_t M) {
  if (M < 1) throw std::invalid_argument("make_index_code: M must be >= 1");
  IndexCode code;
  code.kind = kind;
  auto digits_needed = [&](std::int64_t radix) {
    int d = 1;
    std::int64_t cap = radix;
    while (cap < M) {
      cap *= radix;
      ++d;
    }
    return d;
  };
  switch (kind) {
    case IndexKind::UC: {
      // Declared as a=2 serial [m,m] components; realized one symbol per digit.
      const int digits = digits_needed(4);
      CodeSection s{1, detail::all_words(1)};
      code.sections.assign(static_cast<std::size_t>(digits), s);
      code.a = 2;
      break;
    }
    case IndexKind::REP: {
      const int digits = digits_needed(4);
      CodeSection s{2, {}};
      for (Nuc u = 0; u < 4; ++u) s.codebook.push_back(NucSeq{u, u});
      code.sections.assign(static_cast<std::size_t>(digits), s);
      code.a = 2;
      break;
    }
    case IndexKind::VT: {
      CodeSection s{6, build_vt_component(6)};
      int a = digits_needed(static_cast<std::int64_t>(s.codebook.size()));
      if (a % 2) ++a;  // split in half requires an even component count
      code.sections.assign(static_cast<std::size_t>(a), s);
      code.a = a;
      break;
    }
    case IndexKind::ES: {
      int a = digits_needed(14);
      if (a % 2) ++a;
      for (int j = 0; j < a; ++j)
        code.sections.push_back(CodeSection{4, detail::es_codebook(j % 2)});
      code.a = a;
      break;
    }
  }
  if (code.capacity() < M) throw std::logic_error("make_index_code: capacity below M");
  return code;
}

// ---------------------------------------------------------------------------
// Inner marker-repeat code.

struct InnerMR {
  int redundancy = 0;  // markers per strand

  /// copies_after[d] = number of markers following 1-based data symbol d+1.
  std::vector<int> copies_after(int L_o) const {
    if (redundancy < 0 || redundancy > L_o)
      throw std::invalid_argument("InnerMR: redundancy must be in [0, L_o]");
    std::vector<int> copies(static_cast<std::size_t>(L_o), 0);
    if (redundancy == 0) return copies;
    const int g = (L_o + redundancy - 1) / redundancy;  // ceil(L_o / m)
    for (int j = 1; j <= redundancy; ++j)
      ++copies[static_cast<std::size_t>(std::min(j * g, L_o) - 1)];
    return copies;
  }

  NucSeq encode(const NucSeq& w) const {
    const auto copies = copies_after(static_cast<int>(w.size()));
    NucSeq out;
    out.reserve(w.size() + static_cast<std::size_t>(redundancy));
    for (std::size_t d = 0; d < w.size(); ++d) {
      out.push_back(w[d]);
      for (int c = 0; c < copies[d]; ++c) out.push_back(w[d]);
    }
    return out;
  }

  /// Inverse of encode (drops markers).
  NucSeq decode(const NucSeq& coded, int L_o) const {
    const auto copies = copies_after(L_o);
    NucSeq w;
    w.reserve(static_cast<std::size_t>(L_o));
    std::size_t pos = 0;
    for (int d = 0; d < L_o; ++d) {
      if (pos >= coded.size()) throw std::invalid_argument("InnerMR::decode: input too short");
      w.push_back(coded[pos]);
      pos += 1 + static_cast<std::size_t>(copies[static_cast<std::size_t>(d)]);
    }
    if (pos != coded.size()) throw std::invalid_argument("InnerMR::decode: length mismatch");
    return w;
  }

  double rate_fraction(int L_o) const {
    return static_cast<double>(L_o) / static_cast<double>(L_o + redundancy);
  }
};

// ---------------------------------------------------------------------------
// Strand layout.

struct JointCodeLayout {
  std::int64_t M = 0;       // number of strands (valid indices are 1..M)
  int L_p = 0;              // primer length
  NucSeq primer1, primer2;  // both length L_p
  IndexCode index;
  InnerMR inner;
  int L_o = 0;              // payload symbols per strand
  std::uint64_t offset_seed = 0;

  int region_nt() const { return index.n() + L_o + inner.redundancy; }
  int L_seq() const { return region_nt() + 2 * L_p; }

  void validate() const {
    if (M < 1) throw std::invalid_argument("layout: M must be >= 1");
    if (M > index.capacity()) throw std::invalid_argument("layout: index code capacity below M");
    if (static_cast<int>(primer1.size()) != L_p || static_cast<int>(primer2.size()) != L_p)
      throw std::invalid_argument("layout: primer length != L_p");
    if (L_o < 1) throw std::invalid_argument("layout: L_o must be >= 1");
    (void)inner.copies_after(L_o);
  }

  /// The decoder-known pseudorandom offset covering the index+payload
  /// region.  One sequence per codeword realization, shared by all strands.
  NucSeq offset() const {
    Philox rng = Philox(offset_seed).fold(0x0ff5e7);
    NucSeq z(static_cast<std::size_t>(region_nt()));
    for (auto& s : z) s = static_cast<Nuc>(rng.below(4));
    return z;
  }
};

/// Fixed-offset strand encoding (offset length = region_nt).
inline NucSeq encode_strand(const NucSeq& w, std::int64_t i, const JointCodeLayout& lay,
                            const NucSeq& offset) {
  if (static_cast<int>(w.size()) != lay.L_o)
    throw std::invalid_argument("encode_strand: |w| != L_o");
  if (i < 1 || i > lay.M) throw std::out_of_range("encode_strand: index out of range");
  if (static_cast<int>(offset.size()) != lay.region_nt())
    throw std::invalid_argument("encode_strand: offset length != region length");
  const auto [front, back] = encode_index(i, lay.index);
  NucSeq x;
  x.reserve(static_cast<std::size_t>(lay.L_seq()));
  x.insert(x.end(), lay.primer1.begin(), lay.primer1.end());
  const std::size_t region_start = x.size();
  x.insert(x.end(), front.begin(), front.end());
  const NucSeq coded = lay.inner.encode(w);
  x.insert(x.end(), coded.begin(), coded.end());
  x.insert(x.end(), back.begin(), back.end());
  for (std::size_t t = 0; t < offset.size(); ++t)
    x[region_start + t] = gf4::add(x[region_start + t], offset[t]);
  x.insert(x.end(), lay.primer2.begin(), lay.primer2.end());
  return x;
}

/// Strand encoding with the layout's own offset stream.
inline NucSeq encode_strand(const NucSeq& w, std::int64_t i, const JointCodeLayout& lay) {
  return encode_strand(w, i, lay, lay.offset());
}

/// Noiseless inverse of encode_strand: strip primers, remove the offset,
/// drop markers and index symbols.  (Test/verification support.)
inline NucSeq decode_strand(const NucSeq& x, const JointCodeLayout& lay) {
  if (static_cast<int>(x.size()) != lay.L_seq())
    throw std::invalid_argument("decode_strand: wrong strand length");
  const NucSeq offset = lay.offset();
  NucSeq region(x.begin() + lay.L_p, x.begin() + lay.L_p + lay.region_nt());
  for (std::size_t t = 0; t < region.size(); ++t) region[t] = gf4::add(region[t], offset[t]);
  const int front = lay.index.front_nt();
  const NucSeq coded(region.begin() + front,
                     region.begin() + front + lay.L_o + lay.inner.redundancy);
  return lay.inner.decode(coded, lay.L_o);
}

inline NucSeq random_primer(int L_p, Philox& rng) {
  NucSeq p(static_cast<std::size_t>(L_p));
  for (auto& s : p) s = static_cast<Nuc>(rng.below(4));
  return p;
}

// ---------------------------------------------------------------------------
// Rates.  All component rates are dimensionless fractions in (0, 1]; the
// system rate converts to bit/nt at this single reporting boundary.

/// R = R_o * R_i * (2 - beta/R_ix) bit/nt, with fractional component rates.
inline double system_rate(double ro_frac, double ri_frac, double rix_frac, double beta) {
  if (ro_frac <= 0 || ro_frac > 1 || ri_frac <= 0 || ri_frac > 1)
    throw std::invalid_argument("system_rate: fractional rates must be in (0,1]");
  if (rix_frac <= 0 || rix_frac > 1) throw std::invalid_argument("system_rate: R_ix out of range");
  if (beta < 0) throw std::invalid_argument("system_rate: beta must be >= 0");
  return ro_frac * ri_frac * (2.0 - beta / rix_frac);
}

/// Reported information density from raw geometry counts: user bits per
/// region nt, R = 2 * (k_o/n_o) * L_o / region_nt.
inline double geometry_rate(double ro_frac, const JointCodeLayout& lay) {
  return 2.0 * ro_frac * static_cast<double>(lay.L_o) / static_cast<double>(lay.region_nt());
}

}  // namespace dnastore::code
