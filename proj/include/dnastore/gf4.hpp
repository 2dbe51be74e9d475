#pragma once

// Nucleotide alphabet and GF(4) arithmetic.
//
// Nucleotides map lexicographically to {A,C,G,T} = {0,1,2,3}.  The same 2-bit
// values double as GF(4) elements b1*x + b0 under the primitive polynomial
// x^2 + x + 1 over GF(2): 0 -> 0, 1 -> 1, 2 -> x, 3 -> x+1.  Addition is
// bitwise XOR; multiplication and inversion follow from the polynomial.

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace dnastore {

/// One nucleotide / GF(4) element, value in {0,1,2,3}.
using Nuc = std::uint8_t;

/// A DNA strand (or GF(4) vector).
using NucSeq = std::vector<Nuc>;

inline constexpr std::array<char, 4> kNucChar = {'A', 'C', 'G', 'T'};

/// Watson-Crick complement: A<->T, C<->G.
constexpr Nuc complement(Nuc x) { return static_cast<Nuc>(3 - x); }

/// Reverse complement of a strand.
inline NucSeq reverse_complement(const NucSeq& s) {
  NucSeq r(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) r[i] = complement(s[s.size() - 1 - i]);
  return r;
}

inline std::string to_string(const NucSeq& s) {
  std::string out(s.size(), '?');
  for (std::size_t i = 0; i < s.size(); ++i) out[i] = kNucChar[s[i]];
  return out;
}

inline NucSeq parse_nucs(std::string_view str) {
  NucSeq out;
  out.reserve(str.size());
  for (char c : str) {
    switch (c) {
      case 'A': case 'a': out.push_back(0); break;
      case 'C': case 'c': out.push_back(1); break;
      case 'G': case 'g': out.push_back(2); break;
      case 'T': case 't': out.push_back(3); break;
      default: throw std::invalid_argument("parse_nucs: invalid symbol '" + std::string(1, c) + "'");
    }
  }
  return out;
}

namespace gf4 {

constexpr Nuc add(Nuc a, Nuc b) { return static_cast<Nuc>(a ^ b); }
constexpr Nuc sub(Nuc a, Nuc b) { return static_cast<Nuc>(a ^ b); }  // characteristic 2

namespace detail {
// Multiplication table for x^2 + x + 1:  x*x = x+1, x*(x+1) = 1, (x+1)^2 = x.
inline constexpr std::array<std::array<Nuc, 4>, 4> kMul = {{
    {{0, 0, 0, 0}},
    {{0, 1, 2, 3}},
    {{0, 2, 3, 1}},
    {{0, 3, 1, 2}},
}};
inline constexpr std::array<Nuc, 4> kInv = {0, 1, 3, 2};  // kInv[0] unused
}  // namespace detail

constexpr Nuc mul(Nuc a, Nuc b) { return detail::kMul[a][b]; }

constexpr Nuc inv(Nuc a) {
  return a == 0 ? throw std::domain_error("gf4::inv(0)") : detail::kInv[a];
}

constexpr Nuc div(Nuc a, Nuc b) { return mul(a, inv(b)); }

}  // namespace gf4
}  // namespace dnastore
