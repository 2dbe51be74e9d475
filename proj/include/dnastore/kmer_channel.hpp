#pragma once

// State-based memory-k insertion/deletion/substitution channel.
//
// A strand x = (x_1, ..., x_L) is consumed symbol by symbol from a queue.
// Before the channel advances past x_t it repeatedly picks an event with
// probabilities conditioned on (kmer_t, previous event):
//   Ins: append a uniformly random symbol, x_t stays queued (may repeat);
//   Del: drop x_t;
//   Sub: append a' drawn from the substitution-matrix row of x_t (a' != x_t);
//   Tra: append x_t unchanged.
// kmer_t is the longest symmetric window around x_t of length <= k (windows
// truncate at strand boundaries: kmer_1 = (x_1)).  The previous-event state
// starts as Beg.  After x_L leaves the queue the read ends, so trailing
// insertions are impossible by construction.
//
// Event probabilities live in a TransitionModel, one per read direction.
// Lookups for (kmer, prev) pairs absent from the table fall back to the
// across-kmer marginal p(e | prev), then to the global event marginal; both
// fallbacks are baked into the table when the model is finalized, so the
// query path is total.  Model files are JSON with linear-domain
// probabilities (exact shortest-round-trip decimals).

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "dnastore/gf4.hpp"
#include "dnastore/rng.hpp"

namespace dnastore::channel {

enum class Event : std::uint8_t { Ins = 0, Del = 1, Sub = 2, Tra = 3, Beg = 4 };

inline constexpr int kNumEvents = 4;  // events the channel can emit
inline constexpr int kNumPrev = 5;    // previous-event contexts (incl. Beg)

inline constexpr std::array<const char*, 5> kEventName = {"Ins", "Del", "Sub", "Tra", "Beg"};

inline Event event_from_name(const std::string& s) {
  for (int i = 0; i < 5; ++i)
    if (s == kEventName[i]) return static_cast<Event>(i);
  throw std::invalid_argument("unknown channel event '" + s + "'");
}

// ---------------------------------------------------------------------------
// Kmer windows.  A (possibly truncated) window is keyed as 4^len + code with
// the symbols packed MSB-first; the leading 1 makes keys of different lengths
// collision-free.  Key 1 is the empty window.

using KmerKey = std::uint32_t;

inline KmerKey kmer_key(const Nuc* s, std::size_t len) {
  KmerKey key = 1;
  for (std::size_t i = 0; i < len; ++i) key = (key << 2) | s[i];
  return key;
}

inline KmerKey kmer_key(const NucSeq& s) { return kmer_key(s.data(), s.size()); }

inline std::string kmer_string(KmerKey key) {
  const int len = (std::bit_width(key) - 1) / 2;
  std::string out(static_cast<std::size_t>(len), '?');
  for (int i = len - 1; i >= 0; --i, key >>= 2) out[i] = kNucChar[key & 3u];
  return out;
}

/// Window radius at 1-based position t of a length-L strand: the longest
/// symmetric window of length <= k that stays inside the strand.
constexpr int kmer_radius(int k, std::size_t t, std::size_t L) {
  const auto r = std::min<std::size_t>(static_cast<std::size_t>(k / 2),
                                       std::min(t - 1, L - t));
  return static_cast<int>(r);
}

/// kmer_t for 1-based position t.
inline KmerKey kmer_at(const NucSeq& x, std::size_t t, int k) {
  const int r = kmer_radius(k, t, x.size());
  return kmer_key(x.data() + (t - 1 - r), static_cast<std::size_t>(2 * r + 1));
}

// ---------------------------------------------------------------------------

struct TransitionModel {
  using EventProbs = std::array<double, 4>;         // indexed by Event Ins..Tra
  using PrevTable = std::array<EventProbs, 5>;      // indexed by previous Event

  int k = 1;
  bool backward = false;                            // read direction this model describes
  std::array<std::array<double, 4>, 4> sub{};      // sub[x][a'] = p(a' | x, Sub); zero diagonal
  std::unordered_map<KmerKey, PrevTable> table;     // fully populated after finalize()
  PrevTable fallback{};                             // used for kmers absent from `table`

  const EventProbs& probs(KmerKey kmer, Event prev) const {
    const auto it = table.find(kmer);
    const PrevTable& t = it != table.end() ? it->second : fallback;
    return t[static_cast<std::size_t>(prev)];
  }

  const PrevTable& prev_table(KmerKey kmer) const {
    const auto it = table.find(kmer);
    return it != table.end() ? it->second : fallback;
  }

  /// Context-independent (memoryless) model: the i.i.d. IDS channel as the
  /// k=1 special case.  Substitutions uniform over the three other symbols
  /// unless a matrix is supplied.
  static TransitionModel iid(double p_ins, double p_del, double p_sub, bool backward = false) {
    TransitionModel m;
    m.k = 1;
    m.backward = backward;
    m.sub = uniform_sub();
    const EventProbs p = {p_ins, p_del, p_sub, 1.0 - p_ins - p_del - p_sub};
    PrevTable t;
    t.fill(p);
    for (Nuc a = 0; a < 4; ++a) m.table.emplace(kmer_key(&a, 1), t);
    m.finalize();
    m.validate();
    return m;
  }

  static std::array<std::array<double, 4>, 4> uniform_sub() {
    std::array<std::array<double, 4>, 4> s{};
    for (int x = 0; x < 4; ++x)
      for (int a = 0; a < 4; ++a) s[x][a] = (a == x) ? 0.0 : 1.0 / 3.0;
    return s;
  }

  /// Compute the fallback tables from the populated entries (unweighted
  /// across-kmer means) and fill any missing (kmer, prev) rows from them.
  /// Call after mutating `table` by hand; loading and estimation do it.
  void finalize() {
    EventProbs global = {0, 0, 0, 0};
    std::array<EventProbs, 5> prev_sum{};
    std::array<std::size_t, 5> prev_n{};
    std::size_t n = 0;
    for (const auto& [key, t] : table) {
      (void)key;
      for (int p = 0; p < kNumPrev; ++p) {
        if (!filled(t[p])) continue;
        for (int e = 0; e < kNumEvents; ++e) {
          prev_sum[p][e] += t[p][e];
          global[e] += t[p][e];
        }
        ++prev_n[p];
        ++n;
      }
    }
    if (n == 0) throw std::invalid_argument("TransitionModel: no entries");
    for (int e = 0; e < kNumEvents; ++e) global[e] /= static_cast<double>(n);
    for (int p = 0; p < kNumPrev; ++p) {
      if (prev_n[p] > 0) {
        for (int e = 0; e < kNumEvents; ++e)
          fallback[p][e] = prev_sum[p][e] / static_cast<double>(prev_n[p]);
      } else {
        fallback[p] = global;
      }
    }
    for (auto& [key, t] : table) {
      (void)key;
      for (int p = 0; p < kNumPrev; ++p)
        if (!filled(t[p])) t[p] = fallback[p];
    }
  }

  void validate() const {
    if (k < 1 || k % 2 == 0) throw std::invalid_argument("TransitionModel: k must be odd >= 1");
    for (int x = 0; x < 4; ++x) {
      if (sub[x][x] != 0.0) throw std::invalid_argument("TransitionModel: sub diagonal != 0");
      double s = 0.0;
      for (int a = 0; a < 4; ++a) {
        if (sub[x][a] < 0.0) throw std::invalid_argument("TransitionModel: negative sub entry");
        s += sub[x][a];
      }
      if (std::abs(s - 1.0) > 1e-12)
        throw std::invalid_argument("TransitionModel: sub row does not sum to 1");
    }
    auto check_row = [](const EventProbs& p) {
      double s = 0.0;
      for (double v : p) {
        if (v < 0.0) throw std::invalid_argument("TransitionModel: negative probability");
        s += v;
      }
      if (std::abs(s - 1.0) > 1e-12)
        throw std::invalid_argument("TransitionModel: event row does not sum to 1");
      if (p[static_cast<int>(Event::Ins)] > 0.999)
        throw std::invalid_argument("TransitionModel: p(Ins) > 0.999 stalls the channel");
    };
    for (const auto& [key, t] : table) {
      (void)key;
      for (const auto& row : t) check_row(row);
    }
    for (const auto& row : fallback) check_row(row);
  }

 private:
  static bool filled(const EventProbs& p) { return p[0] + p[1] + p[2] + p[3] > 0.0; }
};

// ---------------------------------------------------------------------------
// Simulation.

struct Read {
  NucSeq seq;
  bool backward = false;
  std::int64_t origin = -1;  // true source-strand index; bookkeeping only,
                             // never consulted by decoders
};

/// One channel event as it happened, for chain records and oracles.
/// `emitted` is the appended symbol for Ins/Sub/Tra and unused (0) for Del.
struct ChainStep {
  Event e;
  Nuc emitted = 0;
  bool operator==(const ChainStep&) const = default;
};
using EventChain = std::vector<ChainStep>;

/// Pass one strand through the channel.  If `chain` is non-null the exact
/// event sequence is recorded (oracle/estimation support).
inline NucSeq transmit_seq(const NucSeq& x, const TransitionModel& m, Philox& rng,
                           EventChain* chain = nullptr) {
  if (x.empty()) throw std::invalid_argument("transmit: empty strand");
  NucSeq y;
  y.reserve(x.size() + 8);
  if (chain) chain->clear();
  Event prev = Event::Beg;
  const std::size_t L = x.size();
  for (std::size_t t = 1; t <= L;) {
    const auto& p = m.probs(kmer_at(x, t, m.k), prev);
    const double u = rng.next_double();
    Event e;
    if (u < p[0]) e = Event::Ins;
    else if (u < p[0] + p[1]) e = Event::Del;
    else if (u < p[0] + p[1] + p[2]) e = Event::Sub;
    else e = Event::Tra;
    Nuc emitted = 0;
    switch (e) {
      case Event::Ins:
        emitted = static_cast<Nuc>(rng.below(4));
        y.push_back(emitted);
        break;
      case Event::Del:
        ++t;
        break;
      case Event::Sub: {
        const auto& row = m.sub[x[t - 1]];
        double v = rng.next_double() * (row[0] + row[1] + row[2] + row[3]);
        Nuc a = 3;
        for (Nuc c = 0; c < 3; ++c) {
          v -= row[c];
          if (v < 0.0) { a = c; break; }
        }
        emitted = a;
        y.push_back(a);
        ++t;
        break;
      }
      case Event::Tra:
        emitted = x[t - 1];
        y.push_back(emitted);
        ++t;
        break;
      case Event::Beg:
        throw std::logic_error("transmit: Beg sampled");
    }
    if (chain) chain->push_back({e, emitted});
    prev = e;
  }
  return y;
}

inline Read transmit(const NucSeq& x, const TransitionModel& m, Philox& rng,
                     EventChain* chain = nullptr) {
  return Read{transmit_seq(x, m, rng, chain), m.backward, -1};
}

/// Replay a chain against x to obtain the read it produces.
inline NucSeq apply_chain(const NucSeq& x, const EventChain& chain) {
  NucSeq y;
  std::size_t t = 1;
  for (const ChainStep& s : chain) {
    switch (s.e) {
      case Event::Ins: y.push_back(s.emitted); break;
      case Event::Del: ++t; break;
      case Event::Sub:
      case Event::Tra: y.push_back(s.emitted); ++t; break;
      case Event::Beg: throw std::invalid_argument("apply_chain: Beg in chain");
    }
  }
  if (t != x.size() + 1) throw std::invalid_argument("apply_chain: chain does not consume x");
  return y;
}

/// Probability of one exact event chain (a valid edit script from x to some
/// read), including the 1/4 insertion-symbol factor and the substitution
/// matrix factor.  Brute-force oracle support.
inline double event_chain_probability(const NucSeq& x, const EventChain& chain,
                                      const TransitionModel& m) {
  const std::size_t L = x.size();
  double prob = 1.0;
  Event prev = Event::Beg;
  std::size_t t = 1;
  for (const ChainStep& s : chain) {
    if (t > L) throw std::invalid_argument("event_chain_probability: chain overruns strand");
    const auto& p = m.probs(kmer_at(x, t, m.k), prev);
    prob *= p[static_cast<std::size_t>(s.e)];
    switch (s.e) {
      case Event::Ins: prob *= 0.25; break;
      case Event::Del: ++t; break;
      case Event::Sub:
        if (s.emitted == x[t - 1])
          throw std::invalid_argument("event_chain_probability: Sub emits the queued symbol");
        prob *= m.sub[x[t - 1]][s.emitted];
        ++t;
        break;
      case Event::Tra:
        if (s.emitted != x[t - 1])
          throw std::invalid_argument("event_chain_probability: Tra alters the queued symbol");
        ++t;
        break;
      case Event::Beg: throw std::invalid_argument("event_chain_probability: Beg in chain");
    }
    prev = s.e;
  }
  if (t != L + 1) throw std::invalid_argument("event_chain_probability: chain does not consume x");
  return prob;
}

// ---------------------------------------------------------------------------
// JSON model files: {k, direction, sub_matrix, entries: [{kmer, prev_event,
// p_ins, p_del, p_sub, p_tra}]}, probabilities in linear domain.

inline nlohmann::ordered_json model_to_json(const TransitionModel& m) {
  nlohmann::ordered_json j;
  j["k"] = m.k;
  j["direction"] = m.backward ? "backward" : "forward";
  j["sub_matrix"] = m.sub;
  std::vector<std::pair<std::string, KmerKey>> keys;
  keys.reserve(m.table.size());
  for (const auto& [key, t] : m.table) {
    (void)t;
    keys.emplace_back(kmer_string(key), key);
  }
  std::sort(keys.begin(), keys.end(), [](const auto& a, const auto& b) {
    return a.first.size() != b.first.size() ? a.first.size() < b.first.size()
                                            : a.first < b.first;
  });
  auto& entries = j["entries"] = nlohmann::ordered_json::array();
  for (const auto& [str, key] : keys) {
    const auto& t = m.table.at(key);
    for (int p = 0; p < kNumPrev; ++p) {
      nlohmann::ordered_json e;
      e["kmer"] = str;
      e["prev_event"] = kEventName[p];
      e["p_ins"] = t[p][0];
      e["p_del"] = t[p][1];
      e["p_sub"] = t[p][2];
      e["p_tra"] = t[p][3];
      entries.push_back(std::move(e));
    }
  }
  return j;
}

inline TransitionModel model_from_json(const nlohmann::json& j) {
  TransitionModel m;
  m.k = j.at("k").get<int>();
  const std::string dir = j.at("direction").get<std::string>();
  if (dir != "forward" && dir != "backward")
    throw std::invalid_argument("model: direction must be forward or backward");
  m.backward = dir == "backward";
  m.sub = j.at("sub_matrix").get<std::array<std::array<double, 4>, 4>>();
  for (const auto& e : j.at("entries")) {
    const NucSeq kmer = parse_nucs(e.at("kmer").get<std::string>());
    const Event prev = event_from_name(e.at("prev_event").get<std::string>());
    auto& row = m.table[kmer_key(kmer)][static_cast<std::size_t>(prev)];
    row[0] = e.at("p_ins").get<double>();
    row[1] = e.at("p_del").get<double>();
    row[2] = e.at("p_sub").get<double>();
    row[3] = e.at("p_tra").get<double>();
  }
  m.finalize();
  m.validate();
  return m;
}

inline void save_model(const TransitionModel& m, std::ostream& os) {
  os << model_to_json(m).dump(2) << '\n';
}

inline TransitionModel load_model(std::istream& is) {
  nlohmann::json j;
  is >> j;
  return model_from_json(j);
}

}  // namespace dnastore::channel
