#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cmath>
#include <cstdint>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "dnastore/estimation.hpp"
#include "oracles.hpp"

using namespace dnastore;
namespace ch = dnastore::channel;
namespace est = dnastore::estimation;

namespace {

NucSeq random_strand(std::size_t len, Philox& rng) {
  NucSeq s(len);
  for (auto& v : s) v = static_cast<Nuc>(rng.below(4));
  return s;
}

/// Forward-read dataset drawn from `truth`: `n_reads` reads spread evenly
/// over `m` random inputs of length `len`.  True per-chain event frequencies
/// of the generated sample are accumulated into `freq` when given.
est::PairedDataset synth_dataset(const ch::TransitionModel& truth, std::size_t m, std::size_t len,
                                 std::size_t n_reads, Philox& rng,
                                 std::array<double, 4>* freq = nullptr) {
  est::PairedDataset data;
  data.clusters.resize(m);
  for (auto& c : data.clusters) c.input = random_strand(len, rng);
  std::array<double, 4> counts{};
  double total = 0.0;
  for (std::size_t r = 0; r < n_reads; ++r) {
    auto& c = data.clusters[r % m];
    ch::EventChain chain;
    c.reads.push_back(ch::Read{ch::transmit_seq(c.input, truth, rng, &chain), false,
                               static_cast<std::int64_t>(r % m)});
    for (const auto& s : chain) ++counts[static_cast<std::size_t>(s.e)];
    total += static_cast<double>(chain.size());
  }
  if (freq != nullptr)
    for (std::size_t e = 0; e < 4; ++e) (*freq)[e] = counts[e] / total;
  return data;
}

/// Count-weighted average event frequencies of a count table (total count of
/// the event type over the grand total), the "average error rate" of a
/// dataset.
std::array<double, 4> weighted_rates(const est::TransitionCounts& tc) {
  std::array<double, 4> counts{};
  double total = 0.0;
  for (const auto& [key, pt] : tc.events) {
    (void)key;
    for (std::size_t p = 0; p < 5; ++p)
      for (std::size_t e = 0; e < 4; ++e) {
        counts[e] += pt[p][e];
        total += pt[p][e];
      }
  }
  for (auto& v : counts) v /= total;
  return counts;
}

}  // namespace

TEST_CASE("identical strands align to an all-transmission chain", "[estimation]") {
  Philox rng(31);
  const NucSeq x = random_strand(50, rng);
  const auto chain = est::align_events(x, x, rng);
  REQUIRE(chain.size() == x.size());
  for (std::size_t t = 0; t < chain.size(); ++t) {
    CHECK(chain[t].e == ch::Event::Tra);
    CHECK(chain[t].emitted == x[t]);
  }
  CHECK(est::chain_cost(chain) == 0);
  CHECK(est::edit_distance(x, x) == 0);
  CHECK(ch::apply_chain(x, chain) == x);
}

TEST_CASE("a single deletion lands on one of the ambiguous positions", "[estimation]") {
  const NucSeq x = parse_nucs("AACG");
  const NucSeq y = parse_nucs("ACG");
  REQUIRE(est::edit_distance(x, y) == 1);

  std::set<std::size_t> del_positions;
  for (std::uint64_t seed = 0; seed < 64; ++seed) {
    Philox rng(seed);
    const auto chain = est::align_events(x, y, rng);
    REQUIRE(chain.size() == x.size());
    REQUIRE(est::chain_cost(chain) == 1);
    REQUIRE(ch::apply_chain(x, chain) == y);
    std::size_t del_at = x.size();
    for (std::size_t t = 0; t < chain.size(); ++t) {
      if (chain[t].e == ch::Event::Del) {
        del_at = t;
      } else {
        CHECK(chain[t].e == ch::Event::Tra);
      }
    }
    REQUIRE(del_at < 2);  // only the two leading A's are deletable at cost 1
    del_positions.insert(del_at);
  }
  // Random tie-breaking must reach both optimal scripts.
  CHECK(del_positions.size() == 2);
}

TEST_CASE("tie-breaking explores many distinct optimal chains on a homopolymer", "[estimation]") {
  const NucSeq x = parse_nucs("AAAAAA");
  const NucSeq y = parse_nucs("AAAA");
  std::set<std::string> seen;
  for (std::uint64_t seed = 0; seed < 64; ++seed) {
    Philox rng(seed);
    const auto chain = est::align_events(x, y, rng);
    REQUIRE(est::chain_cost(chain) == 2);
    REQUIRE(ch::apply_chain(x, chain) == y);
    std::string sig;
    for (const auto& s : chain) sig += s.e == ch::Event::Del ? 'D' : 'T';
    seen.insert(sig);
  }
  CHECK(seen.size() >= 2);  // existence of distinct optimal chains
}

TEST_CASE("alignment cost matches an independent Levenshtein oracle", "[estimation]") {
  Philox rng(7001);
  const auto noisy = ch::TransitionModel::iid(0.06, 0.06, 0.10);
  for (int trial = 0; trial < 10000; ++trial) {
    const std::size_t L = 1 + rng.below(60);
    const NucSeq x = random_strand(L, rng);
    // Half channel-mutated pairs, half unrelated pairs (worst-case scripts).
    const NucSeq y =
        trial % 2 == 0 ? ch::transmit_seq(x, noisy, rng) : random_strand(rng.below(70), rng);
    const int d = oracles::levenshtein(x, y);
    REQUIRE(est::edit_distance(x, y) == d);
    const auto chain = est::align_events(x, y, rng);
    REQUIRE(est::chain_cost(chain) == d);
    REQUIRE(ch::apply_chain(x, chain) == y);
  }
}

TEST_CASE("event counting annotates kmers and previous events", "[estimation]") {
  const NucSeq x = parse_nucs("ACG");

  est::TransitionCounts tc;
  tc.k = 1;
  // Ins T (queued A, prev Beg), Tra A (prev Ins), Sub C->T (prev Tra),
  // Del G (prev Sub).
  const ch::EventChain chain = {{ch::Event::Ins, 3},
                                {ch::Event::Tra, 0},
                                {ch::Event::Sub, 3},
                                {ch::Event::Del, 0}};
  est::count_chain(tc, x, chain);

  const auto key_a = ch::kmer_key(x.data() + 0, 1);
  const auto key_c = ch::kmer_key(x.data() + 1, 1);
  const auto key_g = ch::kmer_key(x.data() + 2, 1);
  const auto ev = [](ch::Event e) { return static_cast<std::size_t>(e); };
  CHECK(tc.events.at(key_a)[ev(ch::Event::Beg)][ev(ch::Event::Ins)] == 1.0);
  CHECK(tc.events.at(key_a)[ev(ch::Event::Ins)][ev(ch::Event::Tra)] == 1.0);
  CHECK(tc.events.at(key_c)[ev(ch::Event::Tra)][ev(ch::Event::Sub)] == 1.0);
  CHECK(tc.events.at(key_g)[ev(ch::Event::Sub)][ev(ch::Event::Del)] == 1.0);
  CHECK(tc.sub[1][3] == 1.0);  // C substituted by T
  double sub_total = 0.0;
  for (const auto& row : tc.sub)
    for (const double v : row) sub_total += v;
  CHECK(sub_total == 1.0);

  SECTION("insertions behind the strand end are filed under the final symbol") {
    est::TransitionCounts tail;
    tail.k = 1;
    const NucSeq xs = parse_nucs("AC");
    const ch::EventChain with_tail = {
        {ch::Event::Tra, 0}, {ch::Event::Tra, 1}, {ch::Event::Ins, 2}};
    est::count_chain(tail, xs, with_tail);
    CHECK(tail.events.at(key_c)[ev(ch::Event::Tra)][ev(ch::Event::Ins)] == 1.0);
  }

  SECTION("a chain that does not consume the strand is rejected") {
    est::TransitionCounts bad;
    bad.k = 1;
    const ch::EventChain incomplete = {{ch::Event::Tra, 0}, {ch::Event::Tra, 1}};
    CHECK_THROWS_AS(est::count_chain(bad, x, incomplete), std::invalid_argument);
  }

  SECTION("tables merge by cellwise addition and reject mixed k") {
    est::TransitionCounts other;
    other.k = 1;
    est::count_chain(other, x, chain);
    other.merge(tc);
    CHECK(other.events.at(key_a)[ev(ch::Event::Beg)][ev(ch::Event::Ins)] == 2.0);
    CHECK(other.sub[1][3] == 2.0);
    est::TransitionCounts wide;
    wide.k = 3;
    CHECK_THROWS_AS(wide.merge(tc), std::invalid_argument);
  }
}

TEST_CASE("estimation reproduces the published average rates in closed loop", "[estimation]") {
  // Generate from known truth at the published accurate-basecaller rates,
  // re-estimate, and compare: well-supported error-probability cells within
  // +/-0.005, count-weighted average IDS rates within +/-0.002, and a sample
  // regenerated from the estimate indistinguishable in average rates.
  const auto truth = ch::TransitionModel::iid(0.009, 0.014, 0.020);
  Philox rng(2026);
  std::array<double, 4> freq_a{};
  const auto data = synth_dataset(truth, 1000, 110, 100000, rng, &freq_a);

  est::EstimateParams prm;  // k = 1, forward, min_count 50
  const auto tc = est::count_events(data, prm, 0, data.clusters.size());
  const auto mdl = est::build_model(tc, prm.backward, prm.min_count);

  int qualifying = 0;
  for (Nuc a = 0; a < 4; ++a) {
    const auto key = ch::kmer_key(&a, 1);
    const auto it = tc.events.find(key);
    REQUIRE(it != tc.events.end());
    const auto& est_rows = mdl.prev_table(key);
    const auto& true_rows = truth.prev_table(key);
    for (std::size_t p = 0; p < 5; ++p) {
      // Ratio construction: every estimated row is an exact simplex point.
      double row_sum = 0.0;
      for (std::size_t e = 0; e < 4; ++e) row_sum += est_rows[p][e];
      CHECK(std::abs(row_sum - 1.0) < 1e-12);
      // Error-event probabilities backed by >= 1000 observations are tight.
      for (std::size_t e = 0; e < 3; ++e) {
        if (it->second[p][e] < 1000.0) continue;
        ++qualifying;
        CHECK(std::abs(est_rows[p][e] - true_rows[p][e]) <= 0.005);
      }
    }
  }
  CHECK(qualifying >= 12);  // the gate must not be vacuous

  const auto w = weighted_rates(tc);
  CHECK(std::abs(w[0] - 0.009) <= 0.002);
  CHECK(std::abs(w[1] - 0.014) <= 0.002);
  CHECK(std::abs(w[2] - 0.020) <= 0.002);

  // Substitution matrix: truth is uniform off-diagonal.
  for (std::size_t v = 0; v < 4; ++v) {
    CHECK(mdl.sub[v][v] == 0.0);
    for (std::size_t a = 0; a < 4; ++a)
      if (a != v) CHECK(std::abs(mdl.sub[v][a] - 1.0 / 3.0) < 0.02);
  }

  // Regenerate from the estimate; true chain frequencies must be
  // indistinguishable from the original sample's.
  std::array<double, 4> counts_b{};
  double total_b = 0.0;
  for (int r = 0; r < 100000; ++r) {
    const auto& c = data.clusters[static_cast<std::size_t>(r) % data.clusters.size()];
    ch::EventChain chain;
    (void)ch::transmit_seq(c.input, mdl, rng, &chain);
    for (const auto& s : chain) ++counts_b[static_cast<std::size_t>(s.e)];
    total_b += static_cast<double>(chain.size());
  }
  for (std::size_t e = 0; e < 3; ++e)
    CHECK(std::abs(counts_b[e] / total_b - freq_a[e]) <= 0.002);
}

TEST_CASE("noiseless data estimates a transmission-only model", "[estimation]") {
  const auto clean = ch::TransitionModel::iid(0.0, 0.0, 0.0);
  Philox rng(55);
  const auto data = synth_dataset(clean, 20, 60, 200, rng);
  const auto mdl = est::estimate_transitions(data, est::EstimateParams{});
  for (Nuc a = 0; a < 4; ++a) {
    const auto& rows = mdl.prev_table(ch::kmer_key(&a, 1));
    for (std::size_t p = 0; p < 5; ++p) {
      CHECK(rows[p][static_cast<std::size_t>(ch::Event::Tra)] == 1.0);
      CHECK(rows[p][0] == 0.0);
      CHECK(rows[p][1] == 0.0);
      CHECK(rows[p][2] == 0.0);
    }
  }
}

TEST_CASE("backward reads estimate the reverse-complement channel", "[estimation]") {
  const auto fwd_truth = ch::TransitionModel::iid(0.009, 0.014, 0.020);
  const auto bwd_truth = ch::TransitionModel::iid(0.025, 0.010, 0.035);
  Philox rng(404);

  est::PairedDataset data;
  data.clusters.resize(200);
  for (auto& c : data.clusters) {
    c.input = random_strand(80, rng);
    const NucSeq rc = reverse_complement(c.input);
    for (int j = 0; j < 10; ++j) {
      c.reads.push_back(ch::Read{ch::transmit_seq(c.input, fwd_truth, rng), false, 0});
      c.reads.push_back(ch::Read{ch::transmit_seq(rc, bwd_truth, rng), true, 0});
    }
  }

  est::EstimateParams prm;
  const auto tc_f = est::count_events(data, prm, 0, data.clusters.size());
  prm.backward = true;
  const auto tc_b = est::count_events(data, prm, 0, data.clusters.size());

  const auto wf = weighted_rates(tc_f);
  CHECK(std::abs(wf[0] - 0.009) <= 0.004);
  CHECK(std::abs(wf[1] - 0.014) <= 0.004);
  CHECK(std::abs(wf[2] - 0.020) <= 0.004);
  const auto wb = weighted_rates(tc_b);
  CHECK(std::abs(wb[0] - 0.025) <= 0.004);
  CHECK(std::abs(wb[1] - 0.010) <= 0.004);
  CHECK(std::abs(wb[2] - 0.035) <= 0.004);

  const auto mdl_b = est::build_model(tc_b, true, prm.min_count);
  CHECK(mdl_b.backward);
}

TEST_CASE("event counting is invariant under cluster partitioning", "[estimation]") {
  const auto truth = ch::TransitionModel::iid(0.02, 0.02, 0.04);
  Philox rng(91);
  auto data = synth_dataset(truth, 50, 60, 200, rng);
  // Mix in backward reads so the direction filter is exercised too.
  for (std::size_t ci = 0; ci < data.clusters.size(); ++ci) {
    const NucSeq rc = reverse_complement(data.clusters[ci].input);
    data.clusters[ci].reads.push_back(ch::Read{ch::transmit_seq(rc, truth, rng), true, 0});
  }

  est::EstimateParams prm;
  prm.tie_seed = 17;
  const auto whole = est::count_events(data, prm, 0, data.clusters.size());
  auto parts = est::count_events(data, prm, 0, 17);
  parts.merge(est::count_events(data, prm, 17, data.clusters.size()));

  REQUIRE(parts.events.size() == whole.events.size());
  for (const auto& [key, rows] : whole.events) {
    const auto it = parts.events.find(key);
    REQUIRE(it != parts.events.end());
    for (std::size_t p = 0; p < 5; ++p)
      for (std::size_t e = 0; e < 4; ++e) REQUIRE(it->second[p][e] == rows[p][e]);
  }
  for (std::size_t v = 0; v < 4; ++v)
    for (std::size_t a = 0; a < 4; ++a) REQUIRE(parts.sub[v][a] == whole.sub[v][a]);
}

TEST_CASE("draw estimation follows cluster sizes", "[estimation]") {
  est::PairedDataset data;
  data.clusters.resize(3);
  Philox rng(3);
  for (auto& c : data.clusters) c.input = random_strand(8, rng);
  data.clusters[0].reads.push_back(ch::Read{parse_nucs("ACGT"), false, 0});
  data.clusters[0].reads.push_back(ch::Read{parse_nucs("AGT"), true, 0});
  data.clusters[2].reads.push_back(ch::Read{parse_nucs("TT"), false, 2});

  const auto e = est::estimate_draw(data);
  REQUIRE(e.draw.probs.size() == 3);
  CHECK(e.draw.probs[0] == 2.0 / 3.0);
  CHECK(e.draw.probs[1] == 0.0);
  CHECK(e.draw.probs[2] == 1.0 / 3.0);
  CHECK(e.p_rc == 1.0 / 3.0);

  SECTION("all-forward data has zero backward fraction") {
    data.clusters[0].reads[1].backward = false;
    CHECK(est::estimate_draw(data).p_rc == 0.0);
  }

  SECTION("a dataset with no reads is rejected") {
    for (auto& c : data.clusters) c.reads.clear();
    CHECK_THROWS_AS(est::estimate_draw(data), std::invalid_argument);
  }
}

TEST_CASE("subsampling preserves the expected mean cluster size", "[estimation]") {
  est::PairedDataset data;
  data.clusters.resize(100);
  Philox rng(12);
  double population_total = 0.0;
  for (std::size_t i = 0; i < data.clusters.size(); ++i) {
    data.clusters[i].input = random_strand(6, rng);
    const std::size_t sz = i % 7;
    population_total += static_cast<double>(sz);
    for (std::size_t j = 0; j < sz; ++j)
      data.clusters[i].reads.push_back(ch::Read{parse_nucs("ACG"), false, 0});
  }
  const double population_mean = population_total / 100.0;

  double resample_mean = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const auto sub = est::subsample_clusters(data, 50, rng);
    REQUIRE(sub.clusters.size() == 50);
    resample_mean += static_cast<double>(sub.read_count()) / 50.0;
  }
  resample_mean /= 1000.0;
  CHECK(std::abs(resample_mean - population_mean) <= 0.02 * population_mean);

  SECTION("taking every cluster preserves the order") {
    const auto all = est::subsample_clusters(data, 100, rng);
    for (std::size_t i = 0; i < 100; ++i) REQUIRE(all.clusters[i].input == data.clusters[i].input);
  }

  SECTION("out-of-range sizes are rejected") {
    CHECK_THROWS_AS(est::subsample_clusters(data, 0, rng), std::invalid_argument);
    CHECK_THROWS_AS(est::subsample_clusters(data, 101, rng), std::invalid_argument);
  }
}

TEST_CASE("offset fitting inverts strand encoding", "[estimation]") {
  code::JointCodeLayout lay;
  lay.M = 24;
  lay.L_p = 2;
  lay.primer1 = parse_nucs("AC");
  lay.primer2 = parse_nucs("GT");
  lay.index = code::make_index_code(code::IndexKind::ES, lay.M);
  lay.inner = code::InnerMR{2};
  lay.L_o = 10;
  lay.offset_seed = 77;
  lay.validate();

  Philox rng(9);

  SECTION("the layout's own offset is recovered from its encodings") {
    for (int t = 0; t < 100; ++t) {
      const NucSeq w = random_strand(static_cast<std::size_t>(lay.L_o), rng);
      const std::int64_t i = 1 + static_cast<std::int64_t>(rng.below(24));
      const NucSeq z = est::fit_offset(code::encode_strand(w, i, lay), w, i, lay);
      REQUIRE(z == lay.offset());
    }
  }

  SECTION("zero-offset encodings fit an all-zero offset") {
    const NucSeq zero(static_cast<std::size_t>(lay.region_nt()), 0);
    const NucSeq w = random_strand(static_cast<std::size_t>(lay.L_o), rng);
    const NucSeq z = est::fit_offset(code::encode_strand(w, 5, lay, zero), w, 5, lay);
    CHECK(z == zero);
  }

  SECTION("fitted offsets replay arbitrary strands exactly") {
    for (int t = 0; t < 1000; ++t) {
      const NucSeq w = random_strand(static_cast<std::size_t>(lay.L_o), rng);
      const std::int64_t i = 1 + static_cast<std::int64_t>(rng.below(24));
      // A random strand with the layout's primers: only the coding region is
      // free, which is exactly the part the offset covers.
      NucSeq x = code::encode_strand(w, i, lay);
      for (int t2 = 0; t2 < lay.region_nt(); ++t2)
        x[static_cast<std::size_t>(lay.L_p + t2)] = static_cast<Nuc>(rng.below(4));
      const NucSeq z = est::fit_offset(x, w, i, lay);
      REQUIRE(static_cast<int>(z.size()) == lay.region_nt());
      REQUIRE(code::encode_strand(w, i, lay, z) == x);
    }
  }

  SECTION("length mismatches are rejected") {
    const NucSeq w = random_strand(static_cast<std::size_t>(lay.L_o), rng);
    CHECK_THROWS_AS(est::fit_offset(random_strand(7, rng), w, 1, lay), std::invalid_argument);
  }
}

TEST_CASE("nearest input resolves reads to their strand", "[estimation]") {
  Philox rng(123);
  std::vector<NucSeq> inputs;
  for (int i = 0; i < 3; ++i) inputs.push_back(random_strand(40, rng));

  const auto noisy = ch::TransitionModel::iid(0.02, 0.02, 0.03);
  for (int t = 0; t < 50; ++t) {
    const std::size_t pick = rng.below(3);
    CHECK(est::nearest_input(inputs, ch::transmit_seq(inputs[pick], noisy, rng)) == pick);
  }

  SECTION("ties resolve to the lowest index") {
    const std::vector<NucSeq> pair = {parse_nucs("AAAA"), parse_nucs("AAAT")};
    CHECK(est::nearest_input(pair, parse_nucs("AAAC")) == 0);
  }

  SECTION("an empty input list is rejected") {
    CHECK_THROWS_AS(est::nearest_input({}, parse_nucs("A")), std::invalid_argument);
  }
}

TEST_CASE("datasets round-trip through the text format", "[estimation]") {
  est::PairedDataset d;
  d.clusters.resize(3);
  d.clusters[0].input = parse_nucs("ACGTTGCA");
  d.clusters[0].reads.push_back(ch::Read{parse_nucs("ACGTGCA"), false, 0});
  d.clusters[0].reads.push_back(ch::Read{parse_nucs("TGCAACGT"), true, 0});
  d.clusters[1].input = parse_nucs("AAAACCCC");
  d.clusters[2].input = parse_nucs("GGGGTTTT");
  d.clusters[2].reads.push_back(ch::Read{parse_nucs("GGGTTTT"), false, 2});

  std::ostringstream os;
  est::write_dataset(d, os);
  CHECK(os.str() ==
        ">cluster 1\n"
        "ACGTTGCA\n"
        "+f ACGTGCA\n"
        "+b TGCAACGT\n"
        ">cluster 2\n"
        "AAAACCCC\n"
        ">cluster 3\n"
        "GGGGTTTT\n"
        "+f GGGTTTT\n");

  std::istringstream is(os.str());
  const auto back = est::parse_dataset(is);
  REQUIRE(back.clusters.size() == 3);
  CHECK(back.read_count() == 3);
  CHECK(back.backward_count() == 1);
  for (std::size_t i = 0; i < 3; ++i) {
    REQUIRE(back.clusters[i].input == d.clusters[i].input);
    REQUIRE(back.clusters[i].reads.size() == d.clusters[i].reads.size());
    for (std::size_t j = 0; j < d.clusters[i].reads.size(); ++j) {
      CHECK(back.clusters[i].reads[j].seq == d.clusters[i].reads[j].seq);
      CHECK(back.clusters[i].reads[j].backward == d.clusters[i].reads[j].backward);
      CHECK(back.clusters[i].reads[j].origin == static_cast<std::int64_t>(i));
    }
  }

  SECTION("malformed files are rejected") {
    const auto reject = [](const std::string& text) {
      std::istringstream bad(text);
      CHECK_THROWS_AS(est::parse_dataset(bad), std::invalid_argument);
    };
    reject("ACGT\n");                          // data before the first record
    reject(">cluster 1\nACGT\n+x ACG\n");      // unknown read prefix
    reject(">cluster 1\nACXT\n");              // invalid base
    reject(">cluster 1\n+f ACG\n");            // read where the input belongs
    reject("");                                // no clusters at all
  }
}

TEST_CASE("estimation parameter validation rejects bad settings", "[estimation]") {
  est::EstimateParams prm;
  prm.k = 2;
  CHECK_THROWS_AS(prm.validate(), std::invalid_argument);
  prm.k = 0;
  CHECK_THROWS_AS(prm.validate(), std::invalid_argument);
  prm.k = 1;
  prm.min_count = 0;
  CHECK_THROWS_AS(prm.validate(), std::invalid_argument);

  const auto truth = ch::TransitionModel::iid(0.01, 0.01, 0.02);
  Philox rng(66);
  const auto data = synth_dataset(truth, 10, 40, 40, rng);

  SECTION("asking for a direction with no reads fails") {
    est::EstimateParams bwd;
    bwd.backward = true;
    CHECK_THROWS_AS(est::estimate_transitions(data, bwd), std::invalid_argument);
  }

  SECTION("a minimum count no row can meet fails") {
    est::EstimateParams strict;
    strict.min_count = 1000000;
    const auto tc = est::count_events(data, strict, 0, data.clusters.size());
    CHECK_THROWS_AS(est::build_model(tc, false, strict.min_count), std::runtime_error);
  }
}
