#include <doctest.h>

#include <gmpxx.h>

#include <cmath>
#include <map>
#include <set>

#include "infocommit/bs_ot.hpp"
#include "infocommit/errors.hpp"
#include "infocommit/ot.hpp"

using namespace infocommit;

namespace {

const Field& gf11() {
  static const Field f = Field::prime(11);
  return f;
}

OtMessage scalar(const MessageGroup& g, std::uint64_t v) { return g.encode(std::vector<Fe>{Fe{v}}); }

std::uint64_t value(const MessageGroup& g, const OtMessage& m) { return g.decode(m)[0].v; }

}  // namespace

TEST_CASE("ideal one-of-two") {
  const MessageGroup g(gf11(), 1);
  CHECK(value(g, ideal_ot2(scalar(g, 5), scalar(g, 9), true)) == 9);
  CHECK(value(g, ideal_ot2(scalar(g, 5), scalar(g, 9), false)) == 5);
  CHECK(ideal_ot2(scalar(g, 4), scalar(g, 4), true) == ideal_ot2(scalar(g, 4), scalar(g, 4), false));
  CHECK_THROWS_AS(ideal_ot2(Bytes{1}, Bytes{1, 2}, false), DimensionMismatch);

  SenderView views[2];
  for (int b = 0; b < 2; ++b) {
    IdealOtHub hub;
    IdealOt2Sender sender(hub);
    IdealOt2Receiver receiver(hub);
    sender.send(scalar(g, 5), scalar(g, 9));
    CHECK(value(g, receiver.receive(b == 1)) == (b ? 9u : 5u));
    views[b] = sender.view();
  }
  CHECK(views[0] == views[1]);
}

TEST_CASE("reduction table for three secrets") {
  const MessageGroup g(gf11(), 1);
  const std::vector<OtMessage> secrets{scalar(g, 3), scalar(g, 7), scalar(g, 2)};
  const std::vector<OtMessage> masks{scalar(g, 4)};
  const auto t = build_reduction_table(g, secrets, masks);
  REQUIRE(t.columns() == 2);
  CHECK(value(g, t.row1[0]) == 3);
  CHECK(value(g, t.row2[0]) == 4);
  CHECK(value(g, t.row1[1]) == 0);
  CHECK(value(g, t.row2[1]) == 6);

  auto pick = [&](std::size_t i) {
    std::vector<OtMessage> got;
    const auto rows = row_picks(i, 3);
    for (std::size_t j = 0; j < rows.size(); ++j) got.push_back(rows[j] == Row::first ? t.row1[j] : t.row2[j]);
    return value(g, decode_c_of_1(g, got, i, 3));
  };
  CHECK(pick(0) == 3);
  CHECK(pick(1) == 7);
  CHECK(pick(2) == 2);
}

TEST_CASE("degenerate and invalid tables") {
  const MessageGroup g(gf11(), 1);
  const std::vector<OtMessage> two{scalar(g, 1), scalar(g, 8)};
  Rng rng(1);
  const auto t = build_reduction_table(g, two, rng);
  CHECK(t.columns() == 1);
  CHECK(t.masks.empty());
  CHECK(t.row1[0] == two[0]);
  CHECK(t.row2[0] == two[1]);
  const std::vector<OtMessage> one{scalar(g, 1)};
  CHECK_THROWS_AS(build_reduction_table(g, one, rng), DomainError);
}

TEST_CASE("row picks") {
  CHECK(row_picks(0, 3) == std::vector<Row>{Row::first, Row::second});
  CHECK(row_picks(2, 3) == std::vector<Row>{Row::second, Row::second});
  CHECK(row_picks(1, 3) == std::vector<Row>{Row::second, Row::first});
  CHECK_THROWS_AS(row_picks(3, 3), DomainError);
}

TEST_CASE("mask uniformity") {
  const MessageGroup g(gf11(), 1);
  const std::vector<OtMessage> secrets{scalar(g, 0), scalar(g, 0), scalar(g, 0)};
  Rng rng(77);
  std::vector<int> counts(11, 0);
  const int trials = 22000;
  for (int i = 0; i < trials; ++i) ++counts[value(g, build_reduction_table(g, secrets, rng).masks[0])];
  const double expected = trials / 11.0;
  const double sigma = std::sqrt(trials * (1.0 / 11) * (10.0 / 11));
  for (int c : counts) CHECK(std::abs(c - expected) <= 5 * sigma);
}

TEST_CASE("one-of-c correctness up to c = 32 with the ideal backend") {
  Rng rng(2024);
  const MessageGroup g(gf11(), 3);
  int trials = 0;
  for (std::size_t c = 2; c <= 32; ++c) {
    for (int rep = 0; rep < 2; ++rep) {
      std::vector<OtMessage> secrets;
      for (std::size_t j = 0; j < c; ++j) secrets.push_back(g.random(rng));
      for (std::size_t i = 0; i < c; ++i) {
        CHECK(ot_c_of_1(g, secrets, i, OtBackend::ideal, rng) == secrets[i]);
        ++trials;
      }
    }
  }
  CHECK(trials >= 1000);
}

TEST_CASE("sender view does not depend on the receiver's index") {
  const MessageGroup g(gf11(), 1);
  const std::vector<OtMessage> secrets{scalar(g, 1), scalar(g, 2), scalar(g, 3), scalar(g, 4)};
  std::set<Bytes> traces;
  for (std::size_t i = 0; i < secrets.size(); ++i) {
    IdealOtHub hub;
    IdealOt2Sender sender(hub);
    IdealOt2Receiver receiver(hub);
    Rng rng(5);
    ot_c_of_1_send(g, secrets, sender, rng);
    CHECK(ot_c_of_1_receive(g, i, secrets.size(), receiver) == secrets[i]);
    traces.insert(sender.view().trace);
  }
  CHECK(traces.size() == 1);
}

// Enumerate every (secrets, masks) over GF(3) with c = 4 and check that,
// given the receiver's view for index i, the other secrets are uniform.
TEST_CASE("reduction hides the unchosen secrets") {
  const Field f = Field::prime(3);
  const MessageGroup g(f, 1);
  const std::size_t c = 4;
  for (std::size_t i = 0; i < c; ++i) {
    // view -> (other secrets -> count)
    std::map<std::vector<std::uint64_t>, std::map<std::vector<std::uint64_t>, int>> post;
    for (int code = 0; code < 3 * 3 * 3 * 3 * 3 * 3; ++code) {
      int x = code;
      std::vector<OtMessage> secrets, masks;
      std::vector<std::uint64_t> raw;
      for (std::size_t j = 0; j < c; ++j, x /= 3) {
        secrets.push_back(scalar(g, x % 3));
        raw.push_back(x % 3);
      }
      for (std::size_t j = 0; j < c - 2; ++j, x /= 3) masks.push_back(scalar(g, x % 3));
      const auto t = build_reduction_table(g, secrets, masks);
      const auto rows = row_picks(i, c);
      std::vector<std::uint64_t> view;
      for (std::size_t j = 0; j < rows.size(); ++j) view.push_back(value(g, rows[j] == Row::first ? t.row1[j] : t.row2[j]));
      std::vector<std::uint64_t> others;
      for (std::size_t j = 0; j < c; ++j)
        if (j != i) others.push_back(raw[j]);
      ++post[view][others];
    }
    for (const auto& [view, dist] : post) {
      CHECK(dist.size() == 27);
      for (const auto& [others, count] : dist) CHECK(count == dist.begin()->second);
    }
  }
}

TEST_CASE("bounded-storage parameters") {
  const auto d = BsOtParams::desk_default();
  CHECK(d.K == 131073);
  CHECK(d.n == 2897);
  // ceil(sqrt(2 * 16 * 4096)) = ceil(362.04)
  CHECK(BsOtParams::make(4096, 2.0, 16, 16).n == 363);
  CHECK(ceil_sqrt(131072) == 363);
  CHECK(ceil_sqrt(131044) == 362);
  CHECK_THROWS_AS(BsOtParams::make(4096, 1.0, 16, 16), ConfigError);
  CHECK_THROWS_AS(BsOtParams::make(4096, 2.0, 4, 4), ConfigError);
  CHECK_THROWS_AS(BsOtParams::make(64, 2.0, 64, 8), ConfigError);
}

TEST_CASE("phase one stores tape bits and meets the birthday estimate") {
  const auto p = BsOtParams::make(4096, 2.0, 16, 16);
  Rng rng(31);
  const auto one = bs_phase1(p, rng);
  for (std::size_t i = 0; i < one.a.indices.size(); i += 37) {
    CHECK(one.a.bits[i] == Tape::bit_at(one.tape_seed, one.a.indices[i]));
  }
  CHECK(one.b.bits[5] == Tape::bit_at(one.tape_seed, one.b.indices[5]));

  // Hypergeometric: mean n^2/K, variance n (n/K)(1-n/K)(K-n)/(K-1).
  const double n = static_cast<double>(p.n), K = static_cast<double>(p.K);
  const double mean = n * n / K;
  const double var = n * (n / K) * (1 - n / K) * (K - n) / (K - 1);
  double total = 0;
  const int runs = 200;
  for (int r = 0; r < runs; ++r) {
    const auto ph = bs_phase1(p, rng);
    total += static_cast<double>(intersection_positions(ph.a.indices, ph.b.indices).size());
  }
  CHECK(std::abs(total / runs - mean) <= 3 * std::sqrt(var / runs));
}

TEST_CASE("subset ranking round trip") {
  CHECK(binomial(8, 2) == 28);
  CHECK(encoding_bits(8, 2) == 5);
  for (std::uint64_t r = 0; r < 28; ++r) {
    const auto s = unrank_subset(r, 8, 2);
    CHECK(rank_subset(s) == r);
  }
  Rng rng(9);
  for (int i = 0; i < 50; ++i) {
    const auto s = random_subset(2897, 40, rng);
    CHECK(unrank_subset(rank_subset(s), 2897, 40) == s);
  }
  CHECK_THROWS_AS(unrank_subset(28, 8, 2), DomainError);
}

TEST_CASE("interactive hashing yields two solutions including the input") {
  Rng rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t width = 2 + rng.uniform(30);
    BitVec w(width);
    for (auto& b : w) b = rng.bit();
    std::vector<BitVec> hs;
    std::vector<std::uint8_t> replies;
    for (std::size_t j = 0; j + 1 < width; ++j) {
      hs.push_back(ih_constraint(j, width, rng));
      replies.push_back(ih_reply(hs.back(), w));
    }
    const auto [lo, hi] = ih_solutions(hs, replies);
    CHECK(lo < hi);
    CHECK((lo == w || hi == w));
    for (std::size_t j = 0; j < hs.size(); ++j) {
      CHECK(ih_reply(hs[j], lo) == replies[j]);
      CHECK(ih_reply(hs[j], hi) == replies[j]);
    }
  }
}

TEST_CASE("set pair contract") {
  const auto p = BsOtParams::make(4096, 2.0, 16, 16);
  Rng rng(3);
  int done = 0;
  while (done < 20) {
    const auto ph = bs_phase1(p, rng);
    const bool b = rng.bit();
    Rng srng(rng.fork_seed()), rrng(rng.fork_seed());
    try {
      const auto run = bs_setpair(ph.a, ph.b, b, p.ell, p.k, srng, rrng);
      const auto& xb = b ? run.pair.x1 : run.pair.x0;
      CHECK(run.pair.x0.size() == run.pair.x1.size());
      const auto inter = intersection_positions(ph.a.indices, ph.b.indices);
      for (auto pos : xb) CHECK(std::binary_search(inter.begin(), inter.end(), pos));
      ++done;
    } catch (const RetriableError&) {
    }
  }
}

// K = 16, n = 8, t = 2: for fixed Omega_A and sender constraints, enumerate
// every receiver tape (Omega_B, chosen subset) with its exact probability and
// compare the receiver-message distributions for b = 0 and b = 1.
TEST_CASE("interactive hashing transcript is independent of the choice bit") {
  const std::uint64_t K = 16, n = 8, t = 2;
  const std::size_t width = encoding_bits(n, t);
  Rng rng(44);
  const std::vector<std::uint32_t> omega_a = random_subset(K, n, rng);
  for (int sender_tape = 0; sender_tape < 4; ++sender_tape) {
    std::vector<BitVec> hs;
    for (std::size_t j = 0; j + 1 < width; ++j) hs.push_back(ih_constraint(j, width, rng));
    const auto d0 = ih_sender_view_distribution(omega_a, K, t, hs, false);
    const auto d1 = ih_sender_view_distribution(omega_a, K, t, hs, true);
    mpq_class total = 0;
    for (const auto& [_, p] : d0) total += p;
    CHECK(total == 12870);
    CHECK(d0.size() > 2);
    CHECK(d0 == d1);
  }
}

TEST_CASE("extractor bits over missing key bits are fair coins") {
  Rng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t rbits = 10;
    const std::uint64_t seed = rng.fork_seed();
    BitVec r(rbits);
    for (auto& b : r) b = rng.bit();
    const std::vector<std::size_t> missing{1, 4, 7};
    const auto rows = extractor_rows(seed, rbits, 16);
    const Bytes truth = extract(seed, r, 2);
    for (std::size_t o = 0; o < 16; ++o) {
      bool touches = false;
      for (auto m : missing) touches |= rows[o][m] != 0;
      int agree = 0;
      for (int assign = 0; assign < 8; ++assign) {
        BitVec guess = r;
        for (std::size_t k = 0; k < missing.size(); ++k) guess[missing[k]] = (assign >> k) & 1;
        const Bytes out = extract(seed, guess, 2);
        agree += ((out[o / 8] ^ truth[o / 8]) >> (o % 8) & 1) == 0;
      }
      CHECK(agree == (touches ? 4 : 8));
    }
  }
}

namespace {

// Rank over GF(2) of the extractor rows restricted to the missing columns.
std::size_t missing_rank(std::vector<BitVec> rows, const std::vector<std::size_t>& cols) {
  std::size_t rank = 0;
  for (std::size_t c : cols) {
    std::size_t pivot = rank;
    while (pivot < rows.size() && !rows[pivot][c]) ++pivot;
    if (pivot == rows.size()) continue;
    std::swap(rows[rank], rows[pivot]);
    for (std::size_t i = 0; i < rows.size(); ++i)
      if (i != rank && rows[i][c])
        for (std::size_t k = 0; k < rows[i].size(); ++k) rows[i][k] ^= rows[rank][k];
    ++rank;
  }
  return rank;
}

}  // namespace

// A receiver keeping n bits tries to also decode the other message by
// guessing the key bits it lacks; the success rate must match the exact
// per-run probability 2^-rank(extractor restricted to missing bits).
TEST_CASE("both-secrets recovery matches the missing-bit analysis") {
  const auto p = BsOtParams::make(4096, 2.0, 16, 8);
  Rng rng(101);
  int runs = 0, successes = 0;
  double expected = 0, variance = 0;
  while (runs < 200) {
    const auto ph = bs_phase1(p, rng);
    const bool b = rng.bit();
    Rng srng(rng.fork_seed()), rrng(rng.fork_seed());
    SetPairRun run;
    try {
      run = bs_setpair(ph.a, ph.b, b, p.ell, p.k, srng, rrng);
    } catch (const RetriableError&) {
      continue;
    }
    ++runs;
    const auto& other = b ? run.pair.x0 : run.pair.x1;
    const BitVec truth = subset_bits(ph.a, other);
    BitVec guess(truth.size());
    std::vector<std::size_t> missing;
    for (std::size_t k = 0; k < other.size(); ++k) {
      const auto idx = ph.a.indices[other[k]];
      const auto it = std::lower_bound(ph.b.indices.begin(), ph.b.indices.end(), idx);
      if (it != ph.b.indices.end() && *it == idx) {
        guess[k] = ph.b.bits[static_cast<std::size_t>(it - ph.b.indices.begin())];
      } else {
        guess[k] = rng.bit();
        missing.push_back(k);
      }
    }
    const std::uint64_t seed = rng.fork_seed();
    const OtMessage m{0x5a};
    const Bytes e = bs_encode(m, seed, truth);
    successes += bs_decode(e, seed, guess) == m;
    const double prob = std::ldexp(1.0, -static_cast<int>(missing_rank(extractor_rows(seed, truth.size(), 8), missing)));
    expected += prob;
    variance += prob * (1 - prob);
  }
  CHECK(std::abs(successes - expected) <= 3 * std::sqrt(variance) + 1e-9);
}

TEST_CASE("bounded-storage one-of-two over a channel") {
  const auto p = BsOtParams::desk_default();
  Rng rng(2718);
  int correct = 0;
  const int runs = 200;
  std::uint64_t peak = 0;
  for (int i = 0; i < runs; ++i) {
    const bool b = rng.bit();
    OtMessage m0(16), m1(16);
    for (auto& x : m0) x = static_cast<std::uint8_t>(rng());
    for (auto& x : m1) x = static_cast<std::uint8_t>(rng());
    Rng srng(rng.fork_seed()), rrng(rng.fork_seed());
    const auto got = run_pair(
        [&](Transport& t) {
          BsOt2Sender sender(t, p, srng);
          sender.send(m0, m1);
          peak = std::max(peak, sender.stats().peak_storage_bits);
        },
        [&](Transport& t) {
          BsOt2Receiver receiver(t, p, rrng);
          return receiver.receive(b);
        });
    correct += got == (b ? m1 : m0);
  }
  CHECK(correct == runs);
  CHECK(peak <= p.N);
}

TEST_CASE("one-of-c through the bounded-storage backend") {
  const MessageGroup g(gf11(), 2);
  Rng rng(6);
  std::vector<OtMessage> secrets;
  for (int j = 0; j < 4; ++j) secrets.push_back(g.random(rng));
  for (std::size_t i = 0; i < secrets.size(); ++i) {
    CHECK(ot_c_of_1(g, secrets, i, OtBackend::bounded_storage, rng) == secrets[i]);
  }
}
