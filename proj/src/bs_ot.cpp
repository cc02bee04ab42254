#include "infocommit/bs_ot.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <unordered_set>

#include "infocommit/errors.hpp"

namespace infocommit {

namespace {

enum class IhKind : std::uint8_t { ready = 0, restart = 1, constraint = 2, reply = 3, swap = 4 };

Frame ih_frame(IhKind kind, const Bytes& body = {}) {
  Bytes payload{static_cast<std::uint8_t>(kind)};
  payload.insert(payload.end(), body.begin(), body.end());
  return {FrameTag::ih_round, std::move(payload)};
}

IhKind read_ih_kind(ByteReader& r, IhKind expected) {
  const auto kind = static_cast<IhKind>(r.u8());
  if (kind != expected && !(expected == IhKind::ready && kind == IhKind::restart)) {
    throw ProtocolError(ProtocolError::Code::malformed,
                        "unexpected interactive hashing message kind " + std::to_string(static_cast<int>(kind)));
  }
  return kind;
}

std::vector<std::uint32_t> choose_within(std::span<const std::uint32_t> pool, std::uint64_t t, Rng& rng) {
  std::vector<std::uint32_t> out;
  for (std::uint32_t idx : random_subset(pool.size(), t, rng)) out.push_back(pool[idx]);
  return out;
}

bool solution_valid(const std::pair<BitVec, BitVec>& sols, const mpz_class& limit) {
  return from_bits(sols.first) < limit && from_bits(sols.second) < limit;
}

// Sender half of the extractor pads, shared by the in-memory and wire paths.
Bytes encoded_pair(const OtMessage& m0, const OtMessage& m1, const StoredBits& a, const SetPair& pair, Rng& rng) {
  const std::uint64_t seed0 = rng.fork_seed();
  const std::uint64_t seed1 = rng.fork_seed();
  ByteWriter w;
  w.u64(seed0);
  w.blob(bs_encode(m0, seed0, subset_bits(a, pair.x0)));
  w.u64(seed1);
  w.blob(bs_encode(m1, seed1, subset_bits(a, pair.x1)));
  return w.take();
}

void check_omega(std::span<const std::uint32_t> omega, std::uint64_t n, std::uint64_t K) {
  if (omega.size() != n) {
    throw ProtocolError(ProtocolError::Code::malformed, "revealed subset has " + std::to_string(omega.size()) +
                                                            " entries, expected " + std::to_string(n));
  }
  for (std::size_t i = 0; i < omega.size(); ++i) {
    if (omega[i] >= K || (i > 0 && omega[i] <= omega[i - 1])) {
      throw ProtocolError(ProtocolError::Code::malformed, "revealed subset not sorted within the tape");
    }
  }
}

}  // namespace

std::uint64_t ceil_sqrt(std::uint64_t v) {
  auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<long double>(v)));
  while (r > 0 && r * r >= v) --r;
  while (r * r < v) ++r;
  return r;
}

BsOtParams BsOtParams::make(std::uint64_t N, double alpha, std::uint64_t ell, std::uint64_t k) {
  BsOtParams p;
  p.N = N;
  p.alpha = alpha;
  p.ell = ell;
  p.k = k;
  p.K = static_cast<std::uint64_t>(std::floor(alpha * static_cast<double>(N))) + 1;
  p.n = ceil_sqrt(2 * ell * N);
  p.validate();
  return p;
}

void BsOtParams::validate() const {
  if (N == 0) throw ConfigError("bounded-storage OT: N must be positive");
  if (!(alpha > 1)) throw ConfigError("bounded-storage OT: alpha must exceed 1");
  if (!(static_cast<double>(K) > alpha * static_cast<double>(N))) {
    throw ConfigError("bounded-storage OT: need K > alpha * N");
  }
  if (K >= (std::uint64_t{1} << 32)) throw ConfigError("bounded-storage OT: K must fit in 32 bits");
  if (n > N || n > K) throw ConfigError("bounded-storage OT: n = " + std::to_string(n) + " exceeds N or K");
  if (ell < 8) throw ConfigError("bounded-storage OT: ell must be at least 8");
  if (k == 0 || k > ell) throw ConfigError("bounded-storage OT: need 1 <= k <= ell");
}

void StorageMeter::charge(std::uint64_t bits) {
  if (used_ + bits > limit_) {
    throw ProtocolError(ProtocolError::Code::aborted, "storage bound exceeded: " + std::to_string(used_ + bits) +
                                                          " > " + std::to_string(limit_) + " bits");
  }
  used_ += bits;
  peak_ = std::max(peak_, used_);
}

Tape::Tape(std::uint64_t seed, std::uint64_t bits) : rng_(seed), bits_(bits) {}

Bytes Tape::next_chunk() {
  const std::uint64_t total = (bits_ + 7) / 8;
  const std::size_t size = static_cast<std::size_t>(std::min<std::uint64_t>(kChunkBytes, total - produced_));
  Bytes out(size);
  for (std::size_t i = 0; i < size; i += 8) {
    const std::uint64_t word = rng_();
    for (std::size_t b = 0; b < 8 && i + b < size; ++b) out[i + b] = static_cast<std::uint8_t>(word >> (8 * b));
  }
  produced_ += size;
  return out;
}

bool Tape::bit_at(std::uint64_t seed, std::uint64_t index) {
  Rng rng(seed);
  std::uint64_t word = 0;
  for (std::uint64_t w = 0; w <= index / 64; ++w) word = rng();
  return (word >> (index % 64)) & 1;
}

std::vector<std::uint32_t> random_subset(std::uint64_t universe, std::size_t size, Rng& rng) {
  if (size > universe) throw DomainError("subset larger than its universe");
  std::unordered_set<std::uint32_t> chosen;
  chosen.reserve(size * 2);
  for (std::uint64_t j = universe - size; j < universe; ++j) {
    const auto t = static_cast<std::uint32_t>(rng.uniform(j + 1));
    if (!chosen.insert(t).second) chosen.insert(static_cast<std::uint32_t>(j));
  }
  std::vector<std::uint32_t> out(chosen.begin(), chosen.end());
  std::sort(out.begin(), out.end());
  return out;
}

void absorb_chunk(StoredBits& store, std::uint64_t offset, std::span<const std::uint8_t> chunk) {
  if (store.bits.size() != store.indices.size()) store.bits.assign(store.indices.size(), 0);
  const std::uint64_t end = offset + chunk.size() * 8;
  auto it = std::lower_bound(store.indices.begin(), store.indices.end(), offset);
  for (; it != store.indices.end() && *it < end; ++it) {
    const std::uint64_t rel = *it - offset;
    store.bits[static_cast<std::size_t>(it - store.indices.begin())] = (chunk[rel / 8] >> (rel % 8)) & 1;
  }
}

Phase1 bs_phase1(const BsOtParams& params, Rng& rng) {
  params.validate();
  Phase1 out;
  out.a.indices = random_subset(params.K, params.n, rng);
  out.b.indices = random_subset(params.K, params.n, rng);
  out.tape_seed = rng.fork_seed();
  Tape tape(out.tape_seed, params.K);
  std::uint64_t offset = 0;
  for (Bytes chunk = tape.next_chunk(); !chunk.empty(); chunk = tape.next_chunk()) {
    absorb_chunk(out.a, offset, chunk);
    absorb_chunk(out.b, offset, chunk);
    offset += chunk.size() * 8;
  }
  return out;
}

std::vector<std::uint32_t> intersection_positions(std::span<const std::uint32_t> omega_a,
                                                  std::span<const std::uint32_t> omega_b) {
  std::vector<std::uint32_t> out;
  std::size_t j = 0;
  for (std::size_t p = 0; p < omega_a.size(); ++p) {
    while (j < omega_b.size() && omega_b[j] < omega_a[p]) ++j;
    if (j < omega_b.size() && omega_b[j] == omega_a[p]) out.push_back(static_cast<std::uint32_t>(p));
  }
  return out;
}

mpz_class binomial(std::uint64_t n, std::uint64_t k) {
  mpz_class out;
  if (k > n) return 0;
  mpz_bin_uiui(out.get_mpz_t(), n, k);
  return out;
}

mpz_class rank_subset(std::span<const std::uint32_t> subset) {
  mpz_class r = 0;
  for (std::size_t i = 0; i < subset.size(); ++i) {
    if (i > 0 && subset[i] <= subset[i - 1]) throw DomainError("subset must be sorted and distinct");
    r += binomial(subset[i], i + 1);
  }
  return r;
}

std::vector<std::uint32_t> unrank_subset(const mpz_class& rank, std::uint64_t n, std::uint64_t t) {
  if (rank < 0 || rank >= binomial(n, t)) throw DomainError("subset rank out of range");
  std::vector<std::uint32_t> out(t);
  mpz_class x = rank;
  std::uint64_t c = n;
  for (std::uint64_t i = t; i >= 1; --i) {
    // Largest c' < c with C(c', i) <= x, walking C(c', i) downward.
    std::uint64_t cur = c - 1;
    mpz_class b = binomial(cur, i);
    while (b > x) {
      b = b * (cur - i) / cur;
      --cur;
    }
    out[i - 1] = static_cast<std::uint32_t>(cur);
    x -= b;
    c = cur;
  }
  return out;
}

std::size_t encoding_bits(std::uint64_t n, std::uint64_t t) {
  const mpz_class top = binomial(n, t) - 1;
  return top <= 0 ? 1 : mpz_sizeinbase(top.get_mpz_t(), 2);
}

BitVec to_bits(const mpz_class& v, std::size_t width) {
  if (v < 0 || mpz_sizeinbase(v.get_mpz_t(), 2) > width) throw DomainError("value does not fit the bit width");
  BitVec out(width);
  for (std::size_t i = 0; i < width; ++i) out[i] = mpz_tstbit(v.get_mpz_t(), width - 1 - i);
  return out;
}

mpz_class from_bits(const BitVec& bits) {
  mpz_class v = 0;
  for (std::uint8_t b : bits) v = v * 2 + b;
  return v;
}

BitVec ih_constraint(std::size_t j, std::size_t width, Rng& rng) {
  if (j + 1 >= width) throw DomainError("constraint index past the last round");
  BitVec h(width, 0);
  h[j] = 1;
  for (std::size_t i = j + 1; i < width; ++i) h[i] = rng.bit();
  return h;
}

bool ih_reply(const BitVec& h, const BitVec& w) {
  if (h.size() != w.size()) throw DimensionMismatch("constraint width differs from the string");
  std::uint8_t acc = 0;
  for (std::size_t i = 0; i < h.size(); ++i) acc ^= h[i] & w[i];
  return acc != 0;
}

std::pair<BitVec, BitVec> ih_solutions(std::span<const BitVec> constraints, std::span<const std::uint8_t> replies) {
  const std::size_t rounds = constraints.size();
  const std::size_t width = rounds + 1;
  if (replies.size() != rounds) throw DimensionMismatch("one reply per constraint expected");
  for (std::size_t j = 0; j < rounds; ++j) {
    const auto& h = constraints[j];
    if (h.size() != width || h[j] != 1 || std::any_of(h.begin(), h.begin() + static_cast<std::ptrdiff_t>(j),
                                                       [](std::uint8_t b) { return b != 0; })) {
      throw DomainError("constraint " + std::to_string(j) + " is not in echelon form");
    }
  }
  BitVec sol[2];
  for (std::uint8_t free_bit = 0; free_bit < 2; ++free_bit) {
    BitVec w(width, 0);
    w[width - 1] = free_bit;
    for (std::size_t j = rounds; j-- > 0;) {
      std::uint8_t acc = replies[j] & 1;
      for (std::size_t i = j + 1; i < width; ++i) acc ^= constraints[j][i] & w[i];
      w[j] = acc;
    }
    sol[free_bit] = std::move(w);
  }
  if (sol[1] < sol[0]) std::swap(sol[0], sol[1]);
  return {std::move(sol[0]), std::move(sol[1])};
}

Bytes pack_bits(const BitVec& bits) {
  Bytes out((bits.size() + 7) / 8, 0);
  for (std::size_t i = 0; i < bits.size(); ++i) out[i / 8] |= static_cast<std::uint8_t>((bits[i] & 1) << (i % 8));
  return out;
}

BitVec unpack_bits(std::span<const std::uint8_t> packed, std::size_t width) {
  if (packed.size() != (width + 7) / 8) {
    throw DecodeError(DecodeError::Kind::malformed, "packed bit string has the wrong length");
  }
  BitVec out(width);
  for (std::size_t i = 0; i < width; ++i) out[i] = (packed[i / 8] >> (i % 8)) & 1;
  return out;
}

SetPairRun bs_setpair(const StoredBits& a, const StoredBits& b, bool choice, std::uint64_t ell, std::uint64_t t,
                      Rng& sender_rng, Rng& receiver_rng) {
  const auto inter = intersection_positions(a.indices, b.indices);
  if (inter.size() < std::max(ell, t)) {
    throw RetriableError("intersection of " + std::to_string(inter.size()) + " below the required " +
                         std::to_string(std::max(ell, t)));
  }
  const std::uint64_t n = a.indices.size();
  const std::size_t width = encoding_bits(n, t);
  const mpz_class limit = binomial(n, t);

  SetPairRun run;
  ByteWriter tr;
  for (;;) {
    const auto chosen = choose_within(inter, t, receiver_rng);
    const BitVec w = to_bits(rank_subset(chosen), width);
    std::vector<BitVec> hs;
    std::vector<std::uint8_t> replies;
    for (std::size_t j = 0; j + 1 < width; ++j) {
      hs.push_back(ih_constraint(j, width, sender_rng));
      replies.push_back(ih_reply(hs.back(), w));
      tr.u8(static_cast<std::uint8_t>(IhKind::constraint));
      tr.blob(pack_bits(hs.back()));
      tr.u8(static_cast<std::uint8_t>(IhKind::reply));
      tr.u8(replies.back());
    }
    auto sols = ih_solutions(hs, replies);
    if (!solution_valid(sols, limit)) {
      ++run.restarts;
      continue;
    }
    const bool j = w == sols.second;
    const std::uint8_t sigma = static_cast<std::uint8_t>(choice) ^ static_cast<std::uint8_t>(j);
    tr.u8(static_cast<std::uint8_t>(IhKind::swap));
    tr.u8(sigma);
    auto w0 = unrank_subset(from_bits(sols.first), n, t);
    auto w1 = unrank_subset(from_bits(sols.second), n, t);
    if (sigma) std::swap(w0, w1);
    run.pair = {std::move(w0), std::move(w1)};
    run.transcript = tr.take();
    return run;
  }
}

namespace {

// Row generation shared by extract and extractor_rows.
template <typename Visit>
void for_each_row(std::uint64_t seed, std::size_t r_bits, std::size_t out_bits, Visit&& visit) {
  Rng rng(seed);
  const std::size_t words = (r_bits + 63) / 64;
  std::vector<std::uint64_t> row(words);
  for (std::size_t o = 0; o < out_bits; ++o) {
    for (std::size_t i = 0; i < words; ++i) row[i] = rng();
    if (r_bits % 64) row[words - 1] &= (std::uint64_t{1} << (r_bits % 64)) - 1;
    visit(o, row);
  }
}

}  // namespace

Bytes extract(std::uint64_t seed, const BitVec& r, std::size_t out_bytes) {
  std::vector<std::uint64_t> packed((r.size() + 63) / 64, 0);
  for (std::size_t i = 0; i < r.size(); ++i) packed[i / 64] |= std::uint64_t{r[i] & 1u} << (i % 64);
  Bytes out(out_bytes, 0);
  for_each_row(seed, r.size(), out_bytes * 8, [&](std::size_t o, const std::vector<std::uint64_t>& row) {
    std::uint64_t acc = 0;
    for (std::size_t i = 0; i < row.size(); ++i) acc ^= row[i] & packed[i];
    out[o / 8] |= static_cast<std::uint8_t>((std::popcount(acc) & 1) << (o % 8));
  });
  return out;
}

std::vector<BitVec> extractor_rows(std::uint64_t seed, std::size_t r_bits, std::size_t out_bits) {
  std::vector<BitVec> rows;
  for_each_row(seed, r_bits, out_bits, [&](std::size_t, const std::vector<std::uint64_t>& row) {
    BitVec bits(r_bits);
    for (std::size_t i = 0; i < r_bits; ++i) bits[i] = (row[i / 64] >> (i % 64)) & 1;
    rows.push_back(std::move(bits));
  });
  return rows;
}

Bytes bs_encode(const OtMessage& m, std::uint64_t seed, const BitVec& r) {
  Bytes out = extract(seed, r, m.size());
  for (std::size_t i = 0; i < m.size(); ++i) out[i] ^= m[i];
  return out;
}

OtMessage bs_decode(const Bytes& e, std::uint64_t seed, const BitVec& r) { return bs_encode(e, seed, r); }

BitVec subset_bits(const StoredBits& store, std::span<const std::uint32_t> positions) {
  BitVec out;
  out.reserve(positions.size());
  for (std::uint32_t p : positions) {
    if (p >= store.bits.size()) throw DomainError("subset position outside the stored bits");
    out.push_back(store.bits[p]);
  }
  return out;
}

// ---------------------------------------------------------------- wire

BsOt2Sender::BsOt2Sender(Transport& transport, BsOtParams params, Rng rng)
    : transport_(transport), params_(params), rng_(rng), meter_(params.N) {
  params_.validate();
}

void BsOt2Sender::send(const OtMessage& m0, const OtMessage& m1) {
  if (m0.size() != m1.size()) throw DimensionMismatch("OT messages differ in length");
  StoredBits a;
  for (;;) {
    meter_.reset();
    a = {};
    a.indices = random_subset(params_.K, params_.n, rng_);
    a.bits.assign(a.indices.size(), 0);
    meter_.charge(params_.n);
    Tape tape(rng_.fork_seed(), params_.K);
    std::uint64_t offset = 0;
    for (Bytes chunk = tape.next_chunk(); !chunk.empty(); chunk = tape.next_chunk()) {
      absorb_chunk(a, offset, chunk);
      ByteWriter w;
      w.u64(offset);
      w.blob(chunk);
      transport_.send({FrameTag::tape_chunk, w.take()});
      offset += chunk.size() * 8;
    }
    ByteWriter w;
    w.u32(static_cast<std::uint32_t>(a.indices.size()));
    for (std::uint32_t idx : a.indices) w.u32(idx);
    transport_.send({FrameTag::omega_reveal, w.take()});

    const Frame f = transport_.expect(FrameTag::ih_round);
    ByteReader r(f.payload);
    const IhKind kind = read_ih_kind(r, IhKind::ready);
    r.expect_end();
    if (kind == IhKind::ready) break;
    ++stats_.phase1_restarts;
  }

  const std::uint64_t n = params_.n;
  const std::uint64_t t = params_.k;
  const std::size_t width = encoding_bits(n, t);
  const mpz_class limit = binomial(n, t);
  std::pair<BitVec, BitVec> sols;
  for (;;) {
    std::vector<BitVec> hs;
    std::vector<std::uint8_t> replies;
    for (std::size_t j = 0; j + 1 < width; ++j) {
      hs.push_back(ih_constraint(j, width, rng_));
      ByteWriter w;
      w.u32(static_cast<std::uint32_t>(j));
      w.blob(pack_bits(hs.back()));
      transport_.send(ih_frame(IhKind::constraint, w.take()));
      const Frame f = transport_.expect(FrameTag::ih_round);
      ByteReader r(f.payload);
      read_ih_kind(r, IhKind::reply);
      replies.push_back(r.u8() & 1);
      r.expect_end();
    }
    sols = ih_solutions(hs, replies);
    if (solution_valid(sols, limit)) break;
    ++stats_.ih_restarts;
  }
  const Frame f = transport_.expect(FrameTag::ih_round);
  ByteReader r(f.payload);
  read_ih_kind(r, IhKind::swap);
  const bool sigma = r.u8() & 1;
  r.expect_end();

  auto w0 = unrank_subset(from_bits(sols.first), n, t);
  auto w1 = unrank_subset(from_bits(sols.second), n, t);
  if (sigma) std::swap(w0, w1);
  transport_.send({FrameTag::encoded_pair, encoded_pair(m0, m1, a, {std::move(w0), std::move(w1)}, rng_)});
  ++stats_.transfers;
  stats_.peak_storage_bits = std::max(stats_.peak_storage_bits, meter_.peak());
}

BsOt2Receiver::BsOt2Receiver(Transport& transport, BsOtParams params, Rng rng)
    : transport_(transport), params_(params), rng_(rng), meter_(params.N) {
  params_.validate();
}

OtMessage BsOt2Receiver::receive(bool b) {
  std::vector<std::uint32_t> omega_a;
  std::vector<std::uint32_t> inter;
  StoredBits mine;
  for (;;) {
    meter_.reset();
    mine = {};
    mine.indices = random_subset(params_.K, params_.n, rng_);
    mine.bits.assign(mine.indices.size(), 0);
    meter_.charge(params_.n);
    std::uint64_t received = 0;
    while (received < params_.K) {
      const Frame f = transport_.expect(FrameTag::tape_chunk);
      ByteReader r(f.payload);
      const std::uint64_t offset = r.u64();
      const Bytes chunk = r.blob();
      r.expect_end();
      if (offset != received || chunk.empty()) {
        throw ProtocolError(ProtocolError::Code::malformed, "tape chunk out of sequence");
      }
      absorb_chunk(mine, offset, chunk);
      received += chunk.size() * 8;
    }
    const Frame f = transport_.expect(FrameTag::omega_reveal);
    ByteReader r(f.payload);
    omega_a.assign(r.u32(), 0);
    for (auto& idx : omega_a) idx = r.u32();
    r.expect_end();
    check_omega(omega_a, params_.n, params_.K);

    inter = intersection_positions(omega_a, mine.indices);
    if (inter.size() >= params_.ell) {
      transport_.send(ih_frame(IhKind::ready));
      break;
    }
    transport_.send(ih_frame(IhKind::restart));
    ++stats_.phase1_restarts;
  }

  // Tape bits known at each position of Omega_A that lies in the intersection.
  StoredBits known;
  known.bits.assign(omega_a.size(), 0);
  for (std::uint32_t p : inter) {
    const auto it = std::lower_bound(mine.indices.begin(), mine.indices.end(), omega_a[p]);
    known.bits[p] = mine.bits[static_cast<std::size_t>(it - mine.indices.begin())];
  }

  const std::uint64_t n = params_.n;
  const std::uint64_t t = params_.k;
  const std::size_t width = encoding_bits(n, t);
  const mpz_class limit = binomial(n, t);
  std::vector<std::uint32_t> chosen;
  for (;;) {
    chosen = choose_within(inter, t, rng_);
    const BitVec w = to_bits(rank_subset(chosen), width);
    std::vector<BitVec> hs;
    std::vector<std::uint8_t> replies;
    for (std::size_t j = 0; j + 1 < width; ++j) {
      const Frame f = transport_.expect(FrameTag::ih_round);
      ByteReader r(f.payload);
      read_ih_kind(r, IhKind::constraint);
      if (r.u32() != j) throw ProtocolError(ProtocolError::Code::malformed, "constraint out of order");
      BitVec h = unpack_bits(r.blob(), width);
      r.expect_end();
      if (h[j] != 1 || std::any_of(h.begin(), h.begin() + static_cast<std::ptrdiff_t>(j),
                                   [](std::uint8_t x) { return x != 0; })) {
        throw ProtocolError(ProtocolError::Code::malformed, "constraint not in echelon form");
      }
      replies.push_back(ih_reply(h, w));
      hs.push_back(std::move(h));
      transport_.send(ih_frame(IhKind::reply, Bytes{replies.back()}));
    }
    const auto sols = ih_solutions(hs, replies);
    if (!solution_valid(sols, limit)) {
      ++stats_.ih_restarts;
      continue;
    }
    const bool j = w == sols.second;
    transport_.send(ih_frame(IhKind::swap, Bytes{static_cast<std::uint8_t>(b ^ j)}));
    break;
  }

  const Frame f = transport_.expect(FrameTag::encoded_pair);
  ByteReader r(f.payload);
  const std::uint64_t seed0 = r.u64();
  const Bytes e0 = r.blob();
  const std::uint64_t seed1 = r.u64();
  const Bytes e1 = r.blob();
  r.expect_end();
  if (e0.size() != e1.size()) throw ProtocolError(ProtocolError::Code::malformed, "encoded pair lengths differ");
  ++stats_.transfers;
  stats_.peak_storage_bits = std::max(stats_.peak_storage_bits, meter_.peak());
  const BitVec key = subset_bits(known, chosen);
  return b ? bs_decode(e1, seed1, key) : bs_decode(e0, seed0, key);
}

std::map<std::string, mpq_class> ih_sender_view_distribution(std::span<const std::uint32_t> omega_a, std::uint64_t K,
                                                             std::uint64_t t, std::span<const BitVec> constraints,
                                                             bool b) {
  if (K > 24) throw ConfigError("exhaustive view distribution needs K <= 24");
  const std::uint64_t n = omega_a.size();
  const std::size_t width = encoding_bits(n, t);
  const mpz_class limit = binomial(n, t);
  std::map<std::string, mpq_class> dist;
  std::vector<std::uint32_t> chosen;

  for (std::uint32_t mask = 0; mask < (std::uint32_t{1} << K); ++mask) {
    if (static_cast<std::uint64_t>(std::popcount(mask)) != n) continue;
    std::vector<std::uint32_t> omega_b;
    for (std::uint32_t i = 0; i < K; ++i) {
      if (mask >> i & 1) omega_b.push_back(i);
    }
    const auto inter = intersection_positions(omega_a, omega_b);
    if (inter.size() < t) {
      dist["restart"] += 1;
      continue;
    }
    const mpq_class weight(1, binomial(inter.size(), t));
    // Every t-subset of the intersection, each equally likely.
    auto visit = [&](auto&& self, std::size_t from) -> void {
      if (chosen.size() == t) {
        const BitVec w = to_bits(rank_subset(chosen), width);
        std::string key;
        for (const auto& h : constraints) key.push_back(ih_reply(h, w) ? '1' : '0');
        std::vector<std::uint8_t> replies(key.begin(), key.end());
        for (auto& r : replies) r = r == '1';
        const auto sols = ih_solutions(constraints, replies);
        const bool valid = from_bits(sols.first) < limit && from_bits(sols.second) < limit;
        key.push_back(valid ? ((b ^ (w == sols.second)) ? 'S' : 's') : 'R');
        dist[key] += weight;
        return;
      }
      for (std::size_t i = from; i < inter.size(); ++i) {
        chosen.push_back(inter[i]);
        self(self, i + 1);
        chosen.pop_back();
      }
    };
    visit(visit, 0);
  }
  for (auto& [_, p] : dist) p.canonicalize();
  return dist;
}

}  // namespace infocommit
