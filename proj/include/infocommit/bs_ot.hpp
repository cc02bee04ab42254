#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <map>
#include <string>
#include <span>
#include <utility>
#include <vector>

#include "infocommit/ot.hpp"
#include "infocommit/rng.hpp"
#include "infocommit/transport.hpp"

namespace infocommit {

struct BsOtParams {
  std::uint64_t N = 0;  // storage bound, bits
  std::uint64_t K = 0;  // broadcast length, bits
  double alpha = 0;
  std::uint64_t ell = 0;  // target intersection size
  std::uint64_t n = 0;    // bits stored per party
  std::uint64_t k = 0;    // subset size for interactive hashing

  // K = floor(alpha * N) + 1, n = ceil(sqrt(2 * ell * N)).
  static BsOtParams make(std::uint64_t N, double alpha, std::uint64_t ell, std::uint64_t k);
  static BsOtParams desk_default() { return make(std::uint64_t{1} << 16, 2.0, 64, 40); }
  // Throws ConfigError.
  void validate() const;
};

// ceil(sqrt(v)) without floating-point rounding.
std::uint64_t ceil_sqrt(std::uint64_t v);

// Byte counter for the bits a party keeps; exceeding the limit throws.
class StorageMeter {
 public:
  explicit StorageMeter(std::uint64_t limit_bits) : limit_(limit_bits) {}
  void charge(std::uint64_t bits);
  void reset() { used_ = 0; }
  std::uint64_t used() const { return used_; }
  std::uint64_t peak() const { return peak_; }
  std::uint64_t limit() const { return limit_; }

 private:
  std::uint64_t limit_;
  std::uint64_t used_ = 0;
  std::uint64_t peak_ = 0;
};

// Deterministic broadcast string of K bits produced chunk by chunk.
class Tape {
 public:
  static constexpr std::size_t kChunkBytes = std::size_t{64} << 10;

  Tape(std::uint64_t seed, std::uint64_t bits);
  std::uint64_t bits() const { return bits_; }
  // Next chunk, empty once the tape is exhausted.
  Bytes next_chunk();
  // Bit at absolute index of the full tape (regenerates; for checks only).
  static bool bit_at(std::uint64_t seed, std::uint64_t index);

 private:
  Rng rng_;
  std::uint64_t bits_;
  std::uint64_t produced_ = 0;  // bytes
};

// Uniform sorted size-subset of [0, universe) (Floyd's algorithm).
std::vector<std::uint32_t> random_subset(std::uint64_t universe, std::size_t size, Rng& rng);

struct StoredBits {
  std::vector<std::uint32_t> indices;  // sorted tape positions
  std::vector<std::uint8_t> bits;      // tape value at each position
};

// Collects the tape bits at `store.indices` from one chunk starting at bit `offset`.
void absorb_chunk(StoredBits& store, std::uint64_t offset, std::span<const std::uint8_t> chunk);

struct Phase1 {
  std::uint64_t tape_seed = 0;
  StoredBits a;
  StoredBits b;
};

// Both parties' view after the broadcast, computed in memory by streaming.
Phase1 bs_phase1(const BsOtParams& params, Rng& rng);

// Positions p in [0, n) with a.indices[p] in b.indices.
std::vector<std::uint32_t> intersection_positions(std::span<const std::uint32_t> omega_a,
                                                  std::span<const std::uint32_t> omega_b);

mpz_class binomial(std::uint64_t n, std::uint64_t k);
// Colexicographic rank of a sorted t-subset of [0, n).
mpz_class rank_subset(std::span<const std::uint32_t> subset);
std::vector<std::uint32_t> unrank_subset(const mpz_class& rank, std::uint64_t n, std::uint64_t t);

// Bit strings for interactive hashing, one 0/1 byte per bit, index 0 most significant.
using BitVec = std::vector<std::uint8_t>;

// Bits needed for every rank below C(n, t).
std::size_t encoding_bits(std::uint64_t n, std::uint64_t t);
BitVec to_bits(const mpz_class& v, std::size_t width);
mpz_class from_bits(const BitVec& bits);

// Round j constraint: zero before j, one at j, random after.
BitVec ih_constraint(std::size_t j, std::size_t width, Rng& rng);
bool ih_reply(const BitVec& h, const BitVec& w);
// The two strings satisfying all width-1 constraints, ascending.
std::pair<BitVec, BitVec> ih_solutions(std::span<const BitVec> constraints, std::span<const std::uint8_t> replies);

// Exact distribution of the sender's interactive-hashing view (the replies
// and the swap bit, or a restart) for choice bit b, over every receiver
// storage set of size |omega_a| in [0, K) and every t-subset of the
// intersection. The sender's storage set and constraints are fixed. Keys are
// opaque view encodings. ConfigError for K > 24.
std::map<std::string, mpq_class> ih_sender_view_distribution(std::span<const std::uint32_t> omega_a, std::uint64_t K,
                                                             std::uint64_t t, std::span<const BitVec> constraints,
                                                             bool b);

Bytes pack_bits(const BitVec& bits);
BitVec unpack_bits(std::span<const std::uint8_t> packed, std::size_t width);

// Subsets are positions into Omega_A.
struct SetPair {
  std::vector<std::uint32_t> x0;
  std::vector<std::uint32_t> x1;
};

struct SetPairRun {
  SetPair pair;
  Bytes transcript;  // sender-visible messages from the receiver, plus constraints
  std::size_t restarts = 0;
};

// In-memory interactive hashing between the holder of `a` and the holder of
// `b` who wants X_choice inside the intersection. Throws RetriableError when
// the intersection is smaller than ell.
SetPairRun bs_setpair(const StoredBits& a, const StoredBits& b, bool choice, std::uint64_t ell, std::uint64_t t,
                      Rng& sender_rng, Rng& receiver_rng);

// Parity extractor: output bit o is <row_o, r>, rows drawn from the seed.
Bytes extract(std::uint64_t seed, const BitVec& r, std::size_t out_bytes);
// Output bit rows as 0/1 vectors, for analysis.
std::vector<BitVec> extractor_rows(std::uint64_t seed, std::size_t r_bits, std::size_t out_bits);

Bytes bs_encode(const OtMessage& m, std::uint64_t seed, const BitVec& r);
OtMessage bs_decode(const Bytes& e, std::uint64_t seed, const BitVec& r);

// Tape bits at the given positions of Omega_A.
BitVec subset_bits(const StoredBits& store, std::span<const std::uint32_t> positions);

struct BsOtStats {
  std::size_t transfers = 0;
  std::size_t phase1_restarts = 0;
  std::size_t ih_restarts = 0;
  std::uint64_t peak_storage_bits = 0;
};

class BsOt2Sender : public Ot2Sender {
 public:
  BsOt2Sender(Transport& transport, BsOtParams params, Rng rng);
  void send(const OtMessage& m0, const OtMessage& m1) override;
  const BsOtStats& stats() const { return stats_; }

 private:
  Transport& transport_;
  BsOtParams params_;
  Rng rng_;
  StorageMeter meter_;
  BsOtStats stats_;
};

class BsOt2Receiver : public Ot2Receiver {
 public:
  BsOt2Receiver(Transport& transport, BsOtParams params, Rng rng);
  OtMessage receive(bool b) override;
  const BsOtStats& stats() const { return stats_; }

 private:
  Transport& transport_;
  BsOtParams params_;
  Rng rng_;
  StorageMeter meter_;
  BsOtStats stats_;
};

}  // namespace infocommit
