#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "infocommit/rng.hpp"

namespace infocommit {

// Canonical representative of a field element: an integer in [0, q).
// Raw values carry no field identity; use FieldElement for checked arithmetic.
struct Fe {
  std::uint64_t v = 0;
  friend constexpr bool operator==(Fe a, Fe b) = default;
  friend constexpr auto operator<=>(Fe a, Fe b) = default;
};

// Field operation counts, per thread. Used to instrument the evaluation
// phase (prover and verifier work per round).
struct OpCount {
  std::uint64_t add = 0;
  std::uint64_t mul = 0;
  std::uint64_t total() const { return add + mul; }
};

namespace detail {
inline thread_local OpCount tl_ops;
}

inline OpCount op_count() { return detail::tl_ops; }
inline void reset_op_count() { detail::tl_ops = {}; }

struct FieldTables;

// The finite field F_q. Two backends: prime modulus p < 2^62 with 64-bit
// arithmetic, and explicit addition/multiplication tables for q <= 256
// (prime powers such as GF(4)). Cheap to copy; immutable.
class Field {
 public:
  enum class Kind { prime, table };

  static constexpr std::uint64_t kMaxPrime = std::uint64_t{1} << 62;
  static constexpr std::size_t kMaxTableOrder = 256;

  // Throws ConfigError unless p is an odd prime below 2^62.
  static Field prime(std::uint64_t p);
  // Throws ConfigError unless the tables define a field with 0 and 1 encoded
  // as 0 and 1. Tables are row-major q*q.
  static Field table(std::size_t q, std::vector<std::uint8_t> add, std::vector<std::uint8_t> mul);
  // GF(2^k), 1 <= k <= 8, with elements encoded as coefficient bit vectors.
  static Field binary_extension(unsigned k);
  static Field gf4() { return binary_extension(2); }

  Kind kind() const { return kind_; }
  std::uint64_t order() const { return order_; }
  std::uint64_t characteristic() const;
  // Serialized width of one element: 8 bytes (prime) or 1 byte (table).
  std::size_t element_width() const { return kind_ == Kind::prime ? 8 : 1; }
  // Row-major tables; empty for the prime kind.
  const std::vector<std::uint8_t>& add_table() const;
  const std::vector<std::uint8_t>& mul_table() const;

  std::string describe() const;

  bool contains(Fe a) const { return a.v < order_; }
  // Throws DomainError when value >= q.
  Fe element(std::uint64_t value) const;
  Fe zero() const { return Fe{0}; }
  Fe one() const { return Fe{1}; }

  Fe add(Fe a, Fe b) const {
    ++detail::tl_ops.add;
    if (kind_ == Kind::prime) {
      std::uint64_t r = a.v + b.v;
      return Fe{r >= order_ ? r - order_ : r};
    }
    return Fe{add_[a.v * order_ + b.v]};
  }
  Fe neg(Fe a) const {
    if (kind_ == Kind::prime) return Fe{a.v == 0 ? 0 : order_ - a.v};
    return Fe{neg_[a.v]};
  }
  Fe sub(Fe a, Fe b) const { return add(a, neg(b)); }
  Fe mul(Fe a, Fe b) const {
    ++detail::tl_ops.mul;
    if (kind_ == Kind::prime) {
      return Fe{static_cast<std::uint64_t>(static_cast<unsigned __int128>(a.v) * b.v % order_)};
    }
    return Fe{mul_[a.v * order_ + b.v]};
  }
  // a*b + c
  Fe mul_add(Fe a, Fe b, Fe c) const { return add(mul(a, b), c); }

  // a^e with 0^0 = 1.
  Fe pow(Fe a, std::uint64_t e) const;
  // Throws DomainError for a = 0.
  Fe inv(Fe a) const;

  Fe sample(Rng& rng) const { return Fe{rng.uniform(order_)}; }
  Fe sample_nonzero(Rng& rng) const { return Fe{1 + rng.uniform(order_ - 1)}; }

  friend bool operator==(const Field& a, const Field& b);

 private:
  Field() = default;

  Kind kind_ = Kind::prime;
  std::uint64_t order_ = 0;
  std::shared_ptr<const FieldTables> tables_;
  // Raw views into *tables_ for the hot path.
  const std::uint8_t* add_ = nullptr;
  const std::uint8_t* mul_ = nullptr;
  const std::uint8_t* neg_ = nullptr;
  const std::uint8_t* inv_ = nullptr;
};

// A field element bound to its field; arithmetic checks that both operands
// come from the same field.
class FieldElement {
 public:
  FieldElement(Field field, Fe value);
  FieldElement(Field field, std::uint64_t value) : FieldElement(std::move(field), Fe{value}) {}

  const Field& field() const { return field_; }
  Fe raw() const { return value_; }
  std::uint64_t value() const { return value_.v; }

  FieldElement operator+(const FieldElement& o) const;
  FieldElement operator-(const FieldElement& o) const;
  FieldElement operator*(const FieldElement& o) const;
  FieldElement operator-() const { return {field_, field_.neg(value_)}; }

  // e >= 0: power (0^0 = 1); e = -1: multiplicative inverse.
  FieldElement pow(std::int64_t e) const;
  FieldElement inv() const { return pow(-1); }

  bool operator==(const FieldElement& o) const;

 private:
  void check_same(const FieldElement& o) const;

  Field field_;
  Fe value_;
};

enum class FieldOp { add, sub, mul, neg };

// Single entry point for the four ring operations; b is ignored for neg.
FieldElement arith(const FieldElement& a, const FieldElement& b, FieldOp op);

// Total order by canonical integer representative. Throws FieldMismatch.
std::strong_ordering compare(const FieldElement& a, const FieldElement& b);

struct FieldReport {
  bool ok = true;
  std::vector<std::string> violations;
};

// ok iff gcd(s, q-1) = 1 (x -> x^s is then a permutation of F_q) and, for
// table fields, the tables satisfy the field axioms.
FieldReport validate_spec(const Field& field, std::uint64_t s);

// Exhaustive field-axiom check on explicit tables; empty result means ok.
std::vector<std::string> check_field_axioms(std::size_t q, const std::vector<std::uint8_t>& add,
                                            const std::vector<std::uint8_t>& mul);

// Deterministic Miller-Rabin, exact for n < 2^64.
bool is_prime(std::uint64_t n);

// Smallest prime p >= lower_bound with gcd(s, p-1) = 1, or 0 if none exists
// below 2^62 (every odd prime has even p-1, so even s has no solution).
std::uint64_t suggest_prime_modulus(std::uint64_t s, std::uint64_t lower_bound);

}  // namespace infocommit
