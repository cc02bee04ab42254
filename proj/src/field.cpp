#include "infocommit/field.hpp"

#include <array>
#include <numeric>
#include <sstream>

#include "infocommit/errors.hpp"

namespace infocommit {

struct FieldTables {
  std::vector<std::uint8_t> add;
  std::vector<std::uint8_t> mul;
  std::vector<std::uint8_t> neg;
  std::vector<std::uint8_t> inv;
};

namespace {

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

std::uint64_t powmod(std::uint64_t a, std::uint64_t e, std::uint64_t m) {
  std::uint64_t r = 1 % m;
  a %= m;
  while (e != 0) {
    if (e & 1) r = mulmod(r, a, m);
    a = mulmod(a, a, m);
    e >>= 1;
  }
  return r;
}

// Carry-less multiply of GF(2)[x] residues modulo an irreducible polynomial.
std::uint8_t gf2k_mul(unsigned a, unsigned b, unsigned k, unsigned modulus) {
  unsigned r = 0;
  for (unsigned i = 0; i < k; ++i) {
    if ((b >> i) & 1U) r ^= a << i;
  }
  for (int bit = static_cast<int>(2 * k) - 2; bit >= static_cast<int>(k); --bit) {
    if ((r >> bit) & 1U) r ^= modulus << (bit - k);
  }
  return static_cast<std::uint8_t>(r);
}

}  // namespace

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  static constexpr std::array<std::uint64_t, 12> kWitnesses = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
  for (auto p : kWitnesses) {
    if (n % p == 0) return n == p;
  }
  std::uint64_t d = n - 1;
  unsigned r = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++r;
  }
  for (auto a : kWitnesses) {
    std::uint64_t x = powmod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (unsigned i = 1; i < r; ++i) {
      x = mulmod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

std::uint64_t suggest_prime_modulus(std::uint64_t s, std::uint64_t lower_bound) {
  if (s % 2 == 0 && s > 1) return 0;
  for (std::uint64_t p = std::max<std::uint64_t>(lower_bound, 3); p < Field::kMaxPrime; ++p) {
    if (is_prime(p) && std::gcd(s, p - 1) == 1) return p;
  }
  return 0;
}

std::vector<std::string> check_field_axioms(std::size_t q, const std::vector<std::uint8_t>& add,
                                            const std::vector<std::uint8_t>& mul) {
  std::vector<std::string> bad;
  if (q < 2 || q > Field::kMaxTableOrder) {
    bad.push_back("table order must lie in [2, 256]");
    return bad;
  }
  if (add.size() != q * q || mul.size() != q * q) {
    bad.push_back("tables must have q*q entries");
    return bad;
  }
  auto A = [&](std::size_t a, std::size_t b) -> std::size_t { return add[a * q + b]; };
  auto M = [&](std::size_t a, std::size_t b) -> std::size_t { return mul[a * q + b]; };
  for (std::size_t i = 0; i < q * q; ++i) {
    if (add[i] >= q || mul[i] >= q) {
      bad.push_back("table entry out of range");
      return bad;
    }
  }
  bool comm = true, ident = true, add_inv = true, mul_inv = true, assoc = true, distrib = true;
  for (std::size_t a = 0; a < q; ++a) {
    if (A(a, 0) != a || M(a, 1) != a || M(a, 0) != 0) ident = false;
    bool has_neg = false, has_inv = (a == 0);
    for (std::size_t b = 0; b < q; ++b) {
      if (A(a, b) != A(b, a) || M(a, b) != M(b, a)) comm = false;
      if (A(a, b) == 0) has_neg = true;
      if (a != 0 && M(a, b) == 1) has_inv = true;
    }
    add_inv = add_inv && has_neg;
    mul_inv = mul_inv && has_inv;
  }
  for (std::size_t a = 0; a < q && assoc && distrib; ++a) {
    for (std::size_t b = 0; b < q && assoc && distrib; ++b) {
      for (std::size_t c = 0; c < q; ++c) {
        if (A(A(a, b), c) != A(a, A(b, c)) || M(M(a, b), c) != M(a, M(b, c))) assoc = false;
        if (M(a, A(b, c)) != A(M(a, b), M(a, c))) distrib = false;
      }
    }
  }
  if (!ident) bad.push_back("0 and 1 are not the additive and multiplicative identities");
  if (!comm) bad.push_back("operations are not commutative");
  if (!assoc) bad.push_back("operations are not associative");
  if (!distrib) bad.push_back("multiplication does not distribute over addition");
  if (!add_inv) bad.push_back("some element has no additive inverse");
  if (!mul_inv) bad.push_back("some nonzero element has no multiplicative inverse");
  return bad;
}

Field Field::prime(std::uint64_t p) {
  if (p < 3 || p >= kMaxPrime || !is_prime(p)) {
    throw ConfigError("modulus " + std::to_string(p) + " is not an odd prime below 2^62");
  }
  Field f;
  f.kind_ = Kind::prime;
  f.order_ = p;
  return f;
}

Field Field::table(std::size_t q, std::vector<std::uint8_t> add, std::vector<std::uint8_t> mul) {
  auto bad = check_field_axioms(q, add, mul);
  if (!bad.empty()) throw ConfigError("tables do not define a field: " + bad.front());
  auto t = std::make_shared<FieldTables>();
  t->add = std::move(add);
  t->mul = std::move(mul);
  t->neg.resize(q);
  t->inv.resize(q, 0);
  for (std::size_t a = 0; a < q; ++a) {
    for (std::size_t b = 0; b < q; ++b) {
      if (t->add[a * q + b] == 0) t->neg[a] = static_cast<std::uint8_t>(b);
      if (a != 0 && t->mul[a * q + b] == 1) t->inv[a] = static_cast<std::uint8_t>(b);
    }
  }
  Field f;
  f.kind_ = Kind::table;
  f.order_ = q;
  f.add_ = t->add.data();
  f.mul_ = t->mul.data();
  f.neg_ = t->neg.data();
  f.inv_ = t->inv.data();
  f.tables_ = std::move(t);
  return f;
}

Field Field::binary_extension(unsigned k) {
  // Irreducible polynomials over GF(2), indexed by degree.
  static constexpr std::array<unsigned, 9> kModulus = {0, 0b11, 0b111, 0b1011, 0b10011,
                                                       0b100101, 0b1000011, 0b10000011, 0x11B};
  if (k < 1 || k > 8) throw ConfigError("GF(2^k) supported for 1 <= k <= 8");
  const std::size_t q = std::size_t{1} << k;
  std::vector<std::uint8_t> add(q * q), mul(q * q);
  for (unsigned a = 0; a < q; ++a) {
    for (unsigned b = 0; b < q; ++b) {
      add[a * q + b] = static_cast<std::uint8_t>(a ^ b);
      mul[a * q + b] = gf2k_mul(a, b, k, kModulus[k]);
    }
  }
  return table(q, std::move(add), std::move(mul));
}

std::uint64_t Field::characteristic() const {
  if (kind_ == Kind::prime) return order_;
  std::uint64_t n = 1;
  Fe acc = one();
  while (acc.v != 0) {
    acc = Fe{add_[acc.v * order_ + 1]};
    ++n;
  }
  return n;
}

const std::vector<std::uint8_t>& Field::add_table() const {
  static const std::vector<std::uint8_t> kEmpty;
  return tables_ ? tables_->add : kEmpty;
}

const std::vector<std::uint8_t>& Field::mul_table() const {
  static const std::vector<std::uint8_t> kEmpty;
  return tables_ ? tables_->mul : kEmpty;
}

std::string Field::describe() const {
  std::ostringstream os;
  if (kind_ == Kind::prime) {
    os << "GF(" << order_ << ")";
  } else {
    os << "GF(" << order_ << ", table)";
  }
  return os.str();
}

Fe Field::element(std::uint64_t value) const {
  if (value >= order_) {
    throw DomainError("value " + std::to_string(value) + " is not a canonical element of " + describe());
  }
  return Fe{value};
}

Fe Field::pow(Fe a, std::uint64_t e) const {
  Fe result = one();
  Fe base = a;
  while (e != 0) {
    if (e & 1) result = mul(result, base);
    e >>= 1;
    if (e != 0) base = mul(base, base);
  }
  return result;
}

Fe Field::inv(Fe a) const {
  if (a.v == 0) throw DomainError("inverse of zero");
  if (kind_ == Kind::table) return Fe{inv_[a.v]};
  return pow(a, order_ - 2);
}

bool operator==(const Field& a, const Field& b) {
  if (a.kind_ != b.kind_ || a.order_ != b.order_) return false;
  if (a.kind_ == Field::Kind::prime || a.tables_ == b.tables_) return true;
  return a.tables_->add == b.tables_->add && a.tables_->mul == b.tables_->mul;
}

FieldElement::FieldElement(Field field, Fe value) : field_(std::move(field)), value_(field_.element(value.v)) {}

void FieldElement::check_same(const FieldElement& o) const {
  if (!(field_ == o.field_)) throw FieldMismatch();
}

FieldElement FieldElement::operator+(const FieldElement& o) const {
  check_same(o);
  return {field_, field_.add(value_, o.value_)};
}

FieldElement FieldElement::operator-(const FieldElement& o) const {
  check_same(o);
  return {field_, field_.sub(value_, o.value_)};
}

FieldElement FieldElement::operator*(const FieldElement& o) const {
  check_same(o);
  return {field_, field_.mul(value_, o.value_)};
}

FieldElement FieldElement::pow(std::int64_t e) const {
  if (e == -1) return {field_, field_.inv(value_)};
  if (e < 0) throw DomainError("exponent must be >= 0 or exactly -1");
  return {field_, field_.pow(value_, static_cast<std::uint64_t>(e))};
}

bool FieldElement::operator==(const FieldElement& o) const {
  return field_ == o.field_ && value_ == o.value_;
}

FieldElement arith(const FieldElement& a, const FieldElement& b, FieldOp op) {
  switch (op) {
    case FieldOp::add:
      return a + b;
    case FieldOp::sub:
      return a - b;
    case FieldOp::mul:
      return a * b;
    case FieldOp::neg:
      if (!(a.field() == b.field())) throw FieldMismatch();
      return -a;
  }
  throw DomainError("unknown field operation");
}

std::strong_ordering compare(const FieldElement& a, const FieldElement& b) {
  if (!(a.field() == b.field())) throw FieldMismatch();
  return a.value() <=> b.value();
}

FieldReport validate_spec(const Field& field, std::uint64_t s) {
  FieldReport report;
  if (s < 1) {
    report.ok = false;
    report.violations.push_back("s must be at least 1");
    return report;
  }
  const std::uint64_t g = std::gcd(s, field.order() - 1);
  if (g != 1) {
    report.ok = false;
    report.violations.push_back("gcd(" + std::to_string(s) + ", " + std::to_string(field.order() - 1) +
                                ") = " + std::to_string(g) + " != 1: x -> x^s is not a permutation of " +
                                field.describe());
  }
  if (field.kind() == Field::Kind::table) {
    for (auto& v : check_field_axioms(field.order(), field.add_table(), field.mul_table())) {
      report.ok = false;
      report.violations.push_back(v);
    }
  }
  return report;
}

}  // namespace infocommit
