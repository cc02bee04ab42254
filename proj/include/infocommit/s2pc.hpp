#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "infocommit/ot.hpp"
#include "infocommit/polymat.hpp"

namespace infocommit {

// f(zeta, y) for the sender's private matrix y.
using S2pcEvaluator = std::function<std::vector<Fe>(Fe zeta, const Matrix& y)>;

struct S2pcSpec {
  std::uint8_t id = 0;
  Field field;
  std::vector<Fe> domain;  // ascending canonical order, at least two entries
  S2pcEvaluator evaluator;
  std::size_t output_length = 0;  // field elements per output

  MessageGroup group() const { return MessageGroup(field, output_length); }
  // Index of x in the domain; DomainError if absent.
  std::size_t index_of(Fe x) const;
};

// Sorts the domain and checks it; ConfigError on duplicates or |domain| < 2.
S2pcSpec make_s2pc_spec(std::uint8_t id, Field field, std::vector<Fe> domain, S2pcEvaluator evaluator,
                        std::size_t output_length);

// eta1(a, M) = high(a) * M,  eta2(a, M) = M * low(a)^T.
std::vector<Fe> eta1(Fe a, const Matrix& m);
std::vector<Fe> eta2(Fe a, const Matrix& m);

constexpr std::uint8_t kEta1Id = 1;
constexpr std::uint8_t kEta2Id = 2;
S2pcSpec eta1_spec(const Field& field, std::vector<Fe> domain, std::size_t s);
S2pcSpec eta2_spec(const Field& field, std::vector<Fe> domain, std::size_t s);

std::vector<OtMessage> build_value_table(const S2pcSpec& spec, const Matrix& y);

void s2pc_send(const S2pcSpec& spec, const Matrix& y, Ot2Sender& backend, Rng& rng);
std::vector<Fe> s2pc_receive(const S2pcSpec& spec, Fe x, Ot2Receiver& backend);

// Both roles in process.
std::vector<Fe> s2pc_run(Fe x, const Matrix& y, const S2pcSpec& spec, OtBackend backend, Rng& rng);

}  // namespace infocommit
