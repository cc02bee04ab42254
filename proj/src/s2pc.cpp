#include "infocommit/s2pc.hpp"

#include <algorithm>

#include "infocommit/errors.hpp"

namespace infocommit {

std::size_t S2pcSpec::index_of(Fe x) const {
  const auto it = std::lower_bound(domain.begin(), domain.end(), x, [](Fe a, Fe b) { return a.v < b.v; });
  if (it == domain.end() || *it != x) {
    throw DomainError("input " + std::to_string(x.v) + " is not in the agreed domain");
  }
  return static_cast<std::size_t>(it - domain.begin());
}

S2pcSpec make_s2pc_spec(std::uint8_t id, Field field, std::vector<Fe> domain, S2pcEvaluator evaluator,
                        std::size_t output_length) {
  for (Fe x : domain) field.element(x.v);
  std::sort(domain.begin(), domain.end(), [](Fe a, Fe b) { return a.v < b.v; });
  if (domain.size() < 2) throw ConfigError("secure computation domain needs at least two elements");
  if (std::adjacent_find(domain.begin(), domain.end()) != domain.end()) {
    throw ConfigError("secure computation domain has duplicate elements");
  }
  return S2pcSpec{id, std::move(field), std::move(domain), std::move(evaluator), output_length};
}

std::vector<Fe> eta1(Fe a, const Matrix& m) {
  return vecmat(power_row(m.field(), a, m.rows(), PowerDirection::high).entries, m);
}

std::vector<Fe> eta2(Fe a, const Matrix& m) {
  return matvec(m, power_row(m.field(), a, m.cols(), PowerDirection::low).entries);
}

S2pcSpec eta1_spec(const Field& field, std::vector<Fe> domain, std::size_t s) {
  return make_s2pc_spec(kEta1Id, field, std::move(domain), eta1, s);
}

S2pcSpec eta2_spec(const Field& field, std::vector<Fe> domain, std::size_t s) {
  return make_s2pc_spec(kEta2Id, field, std::move(domain), eta2, s);
}

std::vector<OtMessage> build_value_table(const S2pcSpec& spec, const Matrix& y) {
  if (!(y.field() == spec.field)) throw FieldMismatch();
  const MessageGroup group = spec.group();
  std::vector<OtMessage> table;
  table.reserve(spec.domain.size());
  for (Fe zeta : spec.domain) table.push_back(group.encode(spec.evaluator(zeta, y)));
  return table;
}

void s2pc_send(const S2pcSpec& spec, const Matrix& y, Ot2Sender& backend, Rng& rng) {
  const auto table = build_value_table(spec, y);
  ot_c_of_1_send(spec.group(), table, backend, rng);
}

std::vector<Fe> s2pc_receive(const S2pcSpec& spec, Fe x, Ot2Receiver& backend) {
  const std::size_t j = spec.index_of(x);
  const MessageGroup group = spec.group();
  return group.decode(ot_c_of_1_receive(group, j, spec.domain.size(), backend));
}

std::vector<Fe> s2pc_run(Fe x, const Matrix& y, const S2pcSpec& spec, OtBackend backend, Rng& rng) {
  const std::size_t j = spec.index_of(x);
  const auto table = build_value_table(spec, y);
  return spec.group().decode(ot_c_of_1(spec.group(), table, j, backend, rng));
}

}  // namespace infocommit
