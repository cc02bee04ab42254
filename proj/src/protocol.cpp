#include "infocommit/protocol.hpp"

#include <cmath>

#include "infocommit/bs_ot.hpp"
#include "infocommit/errors.hpp"

namespace infocommit {

namespace {

void check_square(const Matrix& m, std::size_t s, const char* what) {
  if (m.rows() != s || m.cols() != s) {
    throw DimensionMismatch(std::string(what) + " must be " + std::to_string(s) + "x" + std::to_string(s));
  }
}

std::vector<Fe> draw_distinct(std::span<const Fe> pool, std::size_t count, Rng& rng) {
  std::vector<Fe> items(pool.begin(), pool.end());
  for (std::size_t i = 0; i < count; ++i) std::swap(items[i], items[i + rng.uniform(items.size() - i)]);
  items.resize(count);
  return items;
}

}  // namespace

std::uint64_t exact_sqrt(std::uint64_t d) {
  auto s = static_cast<std::uint64_t>(std::sqrt(static_cast<long double>(d)));
  while (s * s > d) --s;
  while ((s + 1) * (s + 1) <= d) ++s;
  return s * s == d ? s : 0;
}

std::vector<Fe> derive_prohibited_set(const Field& field, std::uint64_t s, std::uint64_t r, Fe xi) {
  if (!field.contains(xi)) throw ConfigError("xi = " + std::to_string(xi.v) + " is not in " + field.describe());
  const std::uint64_t need = r * (s - 1);
  const std::uint64_t available = field.order() - 1 - xi.v;
  if (available < need) {
    std::string msg = "prohibited set needs r(s-1) = " + std::to_string(need) + " elements above xi = " +
                      std::to_string(xi.v) + ", but " + field.describe() + " has only " + std::to_string(available) +
                      " (short by " + std::to_string(need - available) + ")";
    if (const auto q = suggest_prime_modulus(s, xi.v + need + 1); q != 0) {
      msg += "; a field such as GF(" + std::to_string(q) + ") satisfies both the size and gcd(s, q-1) = 1";
    }
    throw ConfigError(msg);
  }
  std::vector<Fe> out;
  for (std::uint64_t v = xi.v + 1; out.size() < need; ++v) out.push_back(Fe{v});
  return out;
}

ProtocolConfig ProtocolConfig::make(const Field& field, std::uint64_t d, std::uint64_t r, std::uint64_t c, Fe xi,
                                    std::uint64_t query_soft_cap) {
  ProtocolConfig cfg{field, d, exact_sqrt(d), r, c, xi, {}, query_soft_cap};
  if (cfg.s < 2) throw ConfigError("d = " + std::to_string(d) + " must be a perfect square s^2 with s >= 2");
  const FieldReport report = validate_spec(field, cfg.s);
  if (!report.ok) {
    std::string msg = "field rejected:";
    for (const auto& v : report.violations) msg += " " + v + ";";
    throw ConfigError(msg);
  }
  if (r < 2) throw ConfigError("r must be at least 2, got " + std::to_string(r));
  if (c < 1) throw ConfigError("c must be at least 1");
  cfg.S = derive_prohibited_set(field, cfg.s, r, xi);
  if (c > cfg.S.size()) {
    throw ConfigError("c = " + std::to_string(c) + " exceeds |S| = " + std::to_string(cfg.S.size()));
  }
  return cfg;
}

void ProtocolConfig::validate() const {
  const ProtocolConfig fresh = make(field, d, r, c, xi, query_soft_cap);
  if (fresh.s != s || fresh.S != S) throw ConfigError("derived parameters do not match the stored ones");
}

bool operator==(const ProtocolConfig& a, const ProtocolConfig& b) {
  return a.field == b.field && a.d == b.d && a.s == b.s && a.r == b.r && a.c == b.c && a.xi == b.xi &&
         a.S == b.S && a.query_soft_cap == b.query_soft_cap;
}

VerifierKey keygen_verifier(const ProtocolConfig& config, Rng& rng) {
  if (config.c > config.S.size()) throw ConfigError("c exceeds the prohibited set size");
  VerifierKey kv;
  kv.lambdas = draw_distinct(config.S, config.c, rng);
  kv.thetas = draw_distinct(config.S, config.c, rng);
  return kv;
}

ProverKey keygen_prover(const Polynomial& f, const ProtocolConfig& config, Rng& rng) {
  if (f.coeffs.size() != config.d) {
    throw DimensionMismatch("polynomial has " + std::to_string(f.coeffs.size()) + " coefficients, d = " +
                            std::to_string(config.d));
  }
  if (!(f.field == config.field)) throw FieldMismatch();
  return ProverKey{Matrix::random(config.field, config.s, config.s, rng)};
}

Matrix lambda_matrix(const ProtocolConfig& config, const VerifierKey& kv) {
  return structured_matrix(config.field, kv.lambdas, config.s, StructureKind::high_vandermonde).matrix;
}

Matrix theta_matrix(const ProtocolConfig& config, const VerifierKey& kv) {
  return structured_matrix(config.field, kv.thetas, config.s, StructureKind::low_vandermonde).matrix;
}

VerificationKey expected_verification_key(const Matrix& a, const VerifierKey& kv, const ProverKey& kp,
                                          const ProtocolConfig& config) {
  return {matmul(lambda_matrix(config, kv), add(a, kp.B)), matmul(kp.B, transpose(theta_matrix(config, kv)))};
}

S2pcSpec gamma_spec(const ProtocolConfig& config) { return eta1_spec(config.field, config.S, config.s); }
S2pcSpec omega_spec(const ProtocolConfig& config) { return eta2_spec(config.field, config.S, config.s); }

namespace {

Frame begin_frame(std::uint8_t spec_id, std::uint32_t session) {
  ByteWriter w;
  w.u8(spec_id);
  w.u32(session);
  return {FrameTag::s2pc_begin, w.take()};
}

void expect_begin(Transport& transport, std::uint8_t spec_id, std::uint32_t session) {
  const Frame f = transport.expect(FrameTag::s2pc_begin);
  ByteReader r(f.payload);
  const std::uint8_t got_id = r.u8();
  const std::uint32_t got_session = r.u32();
  r.expect_end();
  if (got_id != spec_id || got_session != session) {
    throw ProtocolError(ProtocolError::Code::order_violation,
                        "secure computation " + std::to_string(got_session) + " (function " +
                            std::to_string(got_id) + ") arrived where " + std::to_string(session) + " (function " +
                            std::to_string(spec_id) + ") was expected");
  }
}

}  // namespace

void commit_prover(Transport& transport, const Matrix& a, const ProverKey& kp, const ProtocolConfig& config,
                   Ot2Sender& ot, Rng& rng) {
  check_square(a, config.s, "A");
  check_square(kp.B, config.s, "B");
  const Matrix h = add(a, kp.B);
  const S2pcSpec g = gamma_spec(config);
  const S2pcSpec o = omega_spec(config);
  std::uint32_t session = 0;
  for (std::uint64_t i = 0; i < config.c; ++i) {
    transport.send(begin_frame(kEta1Id, session++));
    s2pc_send(g, h, ot, rng);
  }
  for (std::uint64_t j = 0; j < config.c; ++j) {
    transport.send(begin_frame(kEta2Id, session++));
    s2pc_send(o, kp.B, ot, rng);
  }
  transport.expect(FrameTag::commit_done);
}

VerificationKey commit_verifier(Transport& transport, const VerifierKey& kv, const ProtocolConfig& config,
                                Ot2Receiver& ot) {
  if (kv.lambdas.size() != config.c || kv.thetas.size() != config.c) {
    throw DimensionMismatch("verifier key does not hold c points per half");
  }
  const S2pcSpec g = gamma_spec(config);
  const S2pcSpec o = omega_spec(config);
  VerificationKey vk{Matrix(config.field, config.c, config.s), Matrix(config.field, config.s, config.c)};
  std::uint32_t session = 0;
  for (std::uint64_t i = 0; i < config.c; ++i) {
    expect_begin(transport, kEta1Id, session++);
    const auto row = s2pc_receive(g, kv.lambdas[i], ot);
    std::copy(row.begin(), row.end(), vk.gamma.row(i).begin());
  }
  for (std::uint64_t j = 0; j < config.c; ++j) {
    expect_begin(transport, kEta2Id, session++);
    const auto col = s2pc_receive(o, kv.thetas[j], ot);
    for (std::uint64_t k = 0; k < config.s; ++k) vk.omega.at(k, j) = col[k];
  }
  transport.send({FrameTag::commit_done, {}});
  return vk;
}

VerificationKey commit(const Matrix& a, const VerifierKey& kv, const ProverKey& kp, const ProtocolConfig& config,
                       OtBackend backend, Rng& rng) {
  if (backend == OtBackend::ideal) {
    IdealOtHub hub;
    return run_pair(
        [&](Transport& t) {
          IdealOt2Sender sender(hub);
          commit_prover(t, a, kp, config, sender, rng);
        },
        [&](Transport& t) {
          IdealOt2Receiver receiver(hub);
          return commit_verifier(t, kv, config, receiver);
        });
  }
  const BsOtParams params = BsOtParams::desk_default();
  Rng sender_rng(rng.fork_seed());
  Rng receiver_rng(rng.fork_seed());
  return run_pair(
      [&](Transport& t) {
        BsOt2Sender sender(t, params, sender_rng);
        commit_prover(t, a, kp, config, sender, rng);
      },
      [&](Transport& t) {
        BsOt2Receiver receiver(t, params, receiver_rng);
        return commit_verifier(t, kv, config, receiver);
      });
}

EvalResponse eval_with_sum(Fe x, const Matrix& h, const Matrix& b, const ProtocolConfig& config) {
  if (x.v > config.xi.v) {
    throw ProtocolError(ProtocolError::Code::refusal, "query " + std::to_string(x.v) + " exceeds xi = " +
                                                          std::to_string(config.xi.v));
  }
  if (!config.field.contains(x)) throw DomainError("query is not a field element");
  check_square(h, config.s, "A + B");
  check_square(b, config.s, "B");
  EvalResponse out;
  out.v = matvec(h, power_row(config.field, x, config.s, PowerDirection::low).entries);
  out.u = vecmat(power_row(config.field, x, config.s, PowerDirection::high).entries, b);
  return out;
}

EvalResponse eval(Fe x, const Matrix& a, const Matrix& b, const ProtocolConfig& config) {
  check_square(a, config.s, "A");
  return eval_with_sum(x, add(a, b), b, config);
}

Verdict verify_with(Fe x, const EvalResponse& response, const VerificationKey& vk, const Matrix& lambda,
                    const Matrix& theta, const ProtocolConfig& config) {
  const std::uint64_t s = config.s;
  if (response.v.size() != s || response.u.size() != s) {
    return {false, "dimension mismatch: response vectors have lengths " + std::to_string(response.v.size()) +
                       " and " + std::to_string(response.u.size()) + ", expected " + std::to_string(s)};
  }
  if (vk.gamma.rows() != lambda.rows() || vk.gamma.cols() != s || vk.omega.rows() != s ||
      vk.omega.cols() != theta.rows()) {
    return {false, "dimension mismatch between verification key and verifier key"};
  }
  for (Fe e : response.v)
    if (!config.field.contains(e)) return {false, "response element out of range"};
  for (Fe e : response.u)
    if (!config.field.contains(e)) return {false, "response element out of range"};

  const auto low = power_row(config.field, x, s, PowerDirection::low).entries;
  const auto high = power_row(config.field, x, s, PowerDirection::high).entries;
  if (matvec(vk.gamma, low) != matvec(lambda, response.v)) return {false, "first parity check failed"};
  if (vecmat(high, vk.omega) != matvec(theta, response.u)) return {false, "second parity check failed"};
  return {true, {}};
}

Verdict verify(Fe x, const EvalResponse& response, const VerificationKey& vk, const VerifierKey& kv,
               const ProtocolConfig& config) {
  return verify_with(x, response, vk, lambda_matrix(config, kv), theta_matrix(config, kv), config);
}

Fe recover(Fe x, const EvalResponse& response, const ProtocolConfig& config) {
  const auto low = power_row(config.field, x, config.s, PowerDirection::low).entries;
  const auto high = power_row(config.field, x, config.s, PowerDirection::high).entries;
  return config.field.sub(dot(config.field, high, response.v), dot(config.field, response.u, low));
}

Prover::Prover(ProtocolConfig config, Polynomial f, ProverKey key)
    : config_(std::move(config)),
      f_(std::move(f)),
      key_(std::move(key)),
      a_(to_matrix(f_, config_.s)),
      h_(add(a_, key_.B)) {}

EvalResponse Prover::answer(Fe x) {
  EvalResponse out = eval_with_sum(x, h_, key_.B, config_);
  ++answered_;
  if (!seen_.insert(x.v).second) ++duplicates_;
  return out;
}

Verifier::Verifier(ProtocolConfig config, VerifierKey key, VerificationKey vk)
    : config_(std::move(config)),
      key_(std::move(key)),
      vk_(std::move(vk)),
      lambda_(lambda_matrix(config_, key_)),
      theta_(theta_matrix(config_, key_)) {}

QueryOutcome Verifier::check(Fe x, const EvalResponse& response) {
  QueryOutcome out;
  out.x = x;
  out.duplicate = !seen_.insert(x.v).second;
  ++queries_;
  if (config_.query_soft_cap != 0 && queries_ == config_.query_soft_cap + 1) {
    warnings_.push_back("query count exceeds the soft cap of " + std::to_string(config_.query_soft_cap) +
                        "; leakage grows with the square of the number of queries");
  }
  const Verdict v = verify_with(x, response, vk_, lambda_, theta_, config_);
  out.accepted = v.accept;
  out.diagnostic = v.diagnostic;
  if (v.accept) out.value = recover(x, response, config_);
  return out;
}

}  // namespace infocommit
