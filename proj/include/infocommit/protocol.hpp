#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "infocommit/ot.hpp"
#include "infocommit/polymat.hpp"
#include "infocommit/s2pc.hpp"
#include "infocommit/transport.hpp"

namespace infocommit {

struct ProtocolConfig {
  Field field;
  std::uint64_t d = 0;
  std::uint64_t s = 0;
  std::uint64_t r = 0;
  std::uint64_t c = 0;
  Fe xi{0};
  std::vector<Fe> S;
  // Warn once the verifier has asked more than this many queries; 0 = no cap.
  std::uint64_t query_soft_cap = 0;

  // Derives s and S and validates everything; throws ConfigError.
  static ProtocolConfig make(const Field& field, std::uint64_t d, std::uint64_t r, std::uint64_t c, Fe xi,
                             std::uint64_t query_soft_cap = 0);
  void validate() const;

  friend bool operator==(const ProtocolConfig& a, const ProtocolConfig& b);
};

// The r(s-1) smallest elements strictly above xi. ConfigError when the field
// has too few, with a suggested modulus.
std::vector<Fe> derive_prohibited_set(const Field& field, std::uint64_t s, std::uint64_t r, Fe xi);

// Exact integer square root, or 0 when d is not a perfect square.
std::uint64_t exact_sqrt(std::uint64_t d);

struct VerifierKey {
  std::vector<Fe> lambdas;
  std::vector<Fe> thetas;
  friend bool operator==(const VerifierKey&, const VerifierKey&) = default;
};

struct ProverKey {
  Matrix B;
  friend bool operator==(const ProverKey& a, const ProverKey& b) { return a.B == b.B; }
};

struct VerificationKey {
  Matrix gamma;  // c x s, Lambda (A + B)
  Matrix omega;  // s x c, B Theta^T
  friend bool operator==(const VerificationKey& a, const VerificationKey& b) {
    return a.gamma == b.gamma && a.omega == b.omega;
  }
};

struct EvalResponse {
  std::vector<Fe> v;  // (A + B) low(x)^T
  std::vector<Fe> u;  // high(x) B
  friend bool operator==(const EvalResponse&, const EvalResponse&) = default;
};

VerifierKey keygen_verifier(const ProtocolConfig& config, Rng& rng);
ProverKey keygen_prover(const Polynomial& f, const ProtocolConfig& config, Rng& rng);

// Lambda: high-power rows of the lambdas; Theta: low-power rows of the thetas.
Matrix lambda_matrix(const ProtocolConfig& config, const VerifierKey& kv);
Matrix theta_matrix(const ProtocolConfig& config, const VerifierKey& kv);

// Verification key computed directly from the secrets; the reference the
// two-party commitment must reproduce.
VerificationKey expected_verification_key(const Matrix& a, const VerifierKey& kv, const ProverKey& kp,
                                          const ProtocolConfig& config);

S2pcSpec gamma_spec(const ProtocolConfig& config);
S2pcSpec omega_spec(const ProtocolConfig& config);

// Commitment halves over a transport: 2c secure computations, c of eta1 on
// A + B at the lambdas, then c of eta2 on B at the thetas.
void commit_prover(Transport& transport, const Matrix& a, const ProverKey& kp, const ProtocolConfig& config,
                   Ot2Sender& ot, Rng& rng);
VerificationKey commit_verifier(Transport& transport, const VerifierKey& kv, const ProtocolConfig& config,
                                Ot2Receiver& ot);

// Both halves in process.
VerificationKey commit(const Matrix& a, const VerifierKey& kv, const ProverKey& kp, const ProtocolConfig& config,
                       OtBackend backend, Rng& rng);

// ProtocolError(refusal) when x > xi.
EvalResponse eval(Fe x, const Matrix& a, const Matrix& b, const ProtocolConfig& config);
// Same with h = A + B precomputed.
EvalResponse eval_with_sum(Fe x, const Matrix& h, const Matrix& b, const ProtocolConfig& config);

struct Verdict {
  bool accept = false;
  std::string diagnostic;
};

Verdict verify(Fe x, const EvalResponse& response, const VerificationKey& vk, const VerifierKey& kv,
               const ProtocolConfig& config);
// Same with Lambda and Theta precomputed.
Verdict verify_with(Fe x, const EvalResponse& response, const VerificationKey& vk, const Matrix& lambda,
                    const Matrix& theta, const ProtocolConfig& config);

Fe recover(Fe x, const EvalResponse& response, const ProtocolConfig& config);

// Prover state for the evaluation phase.
class Prover {
 public:
  Prover(ProtocolConfig config, Polynomial f, ProverKey key);

  const ProtocolConfig& config() const { return config_; }
  const Polynomial& polynomial() const { return f_; }
  const Matrix& a() const { return a_; }
  const ProverKey& key() const { return key_; }

  // Refuses x > xi. Repeated points are answered and counted.
  EvalResponse answer(Fe x);
  std::uint64_t answered() const { return answered_; }
  std::uint64_t duplicates() const { return duplicates_; }

 private:
  ProtocolConfig config_;
  Polynomial f_;
  ProverKey key_;
  Matrix a_;
  Matrix h_;
  std::unordered_set<std::uint64_t> seen_;
  std::uint64_t answered_ = 0;
  std::uint64_t duplicates_ = 0;
};

struct QueryOutcome {
  Fe x{0};
  bool refused = false;
  bool accepted = false;
  bool duplicate = false;
  std::optional<Fe> value;
  std::string diagnostic;
};

// Verifier state for the evaluation phase.
class Verifier {
 public:
  Verifier(ProtocolConfig config, VerifierKey key, VerificationKey vk);

  const ProtocolConfig& config() const { return config_; }
  const VerifierKey& key() const { return key_; }
  const VerificationKey& vk() const { return vk_; }
  std::uint64_t queries() const { return queries_; }

  // Verifies and, on accept, recovers f(x).
  QueryOutcome check(Fe x, const EvalResponse& response);
  // Warnings produced so far (soft query cap).
  const std::vector<std::string>& warnings() const { return warnings_; }
  void set_query_count(std::uint64_t m) { queries_ = m; }

 private:
  ProtocolConfig config_;
  VerifierKey key_;
  VerificationKey vk_;
  Matrix lambda_;
  Matrix theta_;
  std::unordered_set<std::uint64_t> seen_;
  std::uint64_t queries_ = 0;
  std::vector<std::string> warnings_;
};

}  // namespace infocommit
