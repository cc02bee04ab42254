#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "infocommit/bs_ot.hpp"
#include "infocommit/errors.hpp"
#include "infocommit/protocol.hpp"

namespace infocommit {

// How the 1-of-2 transfers of the commitment run. The ideal backend needs a
// hub shared by both roles, so it only works in process.
struct OtChannel {
  OtBackend backend = OtBackend::ideal;
  IdealOtHub* hub = nullptr;
  BsOtParams bs = BsOtParams::desk_default();
};

// ABORT payload codes.
enum class AbortCode : std::uint8_t {
  done = 0,
  order_violation = 1,
  refusal = 2,
  malformed = 3,
  aborted = 4,
  config_mismatch = 5,
};

Bytes encode_config(const ProtocolConfig& config);
ProtocolConfig decode_config(ByteReader& r);

Bytes encode_response(const Field& field, const EvalResponse& response);
EvalResponse decode_response(const Field& field, ByteReader& r);

struct ProverSessionResult {
  std::uint64_t answered = 0;
  std::uint64_t refused = 0;
  std::uint64_t duplicates = 0;
};

// Serves one verifier: negotiation, commitment, then answers queries until
// the verifier closes the session.
ProverSessionResult run_prover(Transport& transport, Prover& prover, const OtChannel& ot, Rng& ot_rng);

enum class Tamper { none, v, u };

struct VerifierOptions {
  OtChannel ot;
  // Perturbs every received response before checking (fault injection).
  Tamper tamper = Tamper::none;
};

struct VerifierSessionResult {
  VerificationKey vk;
  std::vector<QueryOutcome> queries;
  std::vector<std::string> warnings;

  bool all_accepted() const;
};

// Negotiation and commitment only.
VerificationKey verifier_open(Transport& transport, const ProtocolConfig& config, const VerifierKey& kv,
                              const OtChannel& ot, Rng& ot_rng);
// One EVAL_REQ / EVAL_RESP / VERDICT round.
QueryOutcome verifier_query(Transport& transport, Verifier& verifier, Fe x, Tamper tamper = Tamper::none);
void verifier_close(Transport& transport);

VerifierSessionResult run_verifier(Transport& transport, const ProtocolConfig& config, const VerifierKey& kv,
                                   std::span<const Fe> queries, const VerifierOptions& options, Rng& ot_rng);

struct InProcessRun {
  VerifierSessionResult verifier;
  ProverSessionResult prover;
  Transcript prover_transcript;
  Transcript verifier_transcript;
  std::vector<bool> verifier_outgoing;
};

// Both roles on two threads over an in-process channel, each recording its
// own transcript. OT randomness comes from the "prover-ot" and "verifier-ot"
// substreams of ot_seed.
InProcessRun run_in_process(const ProtocolConfig& config, const Polynomial& f, const ProverKey& kp,
                            const VerifierKey& kv, std::span<const Fe> queries, OtBackend backend,
                            Tamper tamper, std::uint64_t ot_seed);

// Sends ABORT with a code derived from the error, ignoring transport failures.
void send_abort(Transport& transport, AbortCode code, const std::string& reason);
AbortCode abort_code_for(const ProtocolError& e);

}  // namespace infocommit
