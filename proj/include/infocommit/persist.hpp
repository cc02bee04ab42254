#pragma once

#include <cstdint>
#include <span>
#include <string>

#include <json.hpp>

#include "infocommit/bytes.hpp"
#include "infocommit/protocol.hpp"

namespace infocommit {

// Every binary record starts with this version and a record-type byte.
constexpr std::uint16_t kStateFormatVersion = 1;
constexpr std::uint32_t kConfigFormatVersion = 1;

enum class RecordType : std::uint8_t {
  verification_key = 1,
  verifier_key = 2,
  prover_key = 3,
  eval_response = 4,
  prover_state = 5,
  verifier_state = 6,
};

void write_matrix(ByteWriter& w, const Matrix& m);
Matrix read_matrix(const Field& field, ByteReader& r);

Bytes serialize(const Field& field, const VerificationKey& vk);
Bytes serialize(const Field& field, const VerifierKey& kv);
Bytes serialize(const Field& field, const ProverKey& kp);
Bytes serialize(const Field& field, const EvalResponse& response);

VerificationKey deserialize_verification_key(const Field& field, std::span<const std::uint8_t> data);
VerifierKey deserialize_verifier_key(const Field& field, std::span<const std::uint8_t> data);
ProverKey deserialize_prover_key(const Field& field, std::span<const std::uint8_t> data);
EvalResponse deserialize_eval_response(const Field& field, std::span<const std::uint8_t> data);

struct ProverState {
  ProtocolConfig config;
  ProverKey key;
  Polynomial f;
  std::uint64_t m = 0;  // queries answered so far
};

struct VerifierState {
  ProtocolConfig config;
  VerifierKey key;
  VerificationKey vk;
  std::uint64_t m = 0;  // queries checked so far
};

Bytes serialize(const ProverState& state);
Bytes serialize(const VerifierState& state);
ProverState deserialize_prover_state(std::span<const std::uint8_t> data);
VerifierState deserialize_verifier_state(std::span<const std::uint8_t> data);

Bytes read_file(const std::string& path);
void write_file(const std::string& path, std::span<const std::uint8_t> data);

struct ConfigFile {
  ProtocolConfig config;
  std::uint64_t seed = 0;
};

nlohmann::json config_to_json(const ConfigFile& file);
// ConfigError for anything that does not describe a valid configuration.
ConfigFile config_from_json(const nlohmann::json& j);
ConfigFile load_config(const std::string& path);
void save_config(const std::string& path, const ConfigFile& file);

}  // namespace infocommit
