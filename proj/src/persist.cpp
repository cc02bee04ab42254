#include "infocommit/persist.hpp"

#include <fstream>

#include "infocommit/errors.hpp"
#include "infocommit/session.hpp"

namespace infocommit {

namespace {

void write_header(ByteWriter& w, RecordType type) {
  w.u16(kStateFormatVersion);
  w.u8(static_cast<std::uint8_t>(type));
}

void read_header(ByteReader& r, RecordType type) {
  const auto version = r.u16();
  if (version != kStateFormatVersion) {
    throw DecodeError(DecodeError::Kind::version, "unsupported record version " + std::to_string(version));
  }
  const auto got = r.u8();
  if (got != static_cast<std::uint8_t>(type)) {
    throw DecodeError(DecodeError::Kind::malformed, "record type " + std::to_string(got) + ", expected " +
                                                        std::to_string(static_cast<int>(type)));
  }
}

void write_vk(ByteWriter& w, const VerificationKey& vk) {
  write_matrix(w, vk.gamma);
  write_matrix(w, vk.omega);
}

VerificationKey read_vk(const Field& field, ByteReader& r) {
  Matrix gamma = read_matrix(field, r);
  Matrix omega = read_matrix(field, r);
  return {std::move(gamma), std::move(omega)};
}

void write_kv(ByteWriter& w, const Field& field, const VerifierKey& kv) {
  w.fes(field, kv.lambdas);
  w.fes(field, kv.thetas);
}

VerifierKey read_kv(const Field& field, ByteReader& r) {
  VerifierKey kv;
  kv.lambdas = r.fes(field);
  kv.thetas = r.fes(field);
  return kv;
}

void write_config(ByteWriter& w, const ProtocolConfig& config) { w.blob(encode_config(config)); }

ProtocolConfig read_config(ByteReader& r) {
  const Bytes raw = r.blob();
  ByteReader inner(raw);
  ProtocolConfig config = decode_config(inner);
  inner.expect_end();
  return config;
}

void check_state(const ProtocolConfig& config, const VerifierKey& kv, const VerificationKey& vk) {
  if (kv.lambdas.size() != config.c || kv.thetas.size() != config.c || vk.gamma.rows() != config.c ||
      vk.gamma.cols() != config.s || vk.omega.rows() != config.s || vk.omega.cols() != config.c) {
    throw DecodeError(DecodeError::Kind::malformed, "verifier state dimensions do not match the configuration");
  }
}

template <typename T, typename Read>
T decode_record(std::span<const std::uint8_t> data, RecordType type, Read&& read) {
  ByteReader r(data);
  read_header(r, type);
  T out = read(r);
  r.expect_end();
  return out;
}

}  // namespace

void write_matrix(ByteWriter& w, const Matrix& m) {
  w.u32(static_cast<std::uint32_t>(m.rows()));
  w.u32(static_cast<std::uint32_t>(m.cols()));
  for (Fe e : m.data()) w.fe(m.field(), e);
}

Matrix read_matrix(const Field& field, ByteReader& r) {
  const std::uint32_t rows = r.u32();
  const std::uint32_t cols = r.u32();
  const std::uint64_t count = std::uint64_t{rows} * cols;
  if (count * field.element_width() > r.remaining()) {
    throw DecodeError(DecodeError::Kind::truncated, "matrix dimensions exceed the remaining input");
  }
  std::vector<Fe> data(count);
  for (auto& e : data) e = r.fe(field);
  return Matrix(field, rows, cols, std::move(data));
}

Bytes serialize(const Field&, const VerificationKey& vk) {
  ByteWriter w;
  write_header(w, RecordType::verification_key);
  write_vk(w, vk);
  return w.take();
}

Bytes serialize(const Field& field, const VerifierKey& kv) {
  ByteWriter w;
  write_header(w, RecordType::verifier_key);
  write_kv(w, field, kv);
  return w.take();
}

Bytes serialize(const Field&, const ProverKey& kp) {
  ByteWriter w;
  write_header(w, RecordType::prover_key);
  write_matrix(w, kp.B);
  return w.take();
}

Bytes serialize(const Field& field, const EvalResponse& response) {
  ByteWriter w;
  write_header(w, RecordType::eval_response);
  w.raw(encode_response(field, response));
  return w.take();
}

VerificationKey deserialize_verification_key(const Field& field, std::span<const std::uint8_t> data) {
  return decode_record<VerificationKey>(data, RecordType::verification_key,
                                        [&](ByteReader& r) { return read_vk(field, r); });
}

VerifierKey deserialize_verifier_key(const Field& field, std::span<const std::uint8_t> data) {
  return decode_record<VerifierKey>(data, RecordType::verifier_key, [&](ByteReader& r) { return read_kv(field, r); });
}

ProverKey deserialize_prover_key(const Field& field, std::span<const std::uint8_t> data) {
  return decode_record<ProverKey>(data, RecordType::prover_key,
                                  [&](ByteReader& r) { return ProverKey{read_matrix(field, r)}; });
}

EvalResponse deserialize_eval_response(const Field& field, std::span<const std::uint8_t> data) {
  return decode_record<EvalResponse>(data, RecordType::eval_response,
                                     [&](ByteReader& r) { return decode_response(field, r); });
}

Bytes serialize(const ProverState& state) {
  ByteWriter w;
  write_header(w, RecordType::prover_state);
  write_config(w, state.config);
  write_matrix(w, state.key.B);
  w.fes(state.config.field, state.f.coeffs);
  w.u64(state.m);
  return w.take();
}

Bytes serialize(const VerifierState& state) {
  ByteWriter w;
  write_header(w, RecordType::verifier_state);
  write_config(w, state.config);
  write_kv(w, state.config.field, state.key);
  write_vk(w, state.vk);
  w.u64(state.m);
  return w.take();
}

ProverState deserialize_prover_state(std::span<const std::uint8_t> data) {
  return decode_record<ProverState>(data, RecordType::prover_state, [](ByteReader& r) {
    ProtocolConfig config = read_config(r);
    Matrix b = read_matrix(config.field, r);
    std::vector<Fe> coeffs = r.fes(config.field);
    const std::uint64_t m = r.u64();
    if (b.rows() != config.s || b.cols() != config.s || coeffs.size() != config.d) {
      throw DecodeError(DecodeError::Kind::malformed, "prover state dimensions do not match the configuration");
    }
    Polynomial f{config.field, std::move(coeffs)};
    return ProverState{std::move(config), ProverKey{std::move(b)}, std::move(f), m};
  });
}

VerifierState deserialize_verifier_state(std::span<const std::uint8_t> data) {
  return decode_record<VerifierState>(data, RecordType::verifier_state, [](ByteReader& r) {
    ProtocolConfig config = read_config(r);
    VerifierKey kv = read_kv(config.field, r);
    VerificationKey vk = read_vk(config.field, r);
    const std::uint64_t m = r.u64();
    check_state(config, kv, vk);
    return VerifierState{std::move(config), std::move(kv), std::move(vk), m};
  });
}

Bytes read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  return Bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

void write_file(const std::string& path, std::span<const std::uint8_t> data) {
  std::ofstream out(path, std::ios::binary);
  out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
  if (!out) throw Error("cannot write " + path);
}

nlohmann::json config_to_json(const ConfigFile& file) {
  const ProtocolConfig& c = file.config;
  nlohmann::json field;
  if (c.field.kind() == Field::Kind::prime) {
    field = {{"kind", "prime"}, {"modulus", c.field.order()}};
  } else {
    field = {{"kind", "table"},
             {"order", c.field.order()},
             {"add", c.field.add_table()},
             {"mul", c.field.mul_table()}};
  }
  nlohmann::json S = nlohmann::json::array();
  for (Fe e : c.S) S.push_back(e.v);
  nlohmann::json j = {{"version", kConfigFormatVersion},
                      {"field", field},
                      {"d", c.d},
                      {"r", c.r},
                      {"c", c.c},
                      {"xi", c.xi.v},
                      {"seed", file.seed},
                      {"S", S}};
  if (c.query_soft_cap != 0) j["query_soft_cap"] = c.query_soft_cap;
  return j;
}

ConfigFile config_from_json(const nlohmann::json& j) {
  try {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    const auto version = j.at("version").get<std::uint32_t>();
    if (version != kConfigFormatVersion) throw ConfigError("unsupported config version " + std::to_string(version));
    const auto& fj = j.at("field");
    const auto kind = fj.at("kind").get<std::string>();
    std::optional<Field> field;
    if (kind == "prime") {
      field = Field::prime(fj.at("modulus").get<std::uint64_t>());
    } else if (kind == "table") {
      field = Field::table(fj.at("order").get<std::size_t>(), fj.at("add").get<std::vector<std::uint8_t>>(),
                           fj.at("mul").get<std::vector<std::uint8_t>>());
    } else {
      throw ConfigError("unknown field kind '" + kind + "'");
    }
    const auto xi = j.at("xi").get<std::uint64_t>();
    if (xi >= field->order()) throw ConfigError("xi = " + std::to_string(xi) + " is not in " + field->describe());
    ConfigFile out{ProtocolConfig::make(*field, j.at("d").get<std::uint64_t>(), j.at("r").get<std::uint64_t>(),
                                        j.at("c").get<std::uint64_t>(), Fe{xi},
                                        j.value("query_soft_cap", std::uint64_t{0})),
                   j.value("seed", std::uint64_t{0})};
    if (j.contains("S")) {
      std::vector<Fe> listed;
      for (auto v : j.at("S").get<std::vector<std::uint64_t>>()) listed.push_back(Fe{v});
      if (listed != out.config.S) throw ConfigError("listed prohibited set does not match the derived one");
    }
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config JSON: ") + e.what());
  }
}

ConfigFile load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path);
  try {
    return config_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config " + path + ": " + e.what());
  }
}

void save_config(const std::string& path, const ConfigFile& file) {
  std::ofstream out(path);
  out << config_to_json(file).dump(2) << '\n';
  if (!out) throw Error("cannot write " + path);
}

}  // namespace infocommit
