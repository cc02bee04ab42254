#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "infocommit/audit.hpp"
#include "infocommit/errors.hpp"
#include "infocommit/persist.hpp"
#include "infocommit/session.hpp"

using namespace infocommit;

namespace {

enum Exit : int { ok = 0, config_error = 2, transport_error = 3, protocol_error = 4, rejected = 5 };

std::string join(std::span<const Fe> xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? " " : "") + std::to_string(xs[i].v);
  return out;
}

Field field_for_order(std::uint64_t q) {
  if (q >= 2 && (q & (q - 1)) == 0 && q <= 256) {
    unsigned k = 0;
    while ((std::uint64_t{1} << k) < q) ++k;
    return Field::binary_extension(k);
  }
  return Field::prime(q);
}

std::vector<Fe> parse_queries(const Field& field, const std::vector<std::uint64_t>& raw) {
  std::vector<Fe> xs;
  for (auto x : raw) xs.push_back(field.element(x));
  return xs;
}

OtBackend parse_backend(const std::string& name) {
  if (name == "ideal") return OtBackend::ideal;
  if (name == "bounded-storage") return OtBackend::bounded_storage;
  throw ConfigError("unknown OT backend '" + name + "'");
}

Tamper parse_tamper(const std::string& name) {
  if (name == "none") return Tamper::none;
  if (name == "v") return Tamper::v;
  if (name == "u") return Tamper::u;
  throw ConfigError("unknown tamper mode '" + name + "'");
}

struct Secrets {
  Polynomial f;
  ProverKey kp;
  VerifierKey kv;
};

Secrets derive_secrets(const ProtocolConfig& config, std::uint64_t seed) {
  Rng poly = Rng::derive(seed, "polynomial");
  Rng prover = Rng::derive(seed, "prover");
  Rng verifier = Rng::derive(seed, "verifier");
  Polynomial f = Polynomial::random(config.field, config.d, poly);
  ProverKey kp = keygen_prover(f, config, prover);
  return Secrets{std::move(f), std::move(kp), keygen_verifier(config, verifier)};
}

int report_queries(const std::vector<QueryOutcome>& outcomes, const std::vector<std::string>& warnings) {
  int code = Exit::ok;
  for (const auto& q : outcomes) {
    std::cout << "x=" << q.x.v << ": ";
    if (q.refused) {
      std::cout << "refused by prover\n";
    } else if (q.accepted) {
      std::cout << "accepted f(x)=" << q.value->v << (q.duplicate ? " (repeated point)" : "") << "\n";
    } else {
      std::cout << "rejected (" << q.diagnostic << ")\n";
      code = Exit::rejected;
    }
  }
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
  return code;
}

std::string state_path(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Information-theoretic polynomial commitment: prover, verifier, audits and benchmarks"};
  app.require_subcommand(1);

  // gen-config
  auto* gen = app.add_subcommand("gen-config", "Write a validated JSON configuration");
  std::uint64_t q = 11, d = 9, r = 2, c = 1, xi = 6, seed = 1, cap = 0;
  std::string out_path;
  gen->add_option("--q", q, "Field order: an odd prime or a power of two up to 256")->capture_default_str();
  gen->add_option("--d", d, "Degree bound, an odd perfect square")->capture_default_str();
  gen->add_option("--r", r, "Prohibited set multiplier")->capture_default_str();
  gen->add_option("--c", c, "Number of key points")->capture_default_str();
  gen->add_option("--xi", xi, "Largest legal query point")->capture_default_str();
  gen->add_option("--seed", seed, "Master seed")->capture_default_str();
  gen->add_option("--query-cap", cap, "Warn after this many queries (0 = never)");
  gen->add_option("-o,--out", out_path, "Output file (default stdout)");

  // commit
  auto* commit_cmd = app.add_subcommand("commit", "Run the commitment phase and persist both roles' state");
  std::string config_path, state_dir = ".", backend_name = "ideal";
  commit_cmd->add_option("--config", config_path, "Configuration JSON")->required();
  commit_cmd->add_option("--state", state_dir, "State directory")->capture_default_str();
  commit_cmd->add_option("--backend", backend_name, "OT backend: ideal | bounded-storage")->capture_default_str();

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "Prover: answer one evaluation query from persisted state");
  std::uint64_t x_raw = 0;
  std::string response_path;
  eval_cmd->add_option("--state", state_dir, "State directory")->capture_default_str();
  eval_cmd->add_option("--x", x_raw, "Query point")->required();
  eval_cmd->add_option("--response", response_path, "Response file (default <state>/response.bin)");

  // verify
  auto* verify_cmd = app.add_subcommand("verify", "Verifier: check a response and recover f(x)");
  verify_cmd->add_option("--state", state_dir, "State directory")->capture_default_str();
  verify_cmd->add_option("--x", x_raw, "Query point")->required();
  verify_cmd->add_option("--response", response_path, "Response file (default <state>/response.bin)");

  // run-demo / run-role
  std::vector<std::uint64_t> queries_raw{0, 1, 2};
  std::string tamper_name = "none", transcript_dir, role = "both", transport_name = "in-process",
              address = "127.0.0.1:7411";
  std::optional<std::uint64_t> seed_override;
  auto* demo = app.add_subcommand("run-demo", "Both roles in one process over an in-process channel");
  demo->add_option("--config", config_path, "Configuration JSON")->required();
  demo->add_option("--queries", queries_raw, "Query points")->delimiter(',')->capture_default_str();
  demo->add_option("--backend", backend_name, "OT backend: ideal | bounded-storage")->capture_default_str();
  demo->add_option("--tamper", tamper_name, "Verifier-side fault injection: none | v | u")->capture_default_str();
  demo->add_option("--transcripts", transcript_dir, "Write prover/verifier transcripts to this directory");
  demo->add_option("--seed", seed_override, "Override the configuration seed");

  auto* role_cmd = app.add_subcommand("run-role", "Run one role (or both in process) and write its transcript");
  role_cmd->add_option("--role", role, "prover | verifier | both")->capture_default_str();
  role_cmd->add_option("--config", config_path, "Configuration JSON")->required();
  role_cmd->add_option("--transport", transport_name, "in-process | tcp")->capture_default_str();
  role_cmd->add_option("--address", address, "host:port; the prover listens, the verifier connects")
      ->capture_default_str();
  role_cmd->add_option("--queries", queries_raw, "Query points (verifier)")->delimiter(',')->capture_default_str();
  role_cmd->add_option("--backend", backend_name, "OT backend: ideal | bounded-storage")->capture_default_str();
  role_cmd->add_option("--tamper", tamper_name, "none | v | u")->capture_default_str();
  role_cmd->add_option("--transcripts", transcript_dir, "Transcript output directory");
  role_cmd->add_option("--seed", seed_override, "Override the configuration seed");
  std::uint64_t connect_timeout_ms = 10000;
  role_cmd->add_option("--connect-timeout", connect_timeout_ms, "Verifier connect retry window in ms")
      ->capture_default_str();

  // audit
  auto* audit = app.add_subcommand("audit", "Exact and Monte Carlo checks of soundness, privacy and the lemmas");
  audit->require_subcommand(1);
  std::uint64_t trials = 100000, instances = 1000;
  std::string csv_path;
  bool no_enumeration = false;
  auto* a_sound = audit->add_subcommand("soundness", "Adversary acceptance against the exact oracle");
  a_sound->add_option("--trials", trials, "Trials per adversary")->capture_default_str();
  auto* a_priv = audit->add_subcommand("privacy", "Rank-oracle entropy, attack and baseline checks");
  a_priv->add_option("--instances", instances, "Random instances per (c, m)")->capture_default_str();
  a_priv->add_flag("--no-enumeration", no_enumeration, "Skip the exhaustive GF(4) comparison");
  auto* a_lem = audit->add_subcommand("lemmas", "Rank lemma checks");
  a_lem->add_option("--instances", instances, "Random instances")->capture_default_str();
  for (auto* sub : {a_sound, a_priv, a_lem}) {
    sub->add_option("--seed", seed, "Master seed")->capture_default_str();
    sub->add_option("--csv", csv_path, "Write CSV here instead of stdout");
  }

  // bench
  auto* bench = app.add_subcommand("bench", "Per-round operation counts and wall time against d");
  std::vector<std::uint64_t> bench_d{99 * 99, 199 * 199, 399 * 399};
  std::uint64_t rounds = 20;
  bench->add_option("--d", bench_d, "Degree bounds (odd squares)")->delimiter(',')->capture_default_str();
  bench->add_option("--c", c, "Number of key points")->capture_default_str();
  bench->add_option("--rounds", rounds, "Rounds per point")->capture_default_str();
  bench->add_option("--seed", seed, "Master seed")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : Exit::config_error;
  }

  try {
    if (*gen) {
      const auto config = ProtocolConfig::make(field_for_order(q), d, r, c, Fe{xi}, cap);
      const std::string text = config_to_json(ConfigFile{config, seed}).dump(2) + "\n";
      if (out_path.empty()) {
        std::cout << text;
      } else {
        write_file(out_path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
      }
      return Exit::ok;
    }

    if (*commit_cmd) {
      const auto file = load_config(config_path);
      const auto& config = file.config;
      const auto secrets = derive_secrets(config, file.seed);
      const auto run = run_in_process(config, secrets.f, secrets.kp, secrets.kv, {}, parse_backend(backend_name),
                                      Tamper::none, file.seed);
      std::filesystem::create_directories(state_dir);
      write_file(state_path(state_dir, "prover.state"), serialize(ProverState{config, secrets.kp, secrets.f, 0}));
      write_file(state_path(state_dir, "verifier.state"),
                 serialize(VerifierState{config, secrets.kv, run.verifier.vk, 0}));
      write_file(state_path(state_dir, "vk.bin"), serialize(config.field, run.verifier.vk));
      run.verifier_transcript.write(state_path(state_dir, "commit.transcript"));
      std::cout << "committed: d=" << config.d << " s=" << config.s << " c=" << config.c << ", "
                << run.verifier_transcript.entries().size() << " frames, state in " << state_dir << "\n";
      return Exit::ok;
    }

    if (*eval_cmd) {
      auto state = deserialize_prover_state(read_file(state_path(state_dir, "prover.state")));
      Prover prover(state.config, state.f, state.key);
      const Fe x = state.config.field.element(x_raw);
      const EvalResponse resp = prover.answer(x);
      ++state.m;
      write_file(response_path.empty() ? state_path(state_dir, "response.bin") : response_path,
                 serialize(state.config.field, resp));
      write_file(state_path(state_dir, "prover.state"), serialize(state));
      std::cout << "v = [" << join(resp.v) << "]\nu = [" << join(resp.u) << "]\n";
      return Exit::ok;
    }

    if (*verify_cmd) {
      auto state = deserialize_verifier_state(read_file(state_path(state_dir, "verifier.state")));
      const auto resp = deserialize_eval_response(
          state.config.field, read_file(response_path.empty() ? state_path(state_dir, "response.bin") : response_path));
      Verifier verifier(state.config, state.key, state.vk);
      verifier.set_query_count(state.m);
      const QueryOutcome out = verifier.check(state.config.field.element(x_raw), resp);
      state.m = verifier.queries();
      write_file(state_path(state_dir, "verifier.state"), serialize(state));
      return report_queries({out}, verifier.warnings());
    }

    if (*demo || (*role_cmd && transport_name == "in-process")) {
      const auto file = load_config(config_path);
      const std::uint64_t s = seed_override.value_or(file.seed);
      const auto secrets = derive_secrets(file.config, s);
      const auto queries = parse_queries(file.config.field, queries_raw);
      const auto run = run_in_process(file.config, secrets.f, secrets.kp, secrets.kv, queries,
                                      parse_backend(backend_name), parse_tamper(tamper_name), s);
      if (!transcript_dir.empty()) {
        std::filesystem::create_directories(transcript_dir);
        if (role != "verifier") run.prover_transcript.write(state_path(transcript_dir, "prover.transcript"));
        if (role != "prover") run.verifier_transcript.write(state_path(transcript_dir, "verifier.transcript"));
      }
      return report_queries(run.verifier.queries, run.verifier.warnings);
    }

    if (*role_cmd) {
      if (transport_name != "tcp") throw ConfigError("unknown transport '" + transport_name + "'");
      if (role != "prover" && role != "verifier") throw ConfigError("tcp needs --role prover or --role verifier");
      const auto backend = parse_backend(backend_name);
      if (backend != OtBackend::bounded_storage) throw ConfigError("tcp sessions need --backend bounded-storage");
      const auto colon = address.rfind(':');
      if (colon == std::string::npos) throw ConfigError("address must be host:port");
      const std::string host = address.substr(0, colon);
      std::uint16_t port = 0;
      try {
        const auto value = std::stoul(address.substr(colon + 1));
        if (value > 65535) throw std::out_of_range("port");
        port = static_cast<std::uint16_t>(value);
      } catch (const std::logic_error&) {
        throw ConfigError("bad port in address '" + address + "'");
      }

      const auto file = load_config(config_path);
      const std::uint64_t s = seed_override.value_or(file.seed);
      const auto secrets = derive_secrets(file.config, s);
      const OtChannel channel{OtBackend::bounded_storage, nullptr, BsOtParams::desk_default()};
      Transcript transcript;
      int code = Exit::ok;
      if (role == "prover") {
        TcpListener listener(port, host);
        std::cout << "listening on " << host << ":" << listener.port() << std::endl;
        auto t = listener.accept();
        RecordingTransport rec(*t, transcript);
        Prover prover(file.config, secrets.f, secrets.kp);
        Rng rng = Rng::derive(s, "prover-ot");
        const auto res = run_prover(rec, prover, channel, rng);
        std::cout << "answered " << res.answered << ", refused " << res.refused << ", repeated "
                  << res.duplicates << "\n";
      } else {
        auto t = tcp_connect(host, port, std::chrono::milliseconds(connect_timeout_ms));
        RecordingTransport rec(*t, transcript);
        Rng rng = Rng::derive(s, "verifier-ot");
        const auto res = run_verifier(rec, file.config, secrets.kv, parse_queries(file.config.field, queries_raw),
                                      VerifierOptions{channel, parse_tamper(tamper_name)}, rng);
        code = report_queries(res.queries, res.warnings);
      }
      if (!transcript_dir.empty()) {
        std::filesystem::create_directories(transcript_dir);
        transcript.write(state_path(transcript_dir, role + ".transcript"));
      }
      return code;
    }

    if (*audit) {
      std::vector<ReportRow> rows;
      if (*a_sound) rows = soundness_suite({trials, seed});
      if (*a_priv) rows = privacy_suite({instances, seed, !no_enumeration});
      if (*a_lem) rows = lemma_suite({instances, seed});
      const std::string csv = to_csv(rows);
      if (csv_path.empty()) {
        std::cout << csv;
      } else {
        write_file(csv_path, std::span(reinterpret_cast<const std::uint8_t*>(csv.data()), csv.size()));
      }
      std::cerr << summary(rows);
      return all_pass(rows) ? Exit::ok : Exit::rejected;
    }

    if (*bench) {
      std::printf("%10s %5s %14s %14s %8s %14s %8s %12s %12s\n", "d", "s", "q", "prover_ops", "ratio", "verifier_ops",
                  "ratio", "prover_ms", "verifier_ms");
      double prev_p = 0, prev_v = 0;
      for (auto dd : bench_d) {
        const auto row = bench_point(dd, c, rounds, seed);
        std::printf("%10llu %5llu %14llu %14.0f %8s %14.0f %8s %12.4f %12.4f\n",
                    static_cast<unsigned long long>(row.d), static_cast<unsigned long long>(row.s),
                    static_cast<unsigned long long>(row.q), row.prover_ops,
                    prev_p > 0 ? std::to_string(row.prover_ops / prev_p).substr(0, 6).c_str() : "-",
                    row.verifier_ops,
                    prev_v > 0 ? std::to_string(row.verifier_ops / prev_v).substr(0, 6).c_str() : "-",
                    row.prover_seconds * 1e3, row.verifier_seconds * 1e3);
        prev_p = row.prover_ops;
        prev_v = row.verifier_ops;
      }
      return Exit::ok;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return Exit::config_error;
  } catch (const DecodeError& e) {
    std::cerr << "decode error: " << e.what() << "\n";
    return Exit::config_error;
  } catch (const DomainError& e) {
    std::cerr << "invalid value: " << e.what() << "\n";
    return Exit::config_error;
  } catch (const TransportError& e) {
    std::cerr << "transport error: " << e.what() << "\n";
    return Exit::transport_error;
  } catch (const ProtocolError& e) {
    std::cerr << "protocol error: " << e.what() << "\n";
    return Exit::protocol_error;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return Exit::protocol_error;
  }
  return Exit::ok;
}
