#include <doctest.h>

#include <algorithm>
#include <thread>

#include "infocommit/errors.hpp"
#include "infocommit/persist.hpp"
#include "infocommit/session.hpp"

using namespace infocommit;

namespace {

struct Fixture {
  ProtocolConfig cfg;
  Polynomial f;
  VerifierKey kv;
  ProverKey kp;
};

Fixture fixture(std::uint64_t c, std::uint64_t seed) {
  Fixture fx{ProtocolConfig::make(Field::prime(11), 9, 2, c, Fe{6}), {Field::prime(11), {}}, {}, {Matrix(Field::prime(11), 3, 3)}};
  Rng poly = Rng::derive(seed, "polynomial");
  Rng prover = Rng::derive(seed, "prover");
  Rng verifier = Rng::derive(seed, "verifier");
  fx.f = Polynomial::random(fx.cfg.field, fx.cfg.d, poly);
  fx.kv = keygen_verifier(fx.cfg, verifier);
  fx.kp = keygen_prover(fx.f, fx.cfg, prover);
  return fx;
}

bool contains(const Bytes& hay, const Bytes& needle) {
  return std::search(hay.begin(), hay.end(), needle.begin(), needle.end()) != hay.end();
}

}  // namespace

TEST_CASE("honest session with five queries") {
  const auto fx = fixture(3, 1);
  const auto queries = std::vector<Fe>{Fe{0}, Fe{1}, Fe{2}, Fe{5}, Fe{6}};
  const auto run = run_in_process(fx.cfg, fx.f, fx.kp, fx.kv, queries, OtBackend::ideal, Tamper::none, 9);
  REQUIRE(run.verifier.queries.size() == 5);
  for (const auto& q : run.verifier.queries) {
    CHECK(q.accepted);
    CHECK(*q.value == horner_eval(fx.f, q.x));
  }
  CHECK(run.prover.answered == 5);
  CHECK(run.verifier.vk == expected_verification_key(to_matrix(fx.f, 3), fx.kv, fx.kp, fx.cfg));
  CHECK(run.prover_transcript.entries().front().tag == FrameTag::negotiate);
  CHECK(run.prover_transcript.entries().back().tag == FrameTag::abort);
}

TEST_CASE("query inside the prohibited set is refused and the session continues") {
  const auto fx = fixture(2, 2);
  const auto queries = std::vector<Fe>{Fe{3}, Fe{8}, Fe{4}};
  const auto run = run_in_process(fx.cfg, fx.f, fx.kp, fx.kv, queries, OtBackend::ideal, Tamper::none, 9);
  REQUIRE(run.verifier.queries.size() == 3);
  CHECK(run.verifier.queries[0].accepted);
  CHECK(run.verifier.queries[1].refused);
  CHECK(run.verifier.queries[2].accepted);
  CHECK(run.prover.refused == 1);
}

TEST_CASE("tampered responses are rejected") {
  const auto fx = fixture(3, 3);
  const auto queries = std::vector<Fe>{Fe{1}, Fe{2}};
  for (Tamper t : {Tamper::v, Tamper::u}) {
    const auto run = run_in_process(fx.cfg, fx.f, fx.kp, fx.kv, queries, OtBackend::ideal, t, 9);
    CHECK_FALSE(run.verifier.all_accepted());
    for (const auto& q : run.verifier.queries) CHECK_FALSE(q.value.has_value());
  }
}

TEST_CASE("prover transcript does not depend on the verifier key") {
  const auto fx = fixture(3, 4);
  const auto queries = std::vector<Fe>{Fe{1}, Fe{2}, Fe{3}};
  const auto base = run_in_process(fx.cfg, fx.f, fx.kp, fx.kv, queries, OtBackend::ideal, Tamper::none, 5);
  Rng rng(100);
  for (int i = 0; i < 10; ++i) {
    const auto kv = keygen_verifier(fx.cfg, rng);
    const auto other = run_in_process(fx.cfg, fx.f, fx.kp, kv, queries, OtBackend::ideal, Tamper::none, 5);
    CHECK(other.prover_transcript == base.prover_transcript);
  }
}

TEST_CASE("replaying a recorded verifier transcript gives identical outcomes") {
  const auto fx = fixture(1, 5);
  const auto queries = std::vector<Fe>{Fe{2}, Fe{4}};
  const auto run = run_in_process(fx.cfg, fx.f, fx.kp, fx.kv, queries, OtBackend::bounded_storage, Tamper::none, 6);
  REQUIRE(run.verifier.all_accepted());

  ReplayTransport replay(run.verifier_transcript.frames(), run.verifier_outgoing);
  IdealOtHub unused;
  VerifierOptions options{OtChannel{OtBackend::bounded_storage, &unused, BsOtParams::desk_default()}, Tamper::none};
  Rng verifier_rng = Rng::derive(6, "verifier-ot");
  const auto again = run_verifier(replay, fx.cfg, fx.kv, queries, options, verifier_rng);
  CHECK(replay.finished());
  CHECK(again.vk == run.verifier.vk);
  REQUIRE(again.queries.size() == run.verifier.queries.size());
  for (std::size_t i = 0; i < again.queries.size(); ++i) CHECK(again.queries[i].value == run.verifier.queries[i].value);
}

TEST_CASE("tcp and in-process runs produce identical transcripts") {
  const auto fx = fixture(1, 7);
  const auto queries = std::vector<Fe>{Fe{3}};
  const auto local = run_in_process(fx.cfg, fx.f, fx.kp, fx.kv, queries, OtBackend::bounded_storage, Tamper::none, 8);

  TcpListener listener(0);
  const auto port = listener.port();
  Transcript prover_t;
  OtChannel channel{OtBackend::bounded_storage, nullptr, BsOtParams::desk_default()};
  std::thread prover_thread([&] {
    auto t = listener.accept();
    RecordingTransport rec(*t, prover_t);
    Prover prover(fx.cfg, fx.f, fx.kp);
    Rng rng = Rng::derive(8, "prover-ot");
    run_prover(rec, prover, channel, rng);
  });
  auto t = tcp_connect("127.0.0.1", port);
  Transcript verifier_t;
  RecordingTransport rec(*t, verifier_t);
  Rng rng = Rng::derive(8, "verifier-ot");
  const auto result = run_verifier(rec, fx.cfg, fx.kv, queries, VerifierOptions{channel, Tamper::none}, rng);
  prover_thread.join();
  CHECK(result.all_accepted());
  CHECK(prover_t == local.prover_transcript);
  CHECK(verifier_t == local.verifier_transcript);
}

TEST_CASE("out-of-order frame aborts the session") {
  const auto fx = fixture(1, 8);
  IdealOtHub hub;
  OtChannel channel{OtBackend::ideal, &hub, BsOtParams::desk_default()};
  CHECK_THROWS_AS(run_pair(
                      [&](Transport& t) {
                        Prover prover(fx.cfg, fx.f, fx.kp);
                        Rng rng(1);
                        run_prover(t, prover, channel, rng);
                      },
                      [&](Transport& t) {
                        t.send({FrameTag::eval_req, Bytes(8, 0)});
                        const Frame f = t.recv();
                        CHECK(f.tag == FrameTag::abort);
                        CHECK(f.payload.at(0) == static_cast<std::uint8_t>(AbortCode::order_violation));
                      }),
                  ProtocolError);
}

TEST_CASE("mismatched parameters abort negotiation") {
  const auto fx = fixture(1, 9);
  const auto other = ProtocolConfig::make(Field::prime(11), 9, 2, 2, Fe{6});
  IdealOtHub hub;
  OtChannel channel{OtBackend::ideal, &hub, BsOtParams::desk_default()};
  CHECK_THROWS_AS(run_pair(
                      [&](Transport& t) {
                        Prover prover(fx.cfg, fx.f, fx.kp);
                        Rng rng(1);
                        run_prover(t, prover, channel, rng);
                      },
                      [&](Transport& t) {
                        Rng rng(2);
                        verifier_open(t, other, fx.kv, channel, rng);
                      }),
                  ProtocolError);
}

TEST_CASE("serialization round trips") {
  const auto fx = fixture(3, 10);
  const Field& f = fx.cfg.field;
  const auto vk = expected_verification_key(to_matrix(fx.f, 3), fx.kv, fx.kp, fx.cfg);
  CHECK(deserialize_verification_key(f, serialize(f, vk)) == vk);
  CHECK(deserialize_verifier_key(f, serialize(f, fx.kv)) == fx.kv);
  CHECK(deserialize_prover_key(f, serialize(f, fx.kp)) == fx.kp);
  const auto resp = eval(Fe{4}, to_matrix(fx.f, 3), fx.kp.B, fx.cfg);
  CHECK(deserialize_eval_response(f, serialize(f, resp)) == resp);

  const ProverState ps{fx.cfg, fx.kp, fx.f, 7};
  const auto ps2 = deserialize_prover_state(serialize(ps));
  CHECK(ps2.config == ps.config);
  CHECK(ps2.key == ps.key);
  CHECK(ps2.f.coeffs == ps.f.coeffs);
  CHECK(ps2.m == 7);
  CHECK(serialize(ps2) == serialize(ps));

  const VerifierState vs{fx.cfg, fx.kv, vk, 3};
  const auto vs2 = deserialize_verifier_state(serialize(vs));
  CHECK(serialize(vs2) == serialize(vs));

  const auto g4 = ProtocolConfig::make(Field::gf4(), 4, 2, 1, Fe{1});
  Rng rng(3);
  const Polynomial p = Polynomial::random(g4.field, 4, rng);
  const ProverState gs{g4, keygen_prover(p, g4, rng), p, 0};
  CHECK(serialize(deserialize_prover_state(serialize(gs))) == serialize(gs));
}

TEST_CASE("element encoding and decode errors") {
  ByteWriter w;
  w.fe(Field::prime(11), Fe{7});
  CHECK(to_hex(w.bytes()) == "0700000000000000");

  const auto fx = fixture(1, 11);
  const Field& f = fx.cfg.field;
  Bytes bytes = serialize(f, fx.kv);
  Bytes wrong_version = bytes;
  wrong_version[0] = 9;
  try {
    deserialize_verifier_key(f, wrong_version);
    FAIL("expected DecodeError");
  } catch (const DecodeError& e) {
    CHECK(e.kind() == DecodeError::Kind::version);
  }
  Bytes truncated(bytes.begin(), bytes.end() - 3);
  CHECK_THROWS_AS(deserialize_verifier_key(f, truncated), DecodeError);
  Bytes huge = serialize(f, fx.kp);
  huge[3] = 0xff;
  huge[4] = 0xff;
  CHECK_THROWS_AS(deserialize_prover_key(f, huge), DecodeError);
  Bytes out_of_range = serialize(f, fx.kv);
  out_of_range[7] = 200;
  try {
    deserialize_verifier_key(f, out_of_range);
    FAIL("expected DecodeError");
  } catch (const DecodeError& e) {
    CHECK(e.kind() == DecodeError::Kind::out_of_range);
  }
}

TEST_CASE("config JSON round trip and rejection") {
  const ConfigFile file{ProtocolConfig::make(Field::prime(11), 9, 2, 1, Fe{6}), 42};
  const auto j = config_to_json(file);
  CHECK(j["S"] == nlohmann::json::array({7, 8, 9, 10}));
  const auto back = config_from_json(j);
  CHECK(back.config == file.config);
  CHECK(back.seed == 42);

  const ConfigFile g4{ProtocolConfig::make(Field::gf4(), 4, 2, 1, Fe{1}), 1};
  CHECK(config_from_json(config_to_json(g4)).config == g4.config);

  auto bad = j;
  bad["d"] = 4;
  bad.erase("S");
  CHECK_THROWS_AS(config_from_json(bad), ConfigError);
  bad = j;
  bad["r"] = 1;
  CHECK_THROWS_AS(config_from_json(bad), ConfigError);
  bad = j;
  bad["c"] = 5;
  CHECK_THROWS_AS(config_from_json(bad), ConfigError);
  bad = j;
  bad["c"] = 0;
  CHECK_THROWS_AS(config_from_json(bad), ConfigError);
  bad = j;
  bad["xi"] = 7;
  CHECK_THROWS_AS(config_from_json(bad), ConfigError);
  bad = j;
  bad["xi"] = 12;
  CHECK_THROWS_AS(config_from_json(bad), ConfigError);
  bad = j;
  bad["field"]["modulus"] = 12;
  CHECK_THROWS_AS(config_from_json(bad), ConfigError);
  bad = j;
  bad["S"] = nlohmann::json::array({6, 7, 8, 9});
  CHECK_THROWS_AS(config_from_json(bad), ConfigError);
  bad = j;
  bad["version"] = 2;
  CHECK_THROWS_AS(config_from_json(bad), ConfigError);
  bad = j;
  bad.erase("d");
  CHECK_THROWS_AS(config_from_json(bad), ConfigError);
}

TEST_CASE("secret keys never appear in transcripts or indexes") {
  const auto fx = fixture(3, 12);
  const Field& f = fx.cfg.field;
  const auto queries = std::vector<Fe>{Fe{1}, Fe{6}};
  const auto run = run_in_process(fx.cfg, fx.f, fx.kp, fx.kv, queries, OtBackend::ideal, Tamper::none, 13);

  // Individual lambdas and thetas are elements of the public set S, so the
  // patterns are the serialized key records and the raw encoding of B.
  ByteWriter b;
  for (Fe e : fx.kp.B.data()) b.fe(f, e);
  const std::vector<Bytes> secrets{serialize(f, fx.kv), serialize(f, fx.kp), b.take()};
  for (const Transcript* t : {&run.prover_transcript, &run.verifier_transcript}) {
    const std::string index = t->index_text();
    const Bytes index_bytes(index.begin(), index.end());
    for (const auto& s : secrets) {
      CHECK_FALSE(contains(t->bytes(), s));
      CHECK_FALSE(contains(index_bytes, s));
      CHECK(index.find(to_hex(s)) == std::string::npos);
    }
  }
}
