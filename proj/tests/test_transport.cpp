#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <thread>

#include "infocommit/errors.hpp"
#include "infocommit/transport.hpp"

using namespace infocommit;

TEST_CASE("byte writer and reader round trip") {
  const Field f = Field::prime(11);
  ByteWriter w;
  w.u8(7);
  w.u16(0x1234);
  w.u32(0xdeadbeef);
  w.u64(1ull << 40);
  w.str("hello");
  std::vector<Fe> xs{Fe{3}, Fe{10}, Fe{0}};
  w.fes(f, xs);
  const Bytes b = w.take();
  ByteReader r(b);
  CHECK(r.u8() == 7);
  CHECK(r.u16() == 0x1234);
  CHECK(r.u32() == 0xdeadbeef);
  CHECK(r.u64() == (1ull << 40));
  CHECK(r.str() == "hello");
  CHECK(r.fes(f) == xs);
  CHECK_NOTHROW(r.expect_end());
}

TEST_CASE("byte reader rejects truncation and out-of-range elements") {
  const Field f = Field::prime(11);
  Bytes short_buf{1, 2};
  ByteReader r(short_buf);
  CHECK_THROWS_AS(r.u32(), DecodeError);

  ByteWriter w;
  w.u64(11);
  const Bytes b = w.take();
  ByteReader r2(b);
  try {
    r2.fe(f);
    FAIL("expected DecodeError");
  } catch (const DecodeError& e) {
    CHECK(e.kind() == DecodeError::Kind::out_of_range);
  }

  Bytes extra{1, 2};
  ByteReader r3(extra);
  r3.u8();
  CHECK_THROWS_AS(r3.expect_end(), DecodeError);
}

TEST_CASE("frame encoding") {
  const Frame f{FrameTag::eval_req, {0xaa, 0xbb}};
  const Bytes wire = encode_frame(f);
  CHECK(wire == Bytes{0, 0, 0, 2, 9, 0xaa, 0xbb});
  CHECK(decode_frame(wire) == f);

  Bytes bad_tag = wire;
  bad_tag[4] = 13;
  CHECK_THROWS_AS(decode_frame(bad_tag), ProtocolError);
  Bytes bad_len = wire;
  bad_len[3] = 5;
  CHECK_THROWS_AS(decode_frame(bad_len), DecodeError);
  CHECK_THROWS_AS(decode_frame(Bytes{0, 0}), DecodeError);
}

TEST_CASE("duplex delivers in order and reports closure") {
  auto [a, b] = make_duplex(std::chrono::milliseconds(500));
  a->send({FrameTag::negotiate, {1}});
  a->send({FrameTag::set_agree, {2}});
  CHECK(b->recv().payload == Bytes{1});
  CHECK(b->expect(FrameTag::set_agree).payload == Bytes{2});
  a->send({FrameTag::verdict, {}});
  CHECK_THROWS_AS(b->expect(FrameTag::eval_resp), ProtocolError);
  a->close();
  CHECK_THROWS_AS(b->recv(), TransportError);
}

TEST_CASE("duplex receive times out") {
  auto [a, b] = make_duplex(std::chrono::milliseconds(20));
  CHECK_THROWS_AS(b->recv(), TransportError);
}

TEST_CASE("abort frame surfaces as aborted protocol error") {
  auto [a, b] = make_duplex(std::chrono::milliseconds(500));
  a->send({FrameTag::abort, {0}});
  try {
    b->expect(FrameTag::eval_resp);
    FAIL("expected ProtocolError");
  } catch (const ProtocolError& e) {
    CHECK(e.code() == ProtocolError::Code::aborted);
  }
}

TEST_CASE("run_pair returns the right result and prefers the root-cause error") {
  const int got = run_pair([](Transport& t) { t.send({FrameTag::eval_req, {42}}); },
                           [](Transport& t) { return static_cast<int>(t.recv().payload[0]); });
  CHECK(got == 42);

  CHECK_THROWS_AS(run_pair([](Transport&) { throw ConfigError("boom"); }, [](Transport& t) { t.recv(); }),
                  ConfigError);
  CHECK_THROWS_AS(run_pair([](Transport& t) { t.recv(); }, [](Transport&) { throw ConfigError("boom"); }),
                  ConfigError);
}

TEST_CASE("tcp round trip on loopback") {
  TcpListener listener(0);
  const auto port = listener.port();
  std::thread client([port] {
    auto t = tcp_connect("127.0.0.1", port);
    t->send({FrameTag::negotiate, Bytes(100000, 0x5a)});
    auto reply = t->recv();
    CHECK(reply.tag == FrameTag::set_agree);
  });
  auto server = listener.accept();
  const Frame f = server->recv();
  CHECK(f.tag == FrameTag::negotiate);
  CHECK(f.payload.size() == 100000);
  server->send({FrameTag::set_agree, {}});
  client.join();
}

TEST_CASE("transcript write, read and replay") {
  auto [a, b] = make_duplex(std::chrono::milliseconds(500));
  Transcript ta;
  RecordingTransport ra(*a, ta);
  ra.send({FrameTag::negotiate, {1, 2, 3}});
  b->send({FrameTag::set_agree, {4}});
  CHECK(ra.recv().payload == Bytes{4});

  CHECK(ta.entries().size() == 2);
  CHECK(ta.index_text() == "0 NEGOTIATE 3\n8 SET_AGREE 1\n");

  const auto path = (std::filesystem::temp_directory_path() / "infocommit_transcript_test.bin").string();
  ta.write(path);
  const Transcript back = Transcript::read(path);
  CHECK(back == ta);
  std::remove(path.c_str());
  std::remove((path + ".idx").c_str());

  ReplayTransport replay(back.frames(), {true, false});
  replay.send({FrameTag::negotiate, {1, 2, 3}});
  CHECK(replay.recv().payload == Bytes{4});
  CHECK(replay.finished());

  ReplayTransport diverging(back.frames(), {true, false});
  CHECK_THROWS_AS(diverging.send({FrameTag::negotiate, {9}}), ProtocolError);
}
