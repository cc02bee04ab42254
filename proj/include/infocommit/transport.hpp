#pragma once

#include <chrono>
#include <cstdint>
#include <exception>
#include <future>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <vector>

#include "infocommit/bytes.hpp"

namespace infocommit {

enum class FrameTag : std::uint8_t {
  negotiate = 1,
  set_agree = 2,
  s2pc_begin = 3,
  tape_chunk = 4,
  omega_reveal = 5,
  ih_round = 6,
  encoded_pair = 7,
  commit_done = 8,
  eval_req = 9,
  eval_resp = 10,
  verdict = 11,
  abort = 12,
};

std::string_view tag_name(FrameTag tag);
// Throws ProtocolError(malformed) for bytes outside the tag set.
FrameTag tag_from_byte(std::uint8_t b);

struct Frame {
  FrameTag tag;
  Bytes payload;
  friend bool operator==(const Frame&, const Frame&) = default;
};

// Wire encoding: 4-byte big-endian payload length, 1 tag byte, payload.
constexpr std::size_t kFrameHeaderSize = 5;
constexpr std::size_t kMaxFramePayload = std::size_t{64} << 20;

Bytes encode_frame(const Frame& frame);
// Decodes exactly one frame occupying all of `data`.
Frame decode_frame(std::span<const std::uint8_t> data);

// Message-ordered, reliable, bidirectional frame channel.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual void send(const Frame& frame) = 0;
  // Blocks until a frame arrives; TransportError when the peer is gone.
  virtual Frame recv() = 0;
  virtual void close() {}

  // recv() that also checks the tag; an ABORT or any other tag raises
  // ProtocolError(order_violation / aborted).
  Frame expect(FrameTag tag);
};

// Two connected in-process endpoints.
std::pair<std::unique_ptr<Transport>, std::unique_ptr<Transport>> make_duplex(
    std::chrono::milliseconds recv_timeout = std::chrono::seconds(120));

class TcpListener {
 public:
  // Binds 127.0.0.1 (or host) on `port`; port 0 picks an ephemeral port.
  explicit TcpListener(std::uint16_t port, const std::string& host = "127.0.0.1");
  ~TcpListener();
  TcpListener(const TcpListener&) = delete;
  TcpListener& operator=(const TcpListener&) = delete;

  std::uint16_t port() const { return port_; }
  std::unique_ptr<Transport> accept();

 private:
  int fd_ = -1;
  std::uint16_t port_ = 0;
};

std::unique_ptr<Transport> tcp_connect(const std::string& host, std::uint16_t port,
                                       std::chrono::milliseconds retry_for = std::chrono::seconds(10));

// Ordered record of every frame a party sent or received, stored as the
// concatenated wire encoding plus an index of (offset, tag, payload length).
class Transcript {
 public:
  struct Entry {
    std::uint64_t offset;
    FrameTag tag;
    std::uint32_t length;
  };

  void append(const Frame& frame);
  const Bytes& bytes() const { return bytes_; }
  const std::vector<Entry>& entries() const { return entries_; }
  std::vector<Frame> frames() const;

  // Text index, one line per frame: "offset TAG length".
  std::string index_text() const;
  // Writes <path> (framed binary) and <path>.idx (text index).
  void write(const std::string& path) const;
  static Transcript read(const std::string& path);

  friend bool operator==(const Transcript& a, const Transcript& b) { return a.bytes_ == b.bytes_; }

 private:
  Bytes bytes_;
  std::vector<Entry> entries_;
};

// Forwards to an inner transport and appends every frame to a transcript.
class RecordingTransport : public Transport {
 public:
  RecordingTransport(Transport& inner, Transcript& transcript) : inner_(inner), transcript_(transcript) {}
  void send(const Frame& frame) override;
  Frame recv() override;
  void close() override { inner_.close(); }
  // Per recorded frame: true when this side sent it.
  const std::vector<bool>& outgoing() const { return outgoing_; }

 private:
  Transport& inner_;
  Transcript& transcript_;
  std::vector<bool> outgoing_;
};

// Plays one party's recorded transcript back: recv() yields the recorded
// incoming frames, send() must reproduce the recorded outgoing frames.
// `outgoing` flags, per transcript entry, whether the party sent it.
class ReplayTransport : public Transport {
 public:
  ReplayTransport(std::vector<Frame> frames, std::vector<bool> outgoing);
  void send(const Frame& frame) override;
  Frame recv() override;
  bool finished() const { return next_ == frames_.size(); }

 private:
  std::vector<Frame> frames_;
  std::vector<bool> outgoing_;
  std::size_t next_ = 0;
};

bool is_transport_error(const std::exception_ptr& error);

// Runs `left` on a worker thread against one end of an in-process duplex and
// `right` on the calling thread against the other. Whichever side fails
// closes its endpoint so the peer unblocks; the first failure is rethrown.
template <typename Left, typename Right>
auto run_pair(Left&& left, Right&& right) {
  auto [a, b] = make_duplex();
  Transport* left_end = a.get();
  auto worker = std::async(std::launch::async, [&left, left_end]() {
    try {
      left(*left_end);
    } catch (...) {
      left_end->close();
      throw;
    }
  });
  std::exception_ptr right_error;
  using Result = decltype(right(*b));
  std::optional<std::conditional_t<std::is_void_v<Result>, int, Result>> result;
  try {
    if constexpr (std::is_void_v<Result>) {
      right(*b);
      result = 0;
    } else {
      result = right(*b);
    }
  } catch (...) {
    right_error = std::current_exception();
    b->close();
  }
  std::exception_ptr left_error;
  try {
    worker.get();
  } catch (...) {
    left_error = std::current_exception();
  }
  // A side that only saw its peer disappear reports a TransportError; prefer
  // the other side's error, which is the root cause.
  if (left_error && right_error) {
    std::rethrow_exception(is_transport_error(left_error) && !is_transport_error(right_error) ? right_error
                                                                                               : left_error);
  }
  if (left_error) std::rethrow_exception(left_error);
  if (right_error) std::rethrow_exception(right_error);
  if constexpr (!std::is_void_v<Result>) return std::move(*result);
}

}  // namespace infocommit
