#include "infocommit/transport.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <condition_variable>
#include <cstring>
#include <deque>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "infocommit/errors.hpp"

namespace infocommit {

namespace {

constexpr std::string_view kTagNames[] = {"?",           "NEGOTIATE",   "SET_AGREE",   "S2PC_BEGIN", "TAPE_CHUNK",
                                          "OMEGA_REVEAL", "IH_ROUND",    "ENCODED_PAIR", "COMMIT_DONE", "EVAL_REQ",
                                          "EVAL_RESP",   "VERDICT",     "ABORT"};

void put_be32(Bytes& out, std::uint32_t v) {
  for (int i = 3; i >= 0; --i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_be32(const std::uint8_t* p) {
  return (std::uint32_t{p[0]} << 24) | (std::uint32_t{p[1]} << 16) | (std::uint32_t{p[2]} << 8) | p[3];
}

}  // namespace

std::string_view tag_name(FrameTag tag) {
  const auto i = static_cast<std::size_t>(tag);
  return i < std::size(kTagNames) ? kTagNames[i] : kTagNames[0];
}

FrameTag tag_from_byte(std::uint8_t b) {
  if (b < static_cast<std::uint8_t>(FrameTag::negotiate) || b > static_cast<std::uint8_t>(FrameTag::abort)) {
    throw ProtocolError(ProtocolError::Code::malformed, "unknown frame tag " + std::to_string(b));
  }
  return static_cast<FrameTag>(b);
}

bool is_transport_error(const std::exception_ptr& error) {
  try {
    std::rethrow_exception(error);
  } catch (const TransportError&) {
    return true;
  } catch (...) {
    return false;
  }
}

Bytes encode_frame(const Frame& frame) {
  if (frame.payload.size() > kMaxFramePayload) throw TransportError("frame payload too large");
  Bytes out;
  out.reserve(kFrameHeaderSize + frame.payload.size());
  put_be32(out, static_cast<std::uint32_t>(frame.payload.size()));
  out.push_back(static_cast<std::uint8_t>(frame.tag));
  out.insert(out.end(), frame.payload.begin(), frame.payload.end());
  return out;
}

Frame decode_frame(std::span<const std::uint8_t> data) {
  if (data.size() < kFrameHeaderSize) throw DecodeError(DecodeError::Kind::truncated, "frame shorter than header");
  const std::uint32_t len = get_be32(data.data());
  if (len != data.size() - kFrameHeaderSize) {
    throw DecodeError(DecodeError::Kind::malformed, "frame length prefix " + std::to_string(len) +
                                                        " does not match payload size " +
                                                        std::to_string(data.size() - kFrameHeaderSize));
  }
  return Frame{tag_from_byte(data[4]), Bytes(data.begin() + kFrameHeaderSize, data.end())};
}

Frame Transport::expect(FrameTag tag) {
  Frame f = recv();
  if (f.tag == tag) return f;
  if (f.tag == FrameTag::abort) {
    throw ProtocolError(ProtocolError::Code::aborted,
                        "peer aborted the session while " + std::string(tag_name(tag)) + " was expected");
  }
  throw ProtocolError(ProtocolError::Code::order_violation, "expected " + std::string(tag_name(tag)) + ", got " +
                                                                std::string(tag_name(f.tag)));
}

// ---------------------------------------------------------------- duplex

namespace {

struct DuplexState {
  std::mutex mu;
  std::condition_variable cv;
  std::deque<Frame> queue[2];  // queue[i] holds frames addressed to end i
  bool closed = false;
};

class DuplexEnd : public Transport {
 public:
  DuplexEnd(std::shared_ptr<DuplexState> state, int self, std::chrono::milliseconds timeout)
      : state_(std::move(state)), self_(self), timeout_(timeout) {}
  ~DuplexEnd() override { close(); }

  void send(const Frame& frame) override {
    std::lock_guard lock(state_->mu);
    if (state_->closed) throw TransportError("in-process channel closed");
    state_->queue[1 - self_].push_back(frame);
    state_->cv.notify_all();
  }

  Frame recv() override {
    std::unique_lock lock(state_->mu);
    auto& q = state_->queue[self_];
    if (!state_->cv.wait_for(lock, timeout_, [&] { return !q.empty() || state_->closed; })) {
      throw TransportError("in-process channel receive timed out");
    }
    if (q.empty()) throw TransportError("in-process channel closed by peer");
    Frame f = std::move(q.front());
    q.pop_front();
    return f;
  }

  void close() override {
    std::lock_guard lock(state_->mu);
    state_->closed = true;
    state_->cv.notify_all();
  }

 private:
  std::shared_ptr<DuplexState> state_;
  int self_;
  std::chrono::milliseconds timeout_;
};

}  // namespace

std::pair<std::unique_ptr<Transport>, std::unique_ptr<Transport>> make_duplex(std::chrono::milliseconds recv_timeout) {
  auto state = std::make_shared<DuplexState>();
  return {std::make_unique<DuplexEnd>(state, 0, recv_timeout), std::make_unique<DuplexEnd>(state, 1, recv_timeout)};
}

// ---------------------------------------------------------------- tcp

namespace {

class TcpTransport : public Transport {
 public:
  explicit TcpTransport(int fd) : fd_(fd) {
    int one = 1;
    ::setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
  }
  ~TcpTransport() override { close(); }

  void send(const Frame& frame) override {
    const Bytes wire = encode_frame(frame);
    std::size_t off = 0;
    while (off < wire.size()) {
      const ssize_t n = ::send(fd_, wire.data() + off, wire.size() - off, MSG_NOSIGNAL);
      if (n < 0 && errno == EINTR) continue;
      if (n <= 0) throw TransportError(std::string("tcp send failed: ") + std::strerror(errno));
      off += static_cast<std::size_t>(n);
    }
  }

  Frame recv() override {
    std::uint8_t header[kFrameHeaderSize];
    read_exact(header, sizeof header);
    const std::uint32_t len = get_be32(header);
    if (len > kMaxFramePayload) throw TransportError("tcp frame exceeds maximum payload size");
    const FrameTag tag = tag_from_byte(header[4]);
    Bytes payload(len);
    read_exact(payload.data(), len);
    return Frame{tag, std::move(payload)};
  }

  void close() override {
    if (fd_ >= 0) {
      ::shutdown(fd_, SHUT_RDWR);
      ::close(fd_);
      fd_ = -1;
    }
  }

 private:
  void read_exact(std::uint8_t* dst, std::size_t n) {
    std::size_t off = 0;
    while (off < n) {
      if (fd_ < 0) throw TransportError("tcp connection closed");
      const ssize_t got = ::recv(fd_, dst + off, n - off, 0);
      if (got < 0 && errno == EINTR) continue;
      if (got == 0) throw TransportError("tcp connection closed by peer");
      if (got < 0) throw TransportError(std::string("tcp recv failed: ") + std::strerror(errno));
      off += static_cast<std::size_t>(got);
    }
  }

  int fd_;
};

}  // namespace

TcpListener::TcpListener(std::uint16_t port, const std::string& host) {
  fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd_ < 0) throw TransportError(std::string("socket: ") + std::strerror(errno));
  int one = 1;
  ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
    ::close(fd_);
    throw TransportError("invalid listen address " + host);
  }
  if (::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0 || ::listen(fd_, 1) != 0) {
    const std::string err = std::strerror(errno);
    ::close(fd_);
    throw TransportError("cannot listen on " + host + ":" + std::to_string(port) + ": " + err);
  }
  socklen_t len = sizeof addr;
  ::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
}

TcpListener::~TcpListener() {
  if (fd_ >= 0) ::close(fd_);
}

std::unique_ptr<Transport> TcpListener::accept() {
  for (;;) {
    const int fd = ::accept(fd_, nullptr, nullptr);
    if (fd >= 0) return std::make_unique<TcpTransport>(fd);
    if (errno != EINTR) throw TransportError(std::string("accept: ") + std::strerror(errno));
  }
}

std::unique_ptr<Transport> tcp_connect(const std::string& host, std::uint16_t port,
                                       std::chrono::milliseconds retry_for) {
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  if (::getaddrinfo(host.c_str(), std::to_string(port).c_str(), &hints, &res) != 0 || res == nullptr) {
    throw TransportError("cannot resolve " + host);
  }
  const auto deadline = std::chrono::steady_clock::now() + retry_for;
  std::string last_error;
  for (;;) {
    const int fd = ::socket(res->ai_family, res->ai_socktype, res->ai_protocol);
    if (fd >= 0 && ::connect(fd, res->ai_addr, res->ai_addrlen) == 0) {
      ::freeaddrinfo(res);
      return std::make_unique<TcpTransport>(fd);
    }
    last_error = std::strerror(errno);
    if (fd >= 0) ::close(fd);
    if (std::chrono::steady_clock::now() >= deadline) break;
    std::this_thread::sleep_for(std::chrono::milliseconds(50));
  }
  ::freeaddrinfo(res);
  throw TransportError("cannot connect to " + host + ":" + std::to_string(port) + ": " + last_error);
}

// ---------------------------------------------------------------- transcript

void Transcript::append(const Frame& frame) {
  entries_.push_back({bytes_.size(), frame.tag, static_cast<std::uint32_t>(frame.payload.size())});
  const Bytes wire = encode_frame(frame);
  bytes_.insert(bytes_.end(), wire.begin(), wire.end());
}

std::vector<Frame> Transcript::frames() const {
  std::vector<Frame> out;
  for (const auto& e : entries_) {
    const auto begin = bytes_.begin() + static_cast<std::ptrdiff_t>(e.offset);
    out.push_back(decode_frame(std::span(begin, begin + static_cast<std::ptrdiff_t>(kFrameHeaderSize + e.length))));
  }
  return out;
}

std::string Transcript::index_text() const {
  std::ostringstream os;
  for (const auto& e : entries_) os << e.offset << ' ' << tag_name(e.tag) << ' ' << e.length << '\n';
  return os.str();
}

void Transcript::write(const std::string& path) const {
  std::ofstream bin(path, std::ios::binary);
  bin.write(reinterpret_cast<const char*>(bytes_.data()), static_cast<std::streamsize>(bytes_.size()));
  std::ofstream idx(path + ".idx");
  idx << index_text();
  if (!bin || !idx) throw TransportError("cannot write transcript " + path);
}

Transcript Transcript::read(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw TransportError("cannot read transcript " + path);
  Bytes data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  Transcript t;
  std::size_t off = 0;
  while (off < data.size()) {
    if (data.size() - off < kFrameHeaderSize) throw DecodeError(DecodeError::Kind::truncated, "truncated transcript");
    const std::uint32_t len = get_be32(data.data() + off);
    if (data.size() - off - kFrameHeaderSize < len) {
      throw DecodeError(DecodeError::Kind::truncated, "truncated transcript frame");
    }
    t.append(decode_frame(std::span(data.data() + off, kFrameHeaderSize + len)));
    off += kFrameHeaderSize + len;
  }
  return t;
}

void RecordingTransport::send(const Frame& frame) {
  inner_.send(frame);
  transcript_.append(frame);
  outgoing_.push_back(true);
}

Frame RecordingTransport::recv() {
  Frame f = inner_.recv();
  transcript_.append(f);
  outgoing_.push_back(false);
  return f;
}

ReplayTransport::ReplayTransport(std::vector<Frame> frames, std::vector<bool> outgoing)
    : frames_(std::move(frames)), outgoing_(std::move(outgoing)) {
  if (frames_.size() != outgoing_.size()) throw DimensionMismatch("replay direction flags do not match frames");
}

void ReplayTransport::send(const Frame& frame) {
  if (next_ >= frames_.size() || !outgoing_[next_]) {
    throw ProtocolError(ProtocolError::Code::order_violation, "replay: unexpected outgoing frame " +
                                                                  std::string(tag_name(frame.tag)));
  }
  if (!(frames_[next_] == frame)) {
    throw ProtocolError(ProtocolError::Code::order_violation,
                        "replay: outgoing frame " + std::to_string(next_) + " differs from the recording");
  }
  ++next_;
}

Frame ReplayTransport::recv() {
  if (next_ >= frames_.size()) throw TransportError("replay: transcript exhausted");
  if (outgoing_[next_]) {
    throw ProtocolError(ProtocolError::Code::order_violation, "replay: party receives where it sent " +
                                                                  std::string(tag_name(frames_[next_].tag)));
  }
  return frames_[next_++];
}

}  // namespace infocommit
