#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <mutex>
#include <span>
#include <utility>
#include <vector>

#include "infocommit/bytes.hpp"
#include "infocommit/field.hpp"
#include "infocommit/rng.hpp"

namespace infocommit {

// Opaque OT payload; every message of one session has the same length.
using OtMessage = Bytes;

// Additive group on OT messages: vectors of `length` field elements,
// serialized at the field's element width, added component-wise.
class MessageGroup {
 public:
  MessageGroup(Field field, std::size_t length);

  const Field& field() const { return field_; }
  std::size_t length() const { return length_; }
  std::size_t byte_length() const { return length_ * field_.element_width(); }

  OtMessage encode(std::span<const Fe> elements) const;
  std::vector<Fe> decode(const OtMessage& m) const;
  OtMessage add(const OtMessage& a, const OtMessage& b) const;
  OtMessage sub(const OtMessage& a, const OtMessage& b) const;
  OtMessage zero() const;
  OtMessage random(Rng& rng) const;

 private:
  Field field_;
  std::size_t length_;
};

// 2 x (c-1) table turning c-1 one-of-two transfers into one-of-c.
struct ReductionTable {
  std::vector<OtMessage> row1;
  std::vector<OtMessage> row2;
  std::vector<OtMessage> masks;  // r_0 .. r_{c-3}

  std::size_t columns() const { return row1.size(); }
};

ReductionTable build_reduction_table(const MessageGroup& group, std::span<const OtMessage> secrets, Rng& rng);
// Same table with caller-chosen masks (c-2 of them, none when c = 2).
ReductionTable build_reduction_table(const MessageGroup& group, std::span<const OtMessage> secrets,
                                     std::span<const OtMessage> masks);

enum class Row : std::uint8_t { first = 0, second = 1 };

// Receiver's row per column for target index i.
std::vector<Row> row_picks(std::size_t i, std::size_t c);

OtMessage decode_c_of_1(const MessageGroup& group, std::span<const OtMessage> received, std::size_t i,
                        std::size_t c);

OtMessage ideal_ot2(const OtMessage& m0, const OtMessage& m1, bool b);

// One-of-two backends. A sender/receiver pair performs transfers in lockstep.
class Ot2Sender {
 public:
  virtual ~Ot2Sender() = default;
  virtual void send(const OtMessage& m0, const OtMessage& m1) = 0;
};

class Ot2Receiver {
 public:
  virtual ~Ot2Receiver() = default;
  virtual OtMessage receive(bool b) = 0;
};

// Trusted in-process party for the ideal functionality. Senders deposit
// pairs, receivers collect one entry of each pair in order.
class IdealOtHub {
 public:
  explicit IdealOtHub(std::chrono::milliseconds timeout = std::chrono::seconds(120)) : timeout_(timeout) {}
  void put(OtMessage m0, OtMessage m1);
  OtMessage take(bool b);

 private:
  std::mutex mu_;
  std::condition_variable cv_;
  std::deque<std::pair<OtMessage, OtMessage>> pending_;
  std::chrono::milliseconds timeout_;
};

// Everything the sender observes: its own submissions, in order.
struct SenderView {
  Bytes trace;
  std::size_t transfers = 0;
  friend bool operator==(const SenderView&, const SenderView&) = default;
};

class IdealOt2Sender : public Ot2Sender {
 public:
  explicit IdealOt2Sender(IdealOtHub& hub) : hub_(hub) {}
  void send(const OtMessage& m0, const OtMessage& m1) override;
  const SenderView& view() const { return view_; }

 private:
  IdealOtHub& hub_;
  SenderView view_;
};

class IdealOt2Receiver : public Ot2Receiver {
 public:
  explicit IdealOt2Receiver(IdealOtHub& hub) : hub_(hub) {}
  OtMessage receive(bool b) override { return hub_.take(b); }

 private:
  IdealOtHub& hub_;
};

// One-of-c transfer through c-1 one-of-two transfers.
void ot_c_of_1_send(const MessageGroup& group, std::span<const OtMessage> secrets, Ot2Sender& backend, Rng& rng);
OtMessage ot_c_of_1_receive(const MessageGroup& group, std::size_t i, std::size_t c, Ot2Receiver& backend);

enum class OtBackend { ideal, bounded_storage };

// Runs both roles in process and returns a_i.
OtMessage ot_c_of_1(const MessageGroup& group, std::span<const OtMessage> secrets, std::size_t i, OtBackend backend,
                    Rng& rng);

}  // namespace infocommit
