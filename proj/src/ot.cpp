#include "infocommit/ot.hpp"

#include "infocommit/bs_ot.hpp"
#include "infocommit/errors.hpp"
#include "infocommit/transport.hpp"

namespace infocommit {

MessageGroup::MessageGroup(Field field, std::size_t length) : field_(std::move(field)), length_(length) {
  if (length_ == 0) throw DomainError("OT messages need at least one element");
}

OtMessage MessageGroup::encode(std::span<const Fe> elements) const {
  if (elements.size() != length_) {
    throw DimensionMismatch("message has " + std::to_string(elements.size()) + " elements, group expects " +
                            std::to_string(length_));
  }
  ByteWriter w;
  for (Fe e : elements) w.fe(field_, field_.element(e.v));
  return w.take();
}

std::vector<Fe> MessageGroup::decode(const OtMessage& m) const {
  if (m.size() != byte_length()) {
    throw DecodeError(DecodeError::Kind::malformed, "OT message of " + std::to_string(m.size()) +
                                                        " bytes, expected " + std::to_string(byte_length()));
  }
  ByteReader r(m);
  std::vector<Fe> out(length_);
  for (auto& e : out) e = r.fe(field_);
  return out;
}

OtMessage MessageGroup::add(const OtMessage& a, const OtMessage& b) const {
  auto x = decode(a);
  const auto y = decode(b);
  for (std::size_t i = 0; i < length_; ++i) x[i] = field_.add(x[i], y[i]);
  return encode(x);
}

OtMessage MessageGroup::sub(const OtMessage& a, const OtMessage& b) const {
  auto x = decode(a);
  const auto y = decode(b);
  for (std::size_t i = 0; i < length_; ++i) x[i] = field_.sub(x[i], y[i]);
  return encode(x);
}

OtMessage MessageGroup::zero() const { return encode(std::vector<Fe>(length_, Fe{0})); }

OtMessage MessageGroup::random(Rng& rng) const {
  std::vector<Fe> x(length_);
  for (auto& e : x) e = field_.sample(rng);
  return encode(x);
}

ReductionTable build_reduction_table(const MessageGroup& group, std::span<const OtMessage> secrets,
                                     std::span<const OtMessage> masks) {
  const std::size_t c = secrets.size();
  if (c < 2) throw DomainError("one-of-c transfer needs c >= 2, got " + std::to_string(c));
  if (masks.size() != c - 2) {
    throw DimensionMismatch("expected " + std::to_string(c - 2) + " masks, got " + std::to_string(masks.size()));
  }
  for (const auto& s : secrets) group.decode(s);

  ReductionTable t;
  t.masks.assign(masks.begin(), masks.end());
  if (c == 2) {
    t.row1 = {secrets[0]};
    t.row2 = {secrets[1]};
    return t;
  }
  t.row1.push_back(secrets[0]);
  t.row2.push_back(masks[0]);
  for (std::size_t j = 1; j + 2 < c; ++j) {
    t.row1.push_back(group.add(secrets[j], masks[j - 1]));
    t.row2.push_back(group.add(masks[j - 1], masks[j]));
  }
  t.row1.push_back(group.add(secrets[c - 2], masks[c - 3]));
  t.row2.push_back(group.add(secrets[c - 1], masks[c - 3]));
  return t;
}

ReductionTable build_reduction_table(const MessageGroup& group, std::span<const OtMessage> secrets, Rng& rng) {
  std::vector<OtMessage> masks;
  for (std::size_t j = 0; j + 2 < secrets.size(); ++j) masks.push_back(group.random(rng));
  return build_reduction_table(group, secrets, masks);
}

std::vector<Row> row_picks(std::size_t i, std::size_t c) {
  if (c < 2) throw DomainError("one-of-c transfer needs c >= 2");
  if (i >= c) throw DomainError("target index " + std::to_string(i) + " out of range for c = " + std::to_string(c));
  std::vector<Row> picks(c - 1, Row::second);
  if (i + 1 < c) picks[i] = Row::first;
  return picks;
}

OtMessage decode_c_of_1(const MessageGroup& group, std::span<const OtMessage> received, std::size_t i,
                        std::size_t c) {
  row_picks(i, c);
  if (received.size() != c - 1) {
    throw DimensionMismatch("expected " + std::to_string(c - 1) + " received messages, got " +
                            std::to_string(received.size()));
  }
  const std::size_t last = std::min(i, c - 2);
  OtMessage mask = group.zero();
  for (std::size_t j = 0; j < last; ++j) mask = group.sub(received[j], mask);
  return group.sub(received[last], mask);
}

OtMessage ideal_ot2(const OtMessage& m0, const OtMessage& m1, bool b) {
  if (m0.size() != m1.size()) throw DimensionMismatch("OT messages differ in length");
  return b ? m1 : m0;
}

void IdealOtHub::put(OtMessage m0, OtMessage m1) {
  if (m0.size() != m1.size()) throw DimensionMismatch("OT messages differ in length");
  std::lock_guard lock(mu_);
  pending_.emplace_back(std::move(m0), std::move(m1));
  cv_.notify_all();
}

OtMessage IdealOtHub::take(bool b) {
  std::unique_lock lock(mu_);
  if (!cv_.wait_for(lock, timeout_, [&] { return !pending_.empty(); })) {
    throw TransportError("ideal OT: no transfer arrived");
  }
  auto [m0, m1] = std::move(pending_.front());
  pending_.pop_front();
  return ideal_ot2(m0, m1, b);
}

void IdealOt2Sender::send(const OtMessage& m0, const OtMessage& m1) {
  ByteWriter w;
  w.blob(m0);
  w.blob(m1);
  const Bytes entry = w.take();
  view_.trace.insert(view_.trace.end(), entry.begin(), entry.end());
  ++view_.transfers;
  hub_.put(m0, m1);
}

void ot_c_of_1_send(const MessageGroup& group, std::span<const OtMessage> secrets, Ot2Sender& backend, Rng& rng) {
  const ReductionTable table = build_reduction_table(group, secrets, rng);
  for (std::size_t j = 0; j < table.columns(); ++j) backend.send(table.row1[j], table.row2[j]);
}

OtMessage ot_c_of_1_receive(const MessageGroup& group, std::size_t i, std::size_t c, Ot2Receiver& backend) {
  std::vector<OtMessage> received;
  for (Row r : row_picks(i, c)) received.push_back(backend.receive(r == Row::second));
  return decode_c_of_1(group, received, i, c);
}

OtMessage ot_c_of_1(const MessageGroup& group, std::span<const OtMessage> secrets, std::size_t i, OtBackend backend,
                    Rng& rng) {
  row_picks(i, secrets.size());
  if (backend == OtBackend::ideal) {
    IdealOtHub hub;
    IdealOt2Sender sender(hub);
    IdealOt2Receiver receiver(hub);
    ot_c_of_1_send(group, secrets, sender, rng);
    return ot_c_of_1_receive(group, i, secrets.size(), receiver);
  }
  const BsOtParams params = BsOtParams::desk_default();
  Rng sender_rng(rng.fork_seed());
  Rng table_rng(rng.fork_seed());
  Rng receiver_rng(rng.fork_seed());
  return run_pair(
      [&](Transport& t) {
        BsOt2Sender sender(t, params, sender_rng);
        ot_c_of_1_send(group, secrets, sender, table_rng);
      },
      [&](Transport& t) {
        BsOt2Receiver receiver(t, params, receiver_rng);
        return ot_c_of_1_receive(group, i, secrets.size(), receiver);
      });
}

}  // namespace infocommit
