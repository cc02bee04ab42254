#include "infocommit/session.hpp"

#include "infocommit/errors.hpp"

namespace infocommit {

namespace {

constexpr std::uint16_t kConfigWireVersion = 1;

bool same_parameters(const ProtocolConfig& a, const ProtocolConfig& b) {
  return a.field == b.field && a.d == b.d && a.r == b.r && a.c == b.c && a.xi == b.xi && a.S == b.S;
}

Frame abort_frame(AbortCode code, const std::string& reason) {
  ByteWriter w;
  w.u8(static_cast<std::uint8_t>(code));
  w.str(reason);
  return {FrameTag::abort, w.take()};
}

// Runs `body`, and on a local failure tells the peer why before rethrowing.
template <typename Body>
auto with_abort(Transport& transport, Body&& body) {
  try {
    return body();
  } catch (const ProtocolError& e) {
    if (e.code() != ProtocolError::Code::aborted) send_abort(transport, abort_code_for(e), e.what());
    throw;
  } catch (const DecodeError& e) {
    send_abort(transport, AbortCode::malformed, e.what());
    throw;
  } catch (const TransportError&) {
    throw;
  } catch (const Error& e) {
    send_abort(transport, AbortCode::aborted, e.what());
    throw;
  }
}

ProtocolError peer_aborted(const Frame& f) {
  ByteReader r(f.payload);
  const auto code = r.u8();
  const std::string reason = r.remaining() ? r.str() : std::string();
  return ProtocolError(ProtocolError::Code::aborted,
                       "peer aborted the session (code " + std::to_string(code) + "): " + reason);
}

}  // namespace

Bytes encode_config(const ProtocolConfig& config) {
  ByteWriter w;
  w.u16(kConfigWireVersion);
  const Field& f = config.field;
  if (f.kind() == Field::Kind::prime) {
    w.u8(0);
    w.u64(f.order());
  } else {
    w.u8(1);
    w.u16(static_cast<std::uint16_t>(f.order()));
    w.raw(f.add_table());
    w.raw(f.mul_table());
  }
  w.u64(config.d);
  w.u64(config.r);
  w.u64(config.c);
  w.fe(f, config.xi);
  w.u64(config.query_soft_cap);
  return w.take();
}

ProtocolConfig decode_config(ByteReader& r) {
  const auto version = r.u16();
  if (version != kConfigWireVersion) {
    throw DecodeError(DecodeError::Kind::version, "unsupported config encoding version " + std::to_string(version));
  }
  const auto kind = r.u8();
  std::optional<Field> field;
  try {
    if (kind == 0) {
      field = Field::prime(r.u64());
    } else if (kind == 1) {
      const std::size_t q = r.u16();
      auto add = r.raw(q * q);
      auto mul = r.raw(q * q);
      field = Field::table(q, std::move(add), std::move(mul));
    } else {
      throw DecodeError(DecodeError::Kind::malformed, "unknown field kind " + std::to_string(kind));
    }
  } catch (const ConfigError& e) {
    throw DecodeError(DecodeError::Kind::malformed, e.what());
  }
  const auto d = r.u64();
  const auto rr = r.u64();
  const auto c = r.u64();
  const Fe xi = r.fe(*field);
  const auto cap = r.u64();
  return ProtocolConfig::make(*field, d, rr, c, xi, cap);
}

Bytes encode_response(const Field& field, const EvalResponse& response) {
  ByteWriter w;
  w.fes(field, response.v);
  w.fes(field, response.u);
  return w.take();
}

EvalResponse decode_response(const Field& field, ByteReader& r) {
  EvalResponse out;
  out.v = r.fes(field);
  out.u = r.fes(field);
  return out;
}

void send_abort(Transport& transport, AbortCode code, const std::string& reason) {
  try {
    transport.send(abort_frame(code, reason));
  } catch (const TransportError&) {
  }
}

AbortCode abort_code_for(const ProtocolError& e) {
  switch (e.code()) {
    case ProtocolError::Code::order_violation:
      return AbortCode::order_violation;
    case ProtocolError::Code::refusal:
      return AbortCode::refusal;
    case ProtocolError::Code::malformed:
      return AbortCode::malformed;
    case ProtocolError::Code::aborted:
      return AbortCode::aborted;
  }
  return AbortCode::aborted;
}

ProverSessionResult run_prover(Transport& transport, Prover& prover, const OtChannel& ot, Rng& ot_rng) {
  return with_abort(transport, [&] {
    const ProtocolConfig& config = prover.config();
    {
      const Frame f = transport.expect(FrameTag::negotiate);
      ByteReader r(f.payload);
      const ProtocolConfig theirs = decode_config(r);
      r.expect_end();
      if (!same_parameters(theirs, config)) {
        send_abort(transport, AbortCode::config_mismatch, "negotiated parameters differ");
        throw ProtocolError(ProtocolError::Code::aborted, "verifier proposed different parameters");
      }
      ByteWriter w;
      w.fes(config.field, config.S);
      transport.send({FrameTag::set_agree, w.take()});
    }

    if (ot.backend == OtBackend::ideal) {
      if (ot.hub == nullptr) throw ConfigError("the ideal OT backend needs an in-process hub");
      IdealOt2Sender sender(*ot.hub);
      commit_prover(transport, prover.a(), prover.key(), config, sender, ot_rng);
    } else {
      BsOt2Sender sender(transport, ot.bs, Rng(ot_rng.fork_seed()));
      commit_prover(transport, prover.a(), prover.key(), config, sender, ot_rng);
    }

    ProverSessionResult result;
    for (;;) {
      const Frame f = transport.recv();
      if (f.tag == FrameTag::abort) {
        ByteReader r(f.payload);
        if (r.u8() == static_cast<std::uint8_t>(AbortCode::done)) break;
        throw peer_aborted(f);
      }
      if (f.tag != FrameTag::eval_req) {
        throw ProtocolError(ProtocolError::Code::order_violation,
                            "expected EVAL_REQ or ABORT, got " + std::string(tag_name(f.tag)));
      }
      ByteReader r(f.payload);
      const Fe x = r.fe(config.field);
      r.expect_end();
      ByteWriter w;
      try {
        const EvalResponse resp = prover.answer(x);
        w.u8(0);
        w.raw(encode_response(config.field, resp));
      } catch (const ProtocolError& e) {
        if (e.code() != ProtocolError::Code::refusal) throw;
        ++result.refused;
        w.u8(1);
        w.str(e.what());
      }
      transport.send({FrameTag::eval_resp, w.take()});
      const Frame verdict = transport.expect(FrameTag::verdict);
      ByteReader vr(verdict.payload);
      vr.u8();
      vr.u8();
      vr.expect_end();
    }
    result.answered = prover.answered();
    result.duplicates = prover.duplicates();
    return result;
  });
}

bool VerifierSessionResult::all_accepted() const {
  for (const auto& q : queries)
    if (!q.refused && !q.accepted) return false;
  return true;
}

VerificationKey verifier_open(Transport& transport, const ProtocolConfig& config, const VerifierKey& kv,
                              const OtChannel& ot, Rng& ot_rng) {
  return with_abort(transport, [&] {
    transport.send({FrameTag::negotiate, encode_config(config)});
    const Frame f = transport.expect(FrameTag::set_agree);
    ByteReader r(f.payload);
    const auto S = r.fes(config.field);
    r.expect_end();
    if (S != config.S) {
      send_abort(transport, AbortCode::config_mismatch, "prohibited set differs");
      throw ProtocolError(ProtocolError::Code::aborted, "prover agreed to a different prohibited set");
    }
    if (ot.backend == OtBackend::ideal) {
      if (ot.hub == nullptr) throw ConfigError("the ideal OT backend needs an in-process hub");
      IdealOt2Receiver receiver(*ot.hub);
      return commit_verifier(transport, kv, config, receiver);
    }
    BsOt2Receiver receiver(transport, ot.bs, Rng(ot_rng.fork_seed()));
    return commit_verifier(transport, kv, config, receiver);
  });
}

QueryOutcome verifier_query(Transport& transport, Verifier& verifier, Fe x, Tamper tamper) {
  return with_abort(transport, [&] {
    const Field& field = verifier.config().field;
    ByteWriter req;
    req.fe(field, field.element(x.v));
    transport.send({FrameTag::eval_req, req.take()});
    const Frame f = transport.expect(FrameTag::eval_resp);
    ByteReader r(f.payload);
    QueryOutcome out;
    const auto status = r.u8();
    if (status == 1) {
      out.x = x;
      out.refused = true;
      out.diagnostic = r.str();
      r.expect_end();
    } else if (status == 0) {
      EvalResponse resp = decode_response(field, r);
      r.expect_end();
      if (tamper == Tamper::v && !resp.v.empty()) resp.v[0] = field.add(resp.v[0], field.one());
      if (tamper == Tamper::u && !resp.u.empty()) resp.u[0] = field.add(resp.u[0], field.one());
      out = verifier.check(x, resp);
    } else {
      throw ProtocolError(ProtocolError::Code::malformed, "unknown EVAL_RESP status " + std::to_string(status));
    }
    ByteWriter w;
    w.u8(out.accepted ? 1 : 0);
    w.u8(out.duplicate ? 1 : 0);
    transport.send({FrameTag::verdict, w.take()});
    return out;
  });
}

void verifier_close(Transport& transport) { transport.send(abort_frame(AbortCode::done, "")); }

VerifierSessionResult run_verifier(Transport& transport, const ProtocolConfig& config, const VerifierKey& kv,
                                   std::span<const Fe> queries, const VerifierOptions& options, Rng& ot_rng) {
  VerifierSessionResult result{verifier_open(transport, config, kv, options.ot, ot_rng), {}, {}};
  Verifier verifier(config, kv, result.vk);
  for (Fe x : queries) result.queries.push_back(verifier_query(transport, verifier, x, options.tamper));
  verifier_close(transport);
  result.warnings = verifier.warnings();
  return result;
}

InProcessRun run_in_process(const ProtocolConfig& config, const Polynomial& f, const ProverKey& kp,
                            const VerifierKey& kv, std::span<const Fe> queries, OtBackend backend,
                            Tamper tamper, std::uint64_t ot_seed) {
  IdealOtHub hub;
  OtChannel channel{backend, &hub, BsOtParams::desk_default()};
  Rng prover_rng = Rng::derive(ot_seed, "prover-ot");
  Rng verifier_rng = Rng::derive(ot_seed, "verifier-ot");
  Prover prover(config, f, kp);
  Transcript pt, vt;
  std::vector<bool> outgoing;
  ProverSessionResult prover_result;
  auto verifier_result = run_pair(
      [&](Transport& t) {
        RecordingTransport rec(t, pt);
        prover_result = run_prover(rec, prover, channel, prover_rng);
      },
      [&](Transport& t) {
        RecordingTransport rec(t, vt);
        VerifierOptions options{channel, tamper};
        auto result = run_verifier(rec, config, kv, queries, options, verifier_rng);
        outgoing = rec.outgoing();
        return result;
      });
  return {std::move(verifier_result), prover_result, std::move(pt), std::move(vt), std::move(outgoing)};
}

}  // namespace infocommit
