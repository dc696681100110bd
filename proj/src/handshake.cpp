#include "sentrybus/handshake.hpp"

#include "sentrybus/errors.hpp"
#include "sentrybus/tlv.hpp"

namespace sentrybus::handshake {

namespace {

constexpr uint8_t kTagKind = 0x20;
constexpr uint8_t kTagCert = 0x21;
constexpr uint8_t kTagAgreement = 0x22;
constexpr uint8_t kTagNonce1 = 0x23;
constexpr uint8_t kTagNonce2 = 0x24;
constexpr uint8_t kTagSignature = 0x25;

const char kMasterInfo[] = "sentrybus-master-v1";

std::array<uint8_t, kNonceLen> fresh_nonce(crypto::HmacDrbg& drbg) {
  Bytes raw = drbg.generate(kNonceLen);
  std::array<uint8_t, kNonceLen> nonce{};
  std::copy(raw.begin(), raw.end(), nonce.begin());
  return nonce;
}

Bytes derive_master(ByteView shared, const std::array<uint8_t, kNonceLen>& initiator_nonce,
                    const std::array<uint8_t, kNonceLen>& responder_nonce) {
  Bytes salt;
  salt.reserve(2 * kNonceLen);
  append(salt, ByteView(initiator_nonce.data(), kNonceLen));
  append(salt, ByteView(responder_nonce.data(), kNonceLen));
  ByteView info(reinterpret_cast<const uint8_t*>(kMasterInfo), sizeof(kMasterInfo) - 1);
  return crypto::hkdf_sha256(shared, salt, info, kMasterSecretLen);
}

bool verify_message_signature(const identity::Certificate& cert, const HandshakeMessage& msg) {
  try {
    return crypto::ecdsa_verify(cert.signing_public, msg.to_be_signed(), msg.signature);
  } catch (const Error& e) {
    if (e.code() == Errc::MalformedSignature) return false;
    throw;
  }
}

// The sender's key-agreement value must match the session mode: Static pins
// the certificate key, Ephemeral forbids reusing it.
void check_mode_consistency(FsMode mode, const identity::Certificate& cert,
                            const Bytes& agreement_public) {
  if (mode == FsMode::Static) {
    if (!cert.long_term_agreement_public) {
      throw Error(Errc::MalformedMessage, "static mode needs a certificate agreement key");
    }
    if (*cert.long_term_agreement_public != agreement_public) {
      throw Error(Errc::MalformedMessage, "static mode key differs from certificate");
    }
  } else {
    if (cert.long_term_agreement_public &&
        *cert.long_term_agreement_public == agreement_public) {
      throw Error(Errc::MalformedMessage, "ephemeral mode reused the certificate key");
    }
  }
}

crypto::KeyAgreementKeypair local_agreement_for(const HandshakeConfig& cfg,
                                                crypto::HmacDrbg& drbg) {
  const identity::ParticipantIdentity& id = *cfg.identity;
  if (cfg.fs_mode == FsMode::Static) {
    if (!id.long_term_agreement_private || !id.certificate.long_term_agreement_public) {
      throw Error(Errc::ModeIdentityMismatch, "identity has no long-term agreement key");
    }
    crypto::KeyAgreementKeypair kp;
    kp.suite = cfg.suite;
    kp.private_scalar = *id.long_term_agreement_private;
    kp.public_value = *id.certificate.long_term_agreement_public;
    kp.modp = cfg.modp_group;
    return kp;
  }
  if (cfg.suite == crypto::Suite::DhModp2048_256 && cfg.modp_group != nullptr) {
    return crypto::modp_generate(*cfg.modp_group, drbg);
  }
  return crypto::keyagree_generate(cfg.suite, drbg);
}

void validate_peer_certificate(const HandshakeConfig& cfg, const HandshakeMessage& msg) {
  if (!msg.sender_cert) throw Error(Errc::MalformedMessage, "missing certificate");
  if (!identity::verify_chain(*msg.sender_cert, *cfg.trusted_root)) {
    throw Error(Errc::CertificateRejected, "chain does not verify against trusted root");
  }
  if (msg.sender_cert->suite != cfg.suite) {
    throw Error(Errc::SuiteMismatch, "peer certificate pins a different suite");
  }
  if (!verify_message_signature(*msg.sender_cert, msg)) {
    throw Error(Errc::BadSignature, "handshake message signature invalid");
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Message codec

Bytes HandshakeMessage::to_be_signed() const {
  Bytes out;
  uint8_t kind_byte = static_cast<uint8_t>(kind);
  tlv::put(out, kTagKind, ByteView(&kind_byte, 1));
  if (sender_cert) tlv::put(out, kTagCert, sender_cert->encode());
  if (kind != MsgKind::Final) tlv::put(out, kTagAgreement, agreement_public);
  tlv::put(out, kTagNonce1, ByteView(nonce1.data(), nonce1.size()));
  if (nonce2) tlv::put(out, kTagNonce2, ByteView(nonce2->data(), nonce2->size()));
  return out;
}

Bytes HandshakeMessage::encode() const {
  Bytes out = to_be_signed();
  tlv::put(out, kTagSignature, signature);
  return out;
}

std::optional<HandshakeMessage> HandshakeMessage::decode(ByteView data) {
  tlv::Reader r(data);
  HandshakeMessage msg;

  auto kind = r.expect(kTagKind);
  if (!kind || kind->size() != 1) return std::nullopt;
  uint8_t k = (*kind)[0];
  if (k < 1 || k > 3) return std::nullopt;
  msg.kind = static_cast<MsgKind>(k);

  const bool with_cert = msg.kind != MsgKind::Final;
  if (with_cert) {
    auto cert = r.expect(kTagCert);
    if (!cert) return std::nullopt;
    auto parsed = identity::Certificate::decode(*cert);
    if (!parsed) return std::nullopt;
    msg.sender_cert = std::move(*parsed);

    auto agreement = r.expect(kTagAgreement);
    if (!agreement || agreement->empty()) return std::nullopt;
    msg.agreement_public = to_bytes(*agreement);
  }

  auto n1 = r.expect(kTagNonce1);
  if (!n1 || n1->size() != kNonceLen) return std::nullopt;
  std::copy(n1->begin(), n1->end(), msg.nonce1.begin());

  if (msg.kind != MsgKind::Request) {
    auto n2 = r.expect(kTagNonce2);
    if (!n2 || n2->size() != kNonceLen) return std::nullopt;
    std::array<uint8_t, kNonceLen> nonce2{};
    std::copy(n2->begin(), n2->end(), nonce2.begin());
    msg.nonce2 = nonce2;
  }

  auto sig = r.expect(kTagSignature);
  if (!sig || sig->empty()) return std::nullopt;
  msg.signature = to_bytes(*sig);

  if (!r.done()) return std::nullopt;
  return msg;
}

// ---------------------------------------------------------------------------
// Session accessors

const Bytes& HandshakeSession::master_secret() const {
  if (state_ != State::Established) throw Error(Errc::StateError, "no master secret yet");
  return master_secret_;
}

const Bytes& HandshakeSession::shared_secret() const {
  if (shared_secret_.empty()) throw Error(Errc::StateError, "no shared secret yet");
  return shared_secret_;
}

const identity::Certificate& HandshakeSession::peer_certificate() const {
  if (!peer_cert_) throw Error(Errc::StateError, "peer certificate not established");
  return *peer_cert_;
}

// ---------------------------------------------------------------------------
// State machine

std::pair<HandshakeSession, Bytes> begin_request(const HandshakeConfig& cfg,
                                                 crypto::HmacDrbg& drbg) {
  HandshakeSession s;
  s.cfg_ = cfg;
  s.role_ = Role::Initiator;
  s.local_agreement_ = local_agreement_for(cfg, drbg);
  s.local_nonce_ = fresh_nonce(drbg);

  HandshakeMessage msg;
  msg.kind = MsgKind::Request;
  msg.sender_cert = cfg.identity->certificate;
  msg.agreement_public = s.local_agreement_.public_value;
  msg.nonce1 = s.local_nonce_;
  msg.signature = crypto::ecdsa_sign(cfg.identity->signing_private, msg.to_be_signed());

  Bytes encoded = msg.encode();
  s.transcript_.push_back(encoded);
  s.state_ = State::AwaitingReply;
  return {std::move(s), std::move(encoded)};
}

std::pair<HandshakeSession, Bytes> process_request(const HandshakeConfig& cfg,
                                                   crypto::HmacDrbg& drbg, ByteView request) {
  auto msg = HandshakeMessage::decode(request);
  if (!msg) throw Error(Errc::MalformedMessage, "undecodable request");
  if (msg->kind != MsgKind::Request) throw Error(Errc::StateError, "expected a Request");

  validate_peer_certificate(cfg, *msg);
  check_mode_consistency(cfg.fs_mode, *msg->sender_cert, msg->agreement_public);

  HandshakeSession s;
  s.cfg_ = cfg;
  s.role_ = Role::Responder;
  s.peer_cert_ = msg->sender_cert;
  s.peer_agreement_public_ = msg->agreement_public;
  s.peer_nonce_ = msg->nonce1;
  s.local_agreement_ = local_agreement_for(cfg, drbg);
  s.local_nonce_ = fresh_nonce(drbg);

  // Reject an unusable key-agreement value before committing any state.
  try {
    s.shared_secret_ = crypto::keyagree_shared(s.local_agreement_, s.peer_agreement_public_);
  } catch (const Error& e) {
    if (e.code() == Errc::InvalidPeerPublic) {
      throw Error(Errc::MalformedMessage, "request carries an invalid group element");
    }
    throw;
  }

  HandshakeMessage reply;
  reply.kind = MsgKind::Reply;
  reply.sender_cert = cfg.identity->certificate;
  reply.agreement_public = s.local_agreement_.public_value;
  reply.nonce1 = msg->nonce1;  // echo of the initiator nonce
  reply.nonce2 = s.local_nonce_;
  reply.signature = crypto::ecdsa_sign(cfg.identity->signing_private, reply.to_be_signed());

  Bytes encoded = reply.encode();
  s.transcript_.push_back(to_bytes(request));
  s.transcript_.push_back(encoded);
  s.state_ = State::AwaitingFinal;
  return {std::move(s), std::move(encoded)};
}

Bytes process_reply(HandshakeSession& s, ByteView reply) {
  if (s.state_ != State::AwaitingReply) {
    throw Error(Errc::StateError, "session not awaiting a Reply");
  }
  s.transcript_.push_back(to_bytes(reply));
  s.state_ = State::Failed;  // any early exit below leaves the session failed

  auto msg = HandshakeMessage::decode(reply);
  if (!msg) throw Error(Errc::MalformedMessage, "undecodable reply");
  if (msg->kind != MsgKind::Reply) throw Error(Errc::StateError, "expected a Reply");

  validate_peer_certificate(s.cfg_, *msg);
  if (msg->nonce1 != s.local_nonce_) {
    throw Error(Errc::NonceMismatch, "reply does not echo our nonce");
  }
  if (!msg->nonce2) throw Error(Errc::MalformedMessage, "reply missing responder nonce");
  check_mode_consistency(s.cfg_.fs_mode, *msg->sender_cert, msg->agreement_public);

  s.peer_cert_ = msg->sender_cert;
  s.peer_agreement_public_ = msg->agreement_public;
  s.peer_nonce_ = *msg->nonce2;
  s.shared_secret_ = crypto::keyagree_shared(s.local_agreement_, s.peer_agreement_public_);
  s.master_secret_ = derive_master(s.shared_secret_, s.local_nonce_, *s.peer_nonce_);

  HandshakeMessage fin;
  fin.kind = MsgKind::Final;
  fin.nonce1 = s.local_nonce_;
  fin.nonce2 = *s.peer_nonce_;
  fin.signature = crypto::ecdsa_sign(s.cfg_.identity->signing_private, fin.to_be_signed());

  Bytes encoded = fin.encode();
  s.transcript_.push_back(encoded);
  s.state_ = State::Established;
  return encoded;
}

Bytes process_final(HandshakeSession& s, ByteView final_msg) {
  if (s.state_ != State::AwaitingFinal) {
    throw Error(Errc::StateError, "session not awaiting a Final");
  }
  s.transcript_.push_back(to_bytes(final_msg));
  s.state_ = State::Failed;

  auto msg = HandshakeMessage::decode(final_msg);
  if (!msg) throw Error(Errc::MalformedMessage, "undecodable final");
  if (msg->kind != MsgKind::Final) throw Error(Errc::StateError, "expected a Final");

  if (!verify_message_signature(*s.peer_cert_, *msg)) {
    throw Error(Errc::BadSignature, "final signature invalid");
  }
  if (!msg->nonce2 || msg->nonce1 != *s.peer_nonce_ || *msg->nonce2 != s.local_nonce_) {
    throw Error(Errc::NonceMismatch, "final nonces do not match this session");
  }

  s.master_secret_ = derive_master(s.shared_secret_, *s.peer_nonce_, s.local_nonce_);
  s.state_ = State::Established;
  return s.master_secret_;
}

}  // namespace sentrybus::handshake
