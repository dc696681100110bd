#ifndef SENTRYBUS_HANDSHAKE_HPP
#define SENTRYBUS_HANDSHAKE_HPP

#include <array>
#include <optional>
#include <utility>
#include <vector>

#include "sentrybus/bytes.hpp"
#include "sentrybus/crypto.hpp"
#include "sentrybus/identity.hpp"

namespace sentrybus::handshake {

// Static pins the key-agreement value from the certificate (no forward
// secrecy); Ephemeral generates a fresh keypair per session.
enum class FsMode : uint8_t { Static = 0, Ephemeral = 1 };

enum class Role { Initiator, Responder };

enum class State { Idle, AwaitingReply, AwaitingFinal, Established, Failed };

enum class MsgKind : uint8_t { Request = 1, Reply = 2, Final = 3 };

constexpr size_t kNonceLen = 32;
constexpr size_t kMasterSecretLen = 32;

struct HandshakeMessage {
  MsgKind kind;
  std::optional<identity::Certificate> sender_cert;  // Request/Reply
  Bytes agreement_public;                            // Request/Reply
  std::array<uint8_t, kNonceLen> nonce1{};
  std::optional<std::array<uint8_t, kNonceLen>> nonce2;  // Reply/Final
  Bytes signature;  // ECDSA over the encoded fields above, in order

  Bytes to_be_signed() const;
  Bytes encode() const;
  static std::optional<HandshakeMessage> decode(ByteView data);
};

struct HandshakeConfig {
  const identity::ParticipantIdentity* identity = nullptr;
  const identity::Certificate* trusted_root = nullptr;
  crypto::Suite suite = crypto::Suite::EcdhP256;
  FsMode fs_mode = FsMode::Ephemeral;
  // Test hook: substitute MODP group parameters. Never set on a wire path.
  const crypto::ModpGroup* modp_group = nullptr;
};

class HandshakeSession {
 public:
  Role role() const { return role_; }
  State state() const { return state_; }
  crypto::Suite suite() const { return cfg_.suite; }
  FsMode fs_mode() const { return cfg_.fs_mode; }

  // Established-only accessors (throw Error(StateError) otherwise).
  const Bytes& master_secret() const;
  const Bytes& shared_secret() const;  // pre-KDF key-agreement output

  const identity::Certificate& peer_certificate() const;
  const std::vector<Bytes>& transcript() const { return transcript_; }
  const std::array<uint8_t, kNonceLen>& local_nonce() const { return local_nonce_; }

 private:
  friend std::pair<HandshakeSession, Bytes> begin_request(const HandshakeConfig&,
                                                          crypto::HmacDrbg&);
  friend std::pair<HandshakeSession, Bytes> process_request(const HandshakeConfig&,
                                                            crypto::HmacDrbg&, ByteView);
  friend Bytes process_reply(HandshakeSession&, ByteView);
  friend Bytes process_final(HandshakeSession&, ByteView);

  HandshakeConfig cfg_;
  Role role_ = Role::Initiator;
  State state_ = State::Idle;
  std::array<uint8_t, kNonceLen> local_nonce_{};
  std::optional<std::array<uint8_t, kNonceLen>> peer_nonce_;
  crypto::KeyAgreementKeypair local_agreement_;
  Bytes peer_agreement_public_;
  std::optional<identity::Certificate> peer_cert_;
  std::vector<Bytes> transcript_;
  Bytes shared_secret_;
  Bytes master_secret_;
};

// Initiator: build a session and the Request to send.
// Throws Error(ModeIdentityMismatch) when the identity lacks what the mode needs.
std::pair<HandshakeSession, Bytes> begin_request(const HandshakeConfig& cfg,
                                                 crypto::HmacDrbg& drbg);

// Responder: validate a Request, build a session and the Reply to send.
std::pair<HandshakeSession, Bytes> process_request(const HandshakeConfig& cfg,
                                                   crypto::HmacDrbg& drbg, ByteView request);

// Initiator: validate the Reply; on success the session is Established and
// the returned bytes are the Final to send.
Bytes process_reply(HandshakeSession& session, ByteView reply);

// Responder: validate the Final; on success the session is Established.
// Returns the 32-byte master secret.
Bytes process_final(HandshakeSession& session, ByteView final_msg);

}  // namespace sentrybus::handshake

#endif
