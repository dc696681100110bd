#ifndef SENTRYBUS_SESSION_HPP
#define SENTRYBUS_SESSION_HPP

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sentrybus/bytes.hpp"
#include "sentrybus/crypto.hpp"
#include "sentrybus/handshake.hpp"

namespace sentrybus::session {

constexpr size_t kIvPrefixLen = 8;
constexpr size_t kIvLen = 12;  // prefix || 32-bit big-endian counter
constexpr size_t kTagLen = 16;
constexpr size_t kGmacKeyLen = 16;
constexpr size_t kReplayWindow = 64;

struct ProtectedRecord {
  std::array<uint8_t, kIvLen> iv{};
  Bytes ciphertext;
  std::array<uint8_t, kTagLen> tag{};
  std::vector<std::pair<std::string, std::array<uint8_t, kTagLen>>> receiver_tags;
};

// Directional keys and counters derived from one handshake's master secret.
// Send and receive paths each belong to exactly one execution context.
class SessionKeyMaterial {
 public:
  static SessionKeyMaterial derive(ByteView master_secret, handshake::Role role,
                                   const std::vector<std::string>& receiver_names);

  uint64_t session_id() const { return session_id_; }
  uint32_t send_counter() const { return send_counter_; }
  const Bytes& send_key() const { return send_key_; }
  const Bytes& recv_key() const { return recv_key_; }
  const std::array<uint8_t, kIvPrefixLen>& send_iv_prefix() const { return send_iv_prefix_; }
  const std::array<uint8_t, kIvPrefixLen>& recv_iv_prefix() const { return recv_iv_prefix_; }
  const std::map<std::string, Bytes>& receiver_mac_keys() const { return receiver_mac_keys_; }

  // ivPrefix || counter; consumes one counter value.
  // Throws Error(CounterExhausted) once the counter space is spent.
  std::array<uint8_t, kIvLen> next_iv();

  // Seals payload under the send key; per-receiver GMAC tags cover the
  // ciphertext. Throws Error(UnknownReceiver) for names without a MAC key.
  ProtectedRecord protect(ByteView aad, ByteView payload,
                          const std::vector<std::string>& receivers = {});

  // Verifies and decrypts; enforces the peer IV prefix, the replay window,
  // and (when my_name matches a carried tag) the receiver-specific GMAC.
  // Replay state only advances after full verification.
  Bytes unprotect(ByteView aad, const ProtectedRecord& record,
                  const std::optional<std::string>& my_name = std::nullopt);

  // Test hook for exercising the counter-exhaustion boundary.
  void set_send_counter_for_tests(uint32_t value) { send_counter_ = value; }

 private:
  uint64_t session_id_ = 0;
  Bytes send_key_;
  Bytes recv_key_;
  std::array<uint8_t, kIvPrefixLen> send_iv_prefix_{};
  std::array<uint8_t, kIvPrefixLen> recv_iv_prefix_{};
  uint32_t send_counter_ = 0;
  std::map<std::string, Bytes> receiver_mac_keys_;

  // Sliding bitmap over the highest received counter.
  bool replay_seen_any_ = false;
  uint32_t replay_highest_ = 0;
  uint64_t replay_bitmap_ = 0;

  bool replay_check(uint32_t counter) const;  // true if acceptable
  void replay_commit(uint32_t counter);
};

}  // namespace sentrybus::session

#endif
