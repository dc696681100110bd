#ifndef SENTRYBUS_PUBSUB_HPP
#define SENTRYBUS_PUBSUB_HPP

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <variant>

#include "sentrybus/bytes.hpp"
#include "sentrybus/frame.hpp"
#include "sentrybus/handshake.hpp"
#include "sentrybus/identity.hpp"
#include "sentrybus/session.hpp"

namespace sentrybus::pubsub {

struct NoSecurity {};

struct CryptoSecurity {
  crypto::Suite suite = crypto::Suite::EcdhP256;
  handshake::FsMode fs_mode = handshake::FsMode::Ephemeral;
};

struct TunnelSecurity {
  std::array<uint8_t, 16> cipher_key{};  // AES-128-CBC
  std::array<uint8_t, 32> mac_key{};     // HMAC-SHA256
};

using SecurityProfile = std::variant<NoSecurity, CryptoSecurity, TunnelSecurity>;

const char* profile_label(const SecurityProfile& profile);  // none | crypto | tunnel

// Outer topic of tunnel DATA frames; the real topic rides inside the
// encrypted inner frame, mirroring how a VPN hides the tunneled packet.
inline const char kTunnelTopic[] = "~";

struct ParticipantConfig {
  std::string name;
  std::string bind_address = "127.0.0.1:0";
  SecurityProfile profile = NoSecurity{};
  std::optional<identity::ParticipantIdentity> identity;  // required for Crypto
  std::optional<identity::Certificate> trusted_root;      // required for Crypto
  bool attach_receiver_tags = false;
  std::chrono::milliseconds handshake_timeout{2000};
  int handshake_retries = 3;
};

struct CounterSnapshot {
  uint64_t delivered = 0;
  uint64_t malformed = 0;
  uint64_t auth_failed = 0;
  uint64_t replayed = 0;
  uint64_t no_subscription = 0;
  uint64_t handshake_errors = 0;
};

// One UDP endpoint. A participant is shared between its receive loop and one
// sending context; internal tables are synchronized.
class Participant {
 public:
  // Throws Error(BindFailure) or Error(ProfileConfigError).
  explicit Participant(ParticipantConfig cfg);
  ~Participant();

  Participant(const Participant&) = delete;
  Participant& operator=(const Participant&) = delete;

  void start();  // spawn the receive loop on a background thread
  void stop();
  void run_receive_loop();  // blocking variant; returns after stop()

  // None/Tunnel: records the peer address. Crypto: runs the three-message
  // handshake and derives session keys; throws Error(HandshakeFailed) or
  // Error(Timeout).
  void connect(const std::string& peer_name, const std::string& peer_address);

  // One datagram per peer; returns the bytes on the wire per datagram.
  size_t publish(const std::string& topic, ByteView payload);

  using Handler = std::function<void(const Bytes& payload)>;
  void subscribe(const std::string& topic, Handler handler);

  CounterSnapshot counters() const;
  const std::string& name() const { return cfg_.name; }
  uint16_t port() const { return port_; }
  std::string address() const;
  size_t peer_count() const;

  // Session key material for an established crypto peer (for diagnostics
  // and tests); nullptr when absent.
  session::SessionKeyMaterial* session_for(const std::string& peer_name);

  // Test hook: outgoing datagrams for which this returns false are dropped
  // before the socket, emulating a lossy transport.
  void set_test_send_filter(std::function<bool(ByteView)> filter);

 private:
  struct Peer;

  void handle_datagram(ByteView data, uint32_t src_ip, uint16_t src_port);
  void handle_handshake(const frame::Frame& f, ByteView datagram, uint32_t src_ip,
                        uint16_t src_port);
  void handle_data(const frame::Frame& f, ByteView datagram, uint32_t src_ip, uint16_t src_port);
  void deliver(const std::string& topic, const Bytes& payload);
  void send_to(const Peer& peer, ByteView datagram);
  handshake::HandshakeConfig handshake_config() const;
  std::shared_ptr<Peer> peer_by_addr(uint32_t ip, uint16_t port);
  std::shared_ptr<Peer> ensure_peer(const std::string& name, uint32_t ip, uint16_t port);

  ParticipantConfig cfg_;
  int fd_ = -1;
  uint16_t port_ = 0;
  std::atomic<bool> stop_requested_{false};
  std::atomic<bool> loop_running_{false};
  std::thread thread_;

  mutable std::mutex mu_;  // peers_, by_addr_, by_session_, subscriptions_
  std::map<std::string, std::shared_ptr<Peer>> peers_;
  std::map<uint64_t, std::shared_ptr<Peer>> by_addr_;
  std::map<uint64_t, std::shared_ptr<Peer>> by_session_;
  std::map<std::string, Handler> subscriptions_;

  std::mutex drbg_mu_;
  crypto::HmacDrbg drbg_;

  std::atomic<uint32_t> sequence_{0};

  std::atomic<uint64_t> delivered_{0};
  std::atomic<uint64_t> malformed_{0};
  std::atomic<uint64_t> auth_failed_{0};
  std::atomic<uint64_t> replayed_{0};
  std::atomic<uint64_t> no_subscription_{0};
  std::atomic<uint64_t> handshake_errors_{0};

  std::mutex send_filter_mu_;
  std::function<bool(ByteView)> test_send_filter_;
};

}  // namespace sentrybus::pubsub

#endif
