#include "sentrybus/pubsub.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cstring>

#include "sentrybus/errors.hpp"
#include "sentrybus/log.hpp"

namespace sentrybus::pubsub {

namespace {

struct Endpoint {
  uint32_t ip;  // network byte order
  uint16_t port;
};

Endpoint parse_endpoint(const std::string& address) {
  size_t colon = address.rfind(':');
  if (colon == std::string::npos) {
    throw Error(Errc::ProfileConfigError, "address must be ip:port, got " + address);
  }
  std::string host = address.substr(0, colon);
  int port = std::atoi(address.c_str() + colon + 1);
  if (port < 0 || port > 65535) {
    throw Error(Errc::ProfileConfigError, "bad port in " + address);
  }
  in_addr ip{};
  if (inet_pton(AF_INET, host.c_str(), &ip) != 1) {
    throw Error(Errc::ProfileConfigError, "bad IPv4 address " + host);
  }
  return {ip.s_addr, static_cast<uint16_t>(port)};
}

uint64_t addr_key(uint32_t ip, uint16_t port) {
  return (static_cast<uint64_t>(ip) << 16) | port;
}

std::string addr_string(uint32_t ip, uint16_t port) {
  char buf[INET_ADDRSTRLEN] = {};
  in_addr a{ip};
  inet_ntop(AF_INET, &a, buf, sizeof buf);
  return std::string(buf) + ":" + std::to_string(port);
}

}  // namespace

const char* profile_label(const SecurityProfile& profile) {
  if (std::holds_alternative<NoSecurity>(profile)) return "none";
  if (std::holds_alternative<CryptoSecurity>(profile)) return "crypto";
  return "tunnel";
}

struct Participant::Peer {
  std::string name;       // connect label or a synthetic name for learned peers
  std::string cert_name;  // subject of the peer certificate (crypto only)
  uint32_t ip = 0;
  uint16_t port = 0;

  std::optional<handshake::HandshakeSession> hs;
  std::unique_ptr<session::SessionKeyMaterial> skm;
  bool established = false;
  bool failed = false;
  std::string fail_reason;

  std::mutex send_mu;
  std::mutex recv_mu;
  std::mutex cv_mu;
  std::condition_variable cv;
};

Participant::Participant(ParticipantConfig cfg)
    : cfg_(std::move(cfg)), drbg_(crypto::HmacDrbg::from_os_entropy()) {
  if (std::holds_alternative<CryptoSecurity>(cfg_.profile)) {
    if (!cfg_.identity || !cfg_.trusted_root) {
      throw Error(Errc::ProfileConfigError, "crypto profile requires identity and trusted root");
    }
    const auto& sec = std::get<CryptoSecurity>(cfg_.profile);
    if (cfg_.identity->certificate.suite != sec.suite) {
      throw Error(Errc::ProfileConfigError, "identity certificate pins a different suite");
    }
    if (sec.fs_mode == handshake::FsMode::Static &&
        !cfg_.identity->long_term_agreement_private) {
      throw Error(Errc::ProfileConfigError, "static mode requires a long-term agreement key");
    }
  }

  Endpoint ep = parse_endpoint(cfg_.bind_address);
  fd_ = ::socket(AF_INET, SOCK_DGRAM, 0);
  if (fd_ < 0) throw Error(Errc::BindFailure, "socket() failed");

  int rcvbuf = 1 << 22;
  ::setsockopt(fd_, SOL_SOCKET, SO_RCVBUF, &rcvbuf, sizeof rcvbuf);

  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = ep.ip;
  addr.sin_port = htons(ep.port);
  if (::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) {
    ::close(fd_);
    fd_ = -1;
    throw Error(Errc::BindFailure, "cannot bind " + cfg_.bind_address);
  }
  socklen_t len = sizeof addr;
  ::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
}

Participant::~Participant() {
  stop();
  if (fd_ >= 0) ::close(fd_);
}

void Participant::start() {
  if (thread_.joinable()) return;
  thread_ = std::thread([this] { run_receive_loop(); });
}

void Participant::stop() {
  stop_requested_ = true;
  if (thread_.joinable()) thread_.join();
}

std::string Participant::address() const {
  size_t colon = cfg_.bind_address.rfind(':');
  return cfg_.bind_address.substr(0, colon) + ":" + std::to_string(port_);
}

size_t Participant::peer_count() const {
  std::lock_guard lock(mu_);
  return peers_.size();
}

CounterSnapshot Participant::counters() const {
  CounterSnapshot s;
  s.delivered = delivered_;
  s.malformed = malformed_;
  s.auth_failed = auth_failed_;
  s.replayed = replayed_;
  s.no_subscription = no_subscription_;
  s.handshake_errors = handshake_errors_;
  return s;
}

void Participant::set_test_send_filter(std::function<bool(ByteView)> filter) {
  std::lock_guard lock(send_filter_mu_);
  test_send_filter_ = std::move(filter);
}

void Participant::subscribe(const std::string& topic, Handler handler) {
  std::lock_guard lock(mu_);
  if (subscriptions_.count(topic) != 0) {
    throw Error(Errc::DuplicateSubscription, topic);
  }
  subscriptions_[topic] = std::move(handler);
}

session::SessionKeyMaterial* Participant::session_for(const std::string& peer_name) {
  std::lock_guard lock(mu_);
  auto it = peers_.find(peer_name);
  if (it == peers_.end()) return nullptr;
  return it->second->skm.get();
}

handshake::HandshakeConfig Participant::handshake_config() const {
  const auto& sec = std::get<CryptoSecurity>(cfg_.profile);
  handshake::HandshakeConfig hc;
  hc.identity = &*cfg_.identity;
  hc.trusted_root = &*cfg_.trusted_root;
  hc.suite = sec.suite;
  hc.fs_mode = sec.fs_mode;
  return hc;
}

std::shared_ptr<Participant::Peer> Participant::peer_by_addr(uint32_t ip, uint16_t port) {
  std::lock_guard lock(mu_);
  auto it = by_addr_.find(addr_key(ip, port));
  return it == by_addr_.end() ? nullptr : it->second;
}

std::shared_ptr<Participant::Peer> Participant::ensure_peer(const std::string& name, uint32_t ip,
                                                            uint16_t port) {
  std::lock_guard lock(mu_);
  auto it = by_addr_.find(addr_key(ip, port));
  if (it != by_addr_.end()) return it->second;
  auto peer = std::make_shared<Peer>();
  peer->name = name;
  peer->ip = ip;
  peer->port = port;
  peers_[name] = peer;
  by_addr_[addr_key(ip, port)] = peer;
  return peer;
}

void Participant::send_to(const Peer& peer, ByteView datagram) {
  {
    std::lock_guard lock(send_filter_mu_);
    if (test_send_filter_ && !test_send_filter_(datagram)) return;
  }
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = peer.ip;
  addr.sin_port = htons(peer.port);
  ::sendto(fd_, datagram.data(), datagram.size(), 0, reinterpret_cast<sockaddr*>(&addr),
           sizeof addr);
}

// ---------------------------------------------------------------------------
// Connect

void Participant::connect(const std::string& peer_name, const std::string& peer_address) {
  Endpoint ep = parse_endpoint(peer_address);
  auto peer = ensure_peer(peer_name, ep.ip, ep.port);

  if (!std::holds_alternative<CryptoSecurity>(cfg_.profile)) return;

  Bytes request;
  {
    std::lock_guard lock(drbg_mu_);
    auto [session, req] = handshake::begin_request(handshake_config(), drbg_);
    std::lock_guard plock(peer->cv_mu);
    peer->hs = std::move(session);
    peer->established = false;
    peer->failed = false;
    request = std::move(req);
  }

  frame::Frame f;
  f.kind = frame::Kind::HsReq;
  f.body = request;
  Bytes datagram = frame::encode(f);

  for (int attempt = 0; attempt < cfg_.handshake_retries; ++attempt) {
    send_to(*peer, datagram);
    std::unique_lock lock(peer->cv_mu);
    peer->cv.wait_for(lock, cfg_.handshake_timeout,
                      [&] { return peer->established || peer->failed; });
    if (peer->established) return;
    if (peer->failed) throw Error(Errc::HandshakeFailed, peer->fail_reason);
  }
  throw Error(Errc::Timeout, "no handshake reply from " + peer_address);
}

// ---------------------------------------------------------------------------
// Publish

size_t Participant::publish(const std::string& topic, ByteView payload) {
  std::vector<std::shared_ptr<Peer>> targets;
  {
    std::lock_guard lock(mu_);
    for (auto& [_, peer] : peers_) targets.push_back(peer);
  }

  if (std::holds_alternative<NoSecurity>(cfg_.profile)) {
    if (targets.empty()) throw Error(Errc::NotConnected, "no peers");
    frame::Frame f;
    f.kind = frame::Kind::Data;
    f.sequence = sequence_++;
    f.topic = topic;
    f.body = to_bytes(payload);
    Bytes datagram = frame::encode(f);
    for (auto& peer : targets) send_to(*peer, datagram);
    return datagram.size();
  }

  if (std::holds_alternative<TunnelSecurity>(cfg_.profile)) {
    if (targets.empty()) throw Error(Errc::NotConnected, "no peers");
    const auto& sec = std::get<TunnelSecurity>(cfg_.profile);
    uint32_t seq = sequence_++;

    frame::Frame inner;
    inner.kind = frame::Kind::Data;
    inner.sequence = seq;
    inner.topic = topic;
    inner.body = to_bytes(payload);
    Bytes inner_bytes = frame::encode(inner);

    frame::TunnelBody body;
    {
      std::lock_guard lock(drbg_mu_);
      Bytes iv = drbg_.generate(16);
      std::copy(iv.begin(), iv.end(), body.iv.begin());
    }
    body.ciphertext = crypto::cbc_encrypt(sec.cipher_key, body.iv, inner_bytes);
    Bytes mac_input;
    append(mac_input, ByteView(body.iv.data(), body.iv.size()));
    append(mac_input, body.ciphertext);
    body.mac = crypto::hmac_sha256(sec.mac_key, mac_input);

    frame::Frame outer;
    outer.kind = frame::Kind::Data;
    outer.sequence = seq;
    outer.topic = kTunnelTopic;
    outer.body = frame::encode_tunnel(body);
    Bytes datagram = frame::encode(outer);
    for (auto& peer : targets) send_to(*peer, datagram);
    return datagram.size();
  }

  // Crypto: one record per peer session.
  size_t wire_size = 0;
  size_t established = 0;
  for (auto& peer : targets) {
    std::lock_guard lock(peer->send_mu);
    if (!peer->established || !peer->skm) continue;
    ++established;

    std::vector<std::string> receivers;
    if (cfg_.attach_receiver_tags && !peer->cert_name.empty()) {
      receivers.push_back(peer->cert_name);
    }
    size_t body_len = session::kIvLen + payload.size() + session::kTagLen + 1;
    for (const auto& r : receivers) body_len += 1 + r.size() + session::kTagLen;

    Bytes header = frame::header_bytes(frame::Kind::Data, peer->skm->session_id(),
                                       peer->skm->send_counter(), topic, body_len);
    if (header.size() + body_len > frame::kMaxDatagram) {
      throw Error(Errc::PayloadTooLarge, "protected frame exceeds one datagram");
    }
    session::ProtectedRecord record = peer->skm->protect(header, payload, receivers);

    Bytes datagram = std::move(header);
    append(datagram, frame::encode_protected(record));
    send_to(*peer, datagram);
    wire_size = datagram.size();
  }
  if (established == 0) throw Error(Errc::NotConnected, "no established peers");
  return wire_size;
}

// ---------------------------------------------------------------------------
// Receive path

void Participant::run_receive_loop() {
  loop_running_ = true;
  std::vector<uint8_t> buf(65536);
  while (!stop_requested_) {
    pollfd pfd{fd_, POLLIN, 0};
    int rc = ::poll(&pfd, 1, 50);
    if (rc <= 0) continue;
    sockaddr_in src{};
    socklen_t src_len = sizeof src;
    ssize_t n = ::recvfrom(fd_, buf.data(), buf.size(), 0, reinterpret_cast<sockaddr*>(&src),
                           &src_len);
    if (n <= 0) continue;
    try {
      handle_datagram(ByteView(buf.data(), static_cast<size_t>(n)), src.sin_addr.s_addr,
                      ntohs(src.sin_port));
    } catch (const std::exception& e) {
      SB_LOG_DEBUG("dropping frame: %s", e.what());
      ++malformed_;
    }
  }
  loop_running_ = false;
}

void Participant::handle_datagram(ByteView data, uint32_t src_ip, uint16_t src_port) {
  auto f = frame::decode(data);
  if (!f) {
    ++malformed_;
    return;
  }
  switch (f->kind) {
    case frame::Kind::Data:
      handle_data(*f, data, src_ip, src_port);
      break;
    case frame::Kind::HsReq:
    case frame::Kind::HsReply:
    case frame::Kind::HsFinal:
      handle_handshake(*f, data, src_ip, src_port);
      break;
    case frame::Kind::BenchCtrl:
      ++no_subscription_;  // reserved; nothing consumes these yet
      break;
  }
}

void Participant::handle_handshake(const frame::Frame& f, ByteView, uint32_t src_ip,
                                   uint16_t src_port) {
  if (!std::holds_alternative<CryptoSecurity>(cfg_.profile)) {
    ++handshake_errors_;
    return;
  }

  const std::string my_name = cfg_.identity->certificate.subject_name;

  if (f.kind == frame::Kind::HsReq) {
    try {
      std::optional<handshake::HandshakeSession> session;
      Bytes reply;
      {
        std::lock_guard lock(drbg_mu_);
        auto [s, r] = handshake::process_request(handshake_config(), drbg_, f.body);
        session = std::move(s);
        reply = std::move(r);
      }
      auto peer = ensure_peer(session->peer_certificate().subject_name, src_ip, src_port);
      {
        std::lock_guard lock(peer->cv_mu);
        peer->cert_name = session->peer_certificate().subject_name;
        peer->hs = std::move(session);
      }
      frame::Frame out;
      out.kind = frame::Kind::HsReply;
      out.body = std::move(reply);
      send_to(*peer, frame::encode(out));
    } catch (const Error& e) {
      SB_LOG_INFO("rejecting handshake request from %s: %s",
                  addr_string(src_ip, src_port).c_str(), e.what());
      ++handshake_errors_;
    }
    return;
  }

  auto peer = peer_by_addr(src_ip, src_port);
  if (!peer || !peer->hs) {
    ++handshake_errors_;
    return;
  }

  if (f.kind == frame::Kind::HsReply) {
    if (peer->hs->state() != handshake::State::AwaitingReply) {
      ++handshake_errors_;
      return;
    }
    try {
      Bytes final_msg = handshake::process_reply(*peer->hs, f.body);
      auto skm = std::make_unique<session::SessionKeyMaterial>(session::SessionKeyMaterial::derive(
          peer->hs->master_secret(), handshake::Role::Initiator,
          {my_name, peer->hs->peer_certificate().subject_name}));
      frame::Frame out;
      out.kind = frame::Kind::HsFinal;
      out.body = std::move(final_msg);
      send_to(*peer, frame::encode(out));
      {
        std::lock_guard map_lock(mu_);
        by_session_[skm->session_id()] = peer;
      }
      std::lock_guard lock(peer->cv_mu);
      peer->cert_name = peer->hs->peer_certificate().subject_name;
      peer->skm = std::move(skm);
      peer->established = true;
      peer->cv.notify_all();
    } catch (const Error& e) {
      ++handshake_errors_;
      std::lock_guard lock(peer->cv_mu);
      peer->failed = true;
      peer->fail_reason = e.what();
      peer->cv.notify_all();
    }
    return;
  }

  // HsFinal
  if (peer->hs->state() != handshake::State::AwaitingFinal) {
    ++handshake_errors_;
    return;
  }
  try {
    Bytes master = handshake::process_final(*peer->hs, f.body);
    auto skm = std::make_unique<session::SessionKeyMaterial>(session::SessionKeyMaterial::derive(
        master, handshake::Role::Responder,
        {my_name, peer->hs->peer_certificate().subject_name}));
    {
      std::lock_guard map_lock(mu_);
      by_session_[skm->session_id()] = peer;
    }
    std::lock_guard lock(peer->cv_mu);
    peer->skm = std::move(skm);
    peer->established = true;
    peer->cv.notify_all();
  } catch (const Error& e) {
    SB_LOG_INFO("handshake final rejected: %s", e.what());
    ++handshake_errors_;
  }
}

void Participant::handle_data(const frame::Frame& f, ByteView datagram, uint32_t src_ip,
                              uint16_t src_port) {
  if (std::holds_alternative<NoSecurity>(cfg_.profile)) {
    if (f.session_id != 0) {
      ++malformed_;  // keyed frame at an unkeyed endpoint; never delivered
      return;
    }
    ensure_peer("peer-" + addr_string(src_ip, src_port), src_ip, src_port);
    deliver(f.topic, f.body);
    return;
  }

  if (std::holds_alternative<TunnelSecurity>(cfg_.profile)) {
    if (f.session_id != 0) {
      ++malformed_;
      return;
    }
    const auto& sec = std::get<TunnelSecurity>(cfg_.profile);
    auto body = frame::decode_tunnel(f.body);
    if (!body) {
      ++malformed_;
      return;
    }
    Bytes mac_input;
    append(mac_input, ByteView(body->iv.data(), body->iv.size()));
    append(mac_input, body->ciphertext);
    auto expected = crypto::hmac_sha256(sec.mac_key, mac_input);
    if (!ct_equal(ByteView(expected.data(), expected.size()),
                  ByteView(body->mac.data(), body->mac.size()))) {
      ++auth_failed_;
      return;
    }
    Bytes inner_bytes;
    try {
      inner_bytes = crypto::cbc_decrypt(sec.cipher_key, body->iv, body->ciphertext);
    } catch (const Error&) {
      ++auth_failed_;
      return;
    }
    auto inner = frame::decode(inner_bytes);
    // The outer header is not covered by the MAC; require it to agree with
    // the authenticated inner frame so header tampering cannot pass.
    if (!inner || inner->kind != frame::Kind::Data || inner->session_id != 0 ||
        inner->sequence != f.sequence || f.topic != kTunnelTopic) {
      ++malformed_;
      return;
    }
    ensure_peer("peer-" + addr_string(src_ip, src_port), src_ip, src_port);
    deliver(inner->topic, inner->body);
    return;
  }

  // Crypto profile
  if (f.session_id == 0) {
    ++malformed_;
    return;
  }
  std::shared_ptr<Peer> peer;
  {
    std::lock_guard lock(mu_);
    auto it = by_session_.find(f.session_id);
    if (it != by_session_.end()) peer = it->second;
  }
  if (!peer || !peer->skm) {
    ++malformed_;
    return;
  }

  auto candidates = frame::decode_protected(f.body);
  if (candidates.empty()) {
    ++malformed_;
    return;
  }
  ByteView aad = datagram.subspan(0, datagram.size() - f.body.size());
  const std::string my_name = cfg_.identity->certificate.subject_name;

  std::lock_guard lock(peer->recv_mu);
  for (const auto& record : candidates) {
    try {
      Bytes payload = peer->skm->unprotect(aad, record, my_name);
      deliver(f.topic, payload);
      return;
    } catch (const Error& e) {
      if (e.code() == Errc::ReplayDetected) {
        ++replayed_;
        return;
      }
      if (e.code() == Errc::BadReceiverTag) {
        ++auth_failed_;
        return;
      }
      // AuthenticationFailure: try the next candidate split, if any.
    }
  }
  ++auth_failed_;
}

void Participant::deliver(const std::string& topic, const Bytes& payload) {
  Handler handler;
  {
    std::lock_guard lock(mu_);
    auto it = subscriptions_.find(topic);
    if (it == subscriptions_.end()) {
      ++no_subscription_;
      return;
    }
    handler = it->second;
  }
  ++delivered_;
  handler(payload);
}

}  // namespace sentrybus::pubsub
