#include <catch_amalgamated.hpp>

#include <arpa/inet.h>
#include <sys/socket.h>
#include <unistd.h>

#include <atomic>
#include <chrono>
#include <thread>

#include "sentrybus/bench.hpp"
#include "sentrybus/errors.hpp"
#include "sentrybus/pubsub.hpp"

using namespace sentrybus;
using namespace sentrybus::pubsub;
using namespace std::chrono_literals;

namespace {

struct TestPki {
  identity::CertificateAuthority ca;
  identity::ParticipantIdentity alice;
  identity::ParticipantIdentity bob;

  explicit TestPki(crypto::Suite suite = crypto::Suite::EcdhP256, bool long_term = false) {
    auto drbg = crypto::HmacDrbg::from_os_entropy();
    ca = identity::ca_create("root", drbg);
    alice = identity::issue_identity(ca, "alice", suite, long_term, drbg);
    bob = identity::issue_identity(ca, "bob", suite, long_term, drbg);
  }
};

ParticipantConfig none_config(const std::string& name) {
  ParticipantConfig cfg;
  cfg.name = name;
  cfg.bind_address = "127.0.0.1:0";
  return cfg;
}

ParticipantConfig crypto_config(const TestPki& pki, const identity::ParticipantIdentity& id,
                                handshake::FsMode mode = handshake::FsMode::Ephemeral) {
  ParticipantConfig cfg;
  cfg.name = id.certificate.subject_name;
  cfg.bind_address = "127.0.0.1:0";
  CryptoSecurity sec;
  sec.suite = id.certificate.suite;
  sec.fs_mode = mode;
  cfg.profile = sec;
  cfg.identity = id;
  cfg.trusted_root = pki.ca.certificate;
  return cfg;
}

TunnelSecurity test_tunnel_keys() {
  TunnelSecurity sec;
  sec.cipher_key.fill(0x1f);
  sec.mac_key.fill(0x2e);
  return sec;
}

ParticipantConfig tunnel_config(const std::string& name) {
  ParticipantConfig cfg;
  cfg.name = name;
  cfg.bind_address = "127.0.0.1:0";
  cfg.profile = test_tunnel_keys();
  return cfg;
}

// Collects payloads delivered to one subscription.
struct Sink {
  std::mutex mu;
  std::vector<Bytes> payloads;

  Participant::Handler handler() {
    return [this](const Bytes& p) {
      std::lock_guard lock(mu);
      payloads.push_back(p);
    };
  }
  size_t size() {
    std::lock_guard lock(mu);
    return payloads.size();
  }
  bool wait_for(size_t n, std::chrono::milliseconds budget = 2000ms) {
    auto deadline = std::chrono::steady_clock::now() + budget;
    while (std::chrono::steady_clock::now() < deadline) {
      if (size() >= n) return true;
      std::this_thread::sleep_for(1ms);
    }
    return size() >= n;
  }
};

void send_raw(const std::string& address, const Bytes& datagram) {
  size_t colon = address.rfind(':');
  int fd = ::socket(AF_INET, SOCK_DGRAM, 0);
  REQUIRE(fd >= 0);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  inet_pton(AF_INET, address.substr(0, colon).c_str(), &addr.sin_addr);
  addr.sin_port = htons(static_cast<uint16_t>(std::stoi(address.substr(colon + 1))));
  ::sendto(fd, datagram.data(), datagram.size(), 0, reinterpret_cast<sockaddr*>(&addr),
           sizeof addr);
  ::close(fd);
}

bool contains_subsequence(const Bytes& haystack, ByteView needle) {
  if (needle.size() > haystack.size()) return false;
  return std::search(haystack.begin(), haystack.end(), needle.begin(), needle.end()) !=
         haystack.end();
}

}  // namespace

TEST_CASE("configuration errors surface at construction") {
  ParticipantConfig bad;
  bad.name = "x";
  bad.profile = CryptoSecurity{};
  CHECK_THROWS_MATCHES(Participant(bad), Error,
                       Catch::Matchers::Predicate<Error>([](const Error& e) {
                         return e.code() == Errc::ProfileConfigError;
                       }));

  Participant first(none_config("a"));
  ParticipantConfig clash = none_config("b");
  clash.bind_address = "127.0.0.1:" + std::to_string(first.port());
  CHECK_THROWS_MATCHES(Participant(clash), Error,
                       Catch::Matchers::Predicate<Error>(
                           [](const Error& e) { return e.code() == Errc::BindFailure; }));
}

TEST_CASE("none profile delivers payloads in order") {
  Participant pub(none_config("pub"));
  Participant sub(none_config("sub"));
  Sink sink;
  sub.subscribe("topic/a", sink.handler());
  sub.start();
  pub.connect("sub", sub.address());

  size_t wire = pub.publish("topic/a", as_view(std::string("one")));
  CHECK(wire == 23 + 7 + 3);  // fixed header fields + topic + payload
  pub.publish("topic/a", as_view(std::string("two")));
  pub.publish("topic/a", as_view(std::string("three")));

  REQUIRE(sink.wait_for(3));
  CHECK(sink.payloads[0] == to_bytes(std::string("one")));
  CHECK(sink.payloads[1] == to_bytes(std::string("two")));
  CHECK(sink.payloads[2] == to_bytes(std::string("three")));

  // Frames on another topic never reach this handler.
  pub.publish("topic/b", as_view(std::string("stray")));
  std::this_thread::sleep_for(50ms);
  CHECK(sink.size() == 3);
  CHECK(sub.counters().no_subscription >= 1);

  sub.stop();
}

TEST_CASE("publish requires a peer and bounded payloads") {
  Participant lonely(none_config("lonely"));
  CHECK_THROWS_MATCHES(lonely.publish("t", {}), Error,
                       Catch::Matchers::Predicate<Error>(
                           [](const Error& e) { return e.code() == Errc::NotConnected; }));

  Participant pub(none_config("pub"));
  Participant sub(none_config("sub"));
  pub.connect("sub", sub.address());
  Bytes huge(70000, 0x00);
  CHECK_THROWS_MATCHES(pub.publish("t", huge), Error,
                       Catch::Matchers::Predicate<Error>(
                           [](const Error& e) { return e.code() == Errc::PayloadTooLarge; }));
}

TEST_CASE("duplicate subscriptions are refused") {
  Participant p(none_config("p"));
  p.subscribe("t", [](const Bytes&) {});
  CHECK_THROWS_MATCHES(p.subscribe("t", [](const Bytes&) {}), Error,
                       Catch::Matchers::Predicate<Error>([](const Error& e) {
                         return e.code() == Errc::DuplicateSubscription;
                       }));
}

TEST_CASE("crypto profile handshakes, delivers, and mirrors sessions") {
  TestPki pki;
  Participant alice(crypto_config(pki, pki.alice));
  Participant bob(crypto_config(pki, pki.bob));
  Sink sink;
  bob.subscribe("sec/topic", sink.handler());
  alice.start();
  bob.start();

  alice.connect("bob", bob.address());
  auto* askm = alice.session_for("bob");
  auto* bskm = bob.session_for("alice");
  REQUIRE(askm != nullptr);
  REQUIRE(bskm != nullptr);
  CHECK(askm->send_key() == bskm->recv_key());
  CHECK(askm->recv_key() == bskm->send_key());
  CHECK(askm->session_id() == bskm->session_id());

  Bytes payload = to_bytes(std::string("secret payload"));
  size_t wire = alice.publish("sec/topic", payload);
  CHECK(wire == 23 + 9 + 12 + payload.size() + 16 + 1);
  REQUIRE(sink.wait_for(1));
  CHECK(sink.payloads[0] == payload);

  // Bidirectional: bob can publish back on the same session.
  Sink back;
  alice.subscribe("sec/back", back.handler());
  bob.publish("sec/back", as_view(std::string("pong")));
  REQUIRE(back.wait_for(1));

  alice.stop();
  bob.stop();
}

TEST_CASE("crypto handshake failures are reported") {
  TestPki pki;
  TestPki other_pki;

  SECTION("responder certificate not trusted by the initiator") {
    // bob's identity comes from a CA the initiator does not trust.
    auto cfg = crypto_config(other_pki, other_pki.bob);
    Participant bob(cfg);
    bob.start();

    auto icfg = crypto_config(pki, pki.alice);
    icfg.handshake_timeout = 300ms;
    icfg.handshake_retries = 1;
    Participant alice(icfg);
    alice.start();
    // The responder rejects the request outright (foreign CA), so the
    // initiator only observes silence.
    CHECK_THROWS_MATCHES(alice.connect("bob", bob.address()), Error,
                         Catch::Matchers::Predicate<Error>(
                             [](const Error& e) { return e.code() == Errc::Timeout; }));
    CHECK(bob.counters().handshake_errors >= 1);
    alice.stop();
    bob.stop();
  }

  SECTION("initiator rejects an untrusted reply") {
    // alice trusts other_pki's root, bob presents pki's cert: the request is
    // accepted by bob (bob trusts pki, alice's cert is from pki)... so build
    // the asymmetric case: alice trusts other root but presents pki identity.
    auto rcfg = crypto_config(pki, pki.bob);
    Participant bob(rcfg);
    bob.start();

    auto icfg = crypto_config(pki, pki.alice);
    icfg.trusted_root = other_pki.ca.certificate;  // wrong root for bob's reply
    icfg.handshake_timeout = 300ms;
    icfg.handshake_retries = 1;
    Participant alice(icfg);
    alice.start();
    CHECK_THROWS_MATCHES(alice.connect("bob", bob.address()), Error,
                         Catch::Matchers::Predicate<Error>([](const Error& e) {
                           return e.code() == Errc::HandshakeFailed;
                         }));
    alice.stop();
    bob.stop();
  }

  SECTION("no responder: timeout") {
    auto icfg = crypto_config(pki, pki.alice);
    icfg.handshake_timeout = 100ms;
    icfg.handshake_retries = 2;
    Participant alice(icfg);
    alice.start();
    auto t0 = std::chrono::steady_clock::now();
    CHECK_THROWS_MATCHES(alice.connect("bob", "127.0.0.1:1"), Error,
                         Catch::Matchers::Predicate<Error>(
                             [](const Error& e) { return e.code() == Errc::Timeout; }));
    CHECK(std::chrono::steady_clock::now() - t0 >= 200ms);
    alice.stop();
  }
}

TEST_CASE("tunnel profile delivers and hides the payload") {
  Participant pub(tunnel_config("tpub"));
  Participant sub(tunnel_config("tsub"));
  Sink sink;
  sub.subscribe("tun/topic", sink.handler());
  sub.start();
  pub.connect("sub", sub.address());

  std::vector<Bytes> captured;
  pub.set_test_send_filter([&captured](ByteView d) {
    captured.push_back(to_bytes(d));
    return true;
  });

  auto drbg = crypto::HmacDrbg::from_os_entropy();
  Bytes payload = drbg.generate(64);
  size_t wire = pub.publish("tun/topic", payload);
  // inner frame = 23 + 9 (topic) + 64 = 96 bytes; PKCS#7 pads to 112.
  CHECK(wire == 23 + 1 + 16 + 112 + 32);
  REQUIRE(sink.wait_for(1));
  CHECK(sink.payloads[0] == payload);

  REQUIRE(captured.size() == 1);
  CHECK_FALSE(contains_subsequence(captured[0], ByteView(payload.data(), 16)));

  pub.stop();
  sub.stop();
}

TEST_CASE("profile mismatches never deliver a payload") {
  TestPki pki;

  SECTION("none subscriber, crypto publisher") {
    Participant alice(crypto_config(pki, pki.alice));
    Participant bob(crypto_config(pki, pki.bob));
    Participant watcher(none_config("watcher"));
    Sink sink;
    watcher.subscribe("sec/x", sink.handler());
    watcher.start();
    alice.start();
    bob.start();
    alice.connect("bob", bob.address());

    // Forward every protected datagram to the none-profile subscriber too.
    std::vector<Bytes> captured;
    alice.set_test_send_filter([&captured](ByteView d) {
      captured.push_back(to_bytes(d));
      return true;
    });
    Sink bob_sink;
    bob.subscribe("sec/x", bob_sink.handler());
    for (int i = 0; i < 100; ++i) {
      alice.publish("sec/x", as_view(std::string("payload-") + std::to_string(i)));
    }
    REQUIRE(bob_sink.wait_for(100));
    for (const auto& datagram : captured) send_raw(watcher.address(), datagram);
    std::this_thread::sleep_for(100ms);
    CHECK(sink.size() == 0);
    CHECK(watcher.counters().malformed >= 100);
    alice.stop();
    bob.stop();
    watcher.stop();
  }

  SECTION("none subscriber, tunnel publisher") {
    Participant pub(tunnel_config("tpub"));
    Participant sub(none_config("nsub"));
    Sink sink;
    sub.subscribe("tun/x", sink.handler());
    sub.start();
    pub.connect("sub", sub.address());
    for (int i = 0; i < 100; ++i) pub.publish("tun/x", as_view(std::string("data")));
    std::this_thread::sleep_for(100ms);
    CHECK(sink.size() == 0);
    sub.stop();
  }

  SECTION("tunnel subscriber, none publisher") {
    Participant pub(none_config("npub"));
    Participant sub(tunnel_config("tsub"));
    Sink sink;
    sub.subscribe("t", sink.handler());
    sub.start();
    pub.connect("sub", sub.address());
    for (int i = 0; i < 50; ++i) pub.publish("t", as_view(std::string("plain")));
    std::this_thread::sleep_for(100ms);
    CHECK(sink.size() == 0);
    CHECK(sub.counters().auth_failed + sub.counters().malformed >= 50);
    sub.stop();
  }

  SECTION("crypto subscriber, none publisher") {
    Participant pub(none_config("npub"));
    Participant sub(crypto_config(pki, pki.bob));
    Sink sink;
    sub.subscribe("t", sink.handler());
    sub.start();
    pub.connect("sub", sub.address());
    for (int i = 0; i < 50; ++i) pub.publish("t", as_view(std::string("plain")));
    std::this_thread::sleep_for(100ms);
    CHECK(sink.size() == 0);
    sub.stop();
  }
}

TEST_CASE("crypto frames resist capture, tamper, and replay") {
  TestPki pki;
  Participant alice(crypto_config(pki, pki.alice));
  Participant bob(crypto_config(pki, pki.bob));
  Sink sink;
  bob.subscribe("sec/cap", sink.handler());
  alice.start();
  bob.start();
  alice.connect("bob", bob.address());

  std::vector<Bytes> captured;
  alice.set_test_send_filter([&captured](ByteView d) {
    captured.push_back(to_bytes(d));
    return true;
  });

  auto drbg = crypto::HmacDrbg::from_os_entropy();
  Bytes payload = drbg.generate(128);
  alice.publish("sec/cap", payload);
  REQUIRE(sink.wait_for(1));
  REQUIRE(captured.size() == 1);

  // Confidentiality: no 16-byte slice of the plaintext appears on the wire.
  for (size_t off = 0; off + 16 <= payload.size(); ++off) {
    CHECK_FALSE(contains_subsequence(captured[0], ByteView(payload.data() + off, 16)));
  }

  // Exact replay: dropped and counted, handler not invoked again.
  auto before = bob.counters();
  send_raw(bob.address(), captured[0]);
  std::this_thread::sleep_for(100ms);
  CHECK(sink.size() == 1);
  CHECK(bob.counters().replayed == before.replayed + 1);

  // Single-byte tamper on a frame bob has not seen yet (a frame bob already
  // consumed would be rejected as a replay before the tag check runs).
  alice.set_test_send_filter([&captured](ByteView d) {
    captured.push_back(to_bytes(d));
    return false;  // capture and drop
  });
  alice.publish("sec/cap", payload);
  REQUIRE(captured.size() == 2);
  Bytes tampered = captured[1];
  tampered[tampered.size() / 2] ^= 0x01;
  send_raw(bob.address(), tampered);
  std::this_thread::sleep_for(100ms);
  CHECK(sink.size() == 1);
  CHECK(bob.counters().auth_failed >= 1);

  // Random garbage only bumps the malformed counter.
  send_raw(bob.address(), drbg.generate(40));
  std::this_thread::sleep_for(100ms);
  CHECK(bob.counters().malformed >= 1);
  CHECK(sink.size() == 1);

  alice.stop();
  bob.stop();
}

TEST_CASE("lost datagrams never block later deliveries") {
  Participant pub(none_config("pub"));
  Participant sub(none_config("sub"));
  Sink sink;
  sub.subscribe("lossy", sink.handler());
  sub.start();
  pub.connect("sub", sub.address());

  // Drop every third frame before it reaches the socket.
  std::atomic<int> counter{0};
  pub.set_test_send_filter([&counter](ByteView) { return ++counter % 3 != 0; });

  for (int i = 0; i < 30; ++i) {
    pub.publish("lossy", as_view(std::to_string(i)));
  }
  REQUIRE(sink.wait_for(20));
  std::this_thread::sleep_for(50ms);
  CHECK(sink.size() == 20);
  // The drops (every 3rd send) must not stall later frames: payload "28"
  // rides the 29th send and survives the filter.
  bool saw_late_frame = false;
  {
    std::lock_guard lock(sink.mu);
    for (const auto& p : sink.payloads) {
      if (p == to_bytes(std::string("28"))) saw_late_frame = true;
    }
  }
  CHECK(saw_late_frame);
  sub.stop();
}
