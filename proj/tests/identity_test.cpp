#include <catch_amalgamated.hpp>

#include <filesystem>

#include "sentrybus/errors.hpp"
#include "sentrybus/identity.hpp"

using namespace sentrybus;
using namespace sentrybus::identity;

namespace {

crypto::HmacDrbg test_drbg(const char* pers) {
  Bytes entropy(32, 0x11);
  Bytes nonce(16, 0x22);
  return crypto::HmacDrbg::from_seed(entropy, nonce, as_view(std::string(pers)));
}

}  // namespace

TEST_CASE("ca roots are self-signed and self-verifying") {
  auto drbg = test_drbg("ca");
  auto ca = ca_create("testca", drbg);
  CHECK(ca.certificate.subject_name == "testca");
  CHECK(ca.certificate.issuer_name == "testca");
  CHECK(verify_chain(ca.certificate, ca.certificate));

  auto drbg2 = test_drbg("ca2");
  auto other = ca_create("testca", drbg2);
  CHECK(other.certificate.serial != ca.certificate.serial);
  CHECK(other.certificate.signing_public != ca.certificate.signing_public);
}

TEST_CASE("issued identities verify and carry agreement keys on request") {
  auto drbg = test_drbg("issue");
  auto ca = ca_create("root", drbg);

  auto with_key = issue_identity(ca, "alice", crypto::Suite::EcdhP256, true, drbg);
  CHECK(with_key.certificate.long_term_agreement_public.has_value());
  CHECK(with_key.long_term_agreement_private.has_value());
  CHECK(verify_chain(with_key.certificate, ca.certificate));

  auto without_key = issue_identity(ca, "bob", crypto::Suite::EcdhP256, false, drbg);
  CHECK_FALSE(without_key.certificate.long_term_agreement_public.has_value());
  CHECK_FALSE(without_key.long_term_agreement_private.has_value());
  CHECK(verify_chain(without_key.certificate, ca.certificate));

  auto modp_id = issue_identity(ca, "carol", crypto::Suite::DhModp2048_256, true, drbg);
  CHECK(modp_id.certificate.long_term_agreement_public->size() == 256);
}

TEST_CASE("verify_chain rejects tampering and foreign issuers") {
  auto drbg = test_drbg("chain");
  auto ca = ca_create("root", drbg);
  auto other_ca = ca_create("other", drbg);
  auto id = issue_identity(ca, "alice", crypto::Suite::EcdhP256, false, drbg);

  CHECK_FALSE(verify_chain(id.certificate, other_ca.certificate));

  // One flipped byte anywhere in the signed fields breaks the chain.
  auto tampered = id.certificate;
  tampered.subject_name[0] ^= 0x01;
  CHECK_FALSE(verify_chain(tampered, ca.certificate));

  auto bad_serial = id.certificate;
  bad_serial.serial ^= 1;
  CHECK_FALSE(verify_chain(bad_serial, ca.certificate));

  auto bad_sig = id.certificate;
  bad_sig.issuer_signature[4] ^= 0x01;
  CHECK_FALSE(verify_chain(bad_sig, ca.certificate));

  auto garbage_sig = id.certificate;
  garbage_sig.issuer_signature.assign(70, 0x00);
  CHECK_FALSE(verify_chain(garbage_sig, ca.certificate));
}

TEST_CASE("certificates round-trip through the canonical encoding") {
  auto drbg = test_drbg("roundtrip");
  auto ca = ca_create("root", drbg);
  for (bool with_key : {true, false}) {
    auto id = issue_identity(ca, "alice", crypto::Suite::DhModp2048_256, with_key, drbg);
    Bytes encoded = id.certificate.encode();
    auto decoded = Certificate::decode(encoded);
    REQUIRE(decoded.has_value());
    CHECK(decoded->encode() == encoded);
    CHECK(*decoded == id.certificate);
  }

  // Truncations never decode.
  Bytes encoded = ca.certificate.encode();
  for (size_t cut : {size_t{0}, size_t{1}, encoded.size() / 2, encoded.size() - 1}) {
    CHECK_FALSE(Certificate::decode(ByteView(encoded.data(), cut)).has_value());
  }
  // Trailing garbage is rejected.
  Bytes padded = encoded;
  padded.push_back(0x00);
  CHECK_FALSE(Certificate::decode(padded).has_value());
}

TEST_CASE("identity files survive a save/load cycle") {
  auto drbg = test_drbg("files");
  auto ca = ca_create("root", drbg);
  auto id = issue_identity(ca, "alice", crypto::Suite::EcdhP256, true, drbg);

  auto dir = std::filesystem::temp_directory_path() / "sentrybus_id_test";
  std::filesystem::create_directories(dir);

  save_certificate(dir / "cert.pem", ca.certificate);
  auto cert = load_certificate(dir / "cert.pem");
  CHECK(cert == ca.certificate);

  save_identity(dir / "identity.pem", id);
  auto loaded = load_identity(dir / "identity.pem");
  CHECK(loaded.certificate == id.certificate);
  CHECK(loaded.signing_private == id.signing_private);
  CHECK(loaded.long_term_agreement_private == id.long_term_agreement_private);

  CHECK_THROWS_AS(load_certificate(dir / "missing.pem"), Error);
  // Wrong fence kind.
  CHECK_THROWS_AS(load_identity(dir / "cert.pem"), Error);

  std::filesystem::remove_all(dir);
}

TEST_CASE("subject names are bounded") {
  auto drbg = test_drbg("names");
  auto ca = ca_create("root", drbg);
  std::string long_name(256, 'x');
  CHECK_THROWS_MATCHES(issue_identity(ca, long_name, crypto::Suite::EcdhP256, false, drbg),
                       Error, Catch::Matchers::Predicate<Error>([](const Error& e) {
                         return e.code() == Errc::NameTooLong;
                       }));
  CHECK_THROWS_AS(ca_create("", drbg), Error);
  CHECK_NOTHROW(issue_identity(ca, std::string(255, 'x'), crypto::Suite::EcdhP256, false, drbg));
}
