#include "sentrybus/identity.hpp"

#include <fstream>
#include <sstream>

#include "sentrybus/errors.hpp"
#include "sentrybus/tlv.hpp"

namespace sentrybus::identity {

namespace {

// Certificate TLV tags (canonical order).
constexpr uint8_t kTagSubject = 0x01;
constexpr uint8_t kTagSigningPublic = 0x02;
constexpr uint8_t kTagSuite = 0x03;
constexpr uint8_t kTagAgreementPublic = 0x04;
constexpr uint8_t kTagIssuer = 0x05;
constexpr uint8_t kTagSerial = 0x06;
constexpr uint8_t kTagSignature = 0x07;

// Identity container tags.
constexpr uint8_t kTagCertificate = 0x30;
constexpr uint8_t kTagSigningPrivate = 0x31;
constexpr uint8_t kTagAgreementPrivate = 0x32;

void check_name(const std::string& name) {
  if (name.empty() || name.size() > kMaxNameLen) {
    throw Error(Errc::NameTooLong, "name must be 1..255 bytes");
  }
}

Bytes serial_bytes(uint64_t serial) {
  Bytes out;
  put_u64_be(out, serial);
  return out;
}

}  // namespace

Bytes Certificate::to_be_signed() const {
  Bytes out;
  tlv::put(out, kTagSubject, as_view(subject_name));
  tlv::put(out, kTagSigningPublic, signing_public);
  uint8_t suite_byte = static_cast<uint8_t>(suite);
  tlv::put(out, kTagSuite, ByteView(&suite_byte, 1));
  if (long_term_agreement_public) {
    tlv::put(out, kTagAgreementPublic, *long_term_agreement_public);
  }
  tlv::put(out, kTagIssuer, as_view(issuer_name));
  tlv::put(out, kTagSerial, serial_bytes(serial));
  return out;
}

Bytes Certificate::encode() const {
  Bytes out = to_be_signed();
  tlv::put(out, kTagSignature, issuer_signature);
  return out;
}

std::optional<Certificate> Certificate::decode(ByteView data) {
  tlv::Reader r(data);
  Certificate cert;

  auto subject = r.expect(kTagSubject);
  if (!subject || subject->empty() || subject->size() > kMaxNameLen) return std::nullopt;
  cert.subject_name = to_string(*subject);

  auto pub = r.expect(kTagSigningPublic);
  if (!pub || pub->size() != 65) return std::nullopt;
  cert.signing_public = to_bytes(*pub);

  auto suite = r.expect(kTagSuite);
  if (!suite || suite->size() != 1) return std::nullopt;
  auto parsed_suite = crypto::suite_from_wire((*suite)[0]);
  if (!parsed_suite) return std::nullopt;
  cert.suite = *parsed_suite;

  auto item = r.next();
  if (item && item->tag == kTagAgreementPublic) {
    if (item->value.empty()) return std::nullopt;
    cert.long_term_agreement_public = to_bytes(item->value);
    item = r.next();
  }

  if (!item || item->tag != kTagIssuer || item->value.empty() ||
      item->value.size() > kMaxNameLen) {
    return std::nullopt;
  }
  cert.issuer_name = to_string(item->value);

  auto serial = r.expect(kTagSerial);
  if (!serial || serial->size() != 8) return std::nullopt;
  cert.serial = get_u64_be(serial->data());

  auto sig = r.expect(kTagSignature);
  if (!sig || sig->empty()) return std::nullopt;
  cert.issuer_signature = to_bytes(*sig);

  if (!r.done()) return std::nullopt;
  return cert;
}

Bytes ParticipantIdentity::encode() const {
  Bytes out;
  tlv::put(out, kTagCertificate, certificate.encode());
  tlv::put(out, kTagSigningPrivate, signing_private);
  if (long_term_agreement_private) {
    tlv::put(out, kTagAgreementPrivate, *long_term_agreement_private);
  }
  return out;
}

std::optional<ParticipantIdentity> ParticipantIdentity::decode(ByteView data) {
  tlv::Reader r(data);
  ParticipantIdentity id;

  auto cert = r.expect(kTagCertificate);
  if (!cert) return std::nullopt;
  auto parsed = Certificate::decode(*cert);
  if (!parsed) return std::nullopt;
  id.certificate = std::move(*parsed);

  auto priv = r.expect(kTagSigningPrivate);
  if (!priv || priv->size() != 32) return std::nullopt;
  id.signing_private = to_bytes(*priv);

  if (!r.done()) {
    auto agree = r.expect(kTagAgreementPrivate);
    if (!agree || agree->empty()) return std::nullopt;
    id.long_term_agreement_private = to_bytes(*agree);
  }
  if (!r.done()) return std::nullopt;
  return id;
}

CertificateAuthority ca_create(const std::string& name, crypto::HmacDrbg& drbg) {
  check_name(name);
  auto signing = crypto::ecdsa_generate(drbg);

  CertificateAuthority ca;
  ca.signing_private = signing.private_scalar;
  ca.certificate.subject_name = name;
  ca.certificate.signing_public = signing.public_point;
  ca.certificate.suite = crypto::Suite::EcdhP256;  // roots carry no agreement key
  ca.certificate.issuer_name = name;
  ca.certificate.serial = get_u64_be(drbg.generate(8).data());
  ca.certificate.issuer_signature =
      crypto::ecdsa_sign(ca.signing_private, ca.certificate.to_be_signed());
  return ca;
}

ParticipantIdentity issue_identity(const CertificateAuthority& ca, const std::string& name,
                                   crypto::Suite suite, bool include_long_term_agreement_key,
                                   crypto::HmacDrbg& drbg) {
  check_name(name);
  auto signing = crypto::ecdsa_generate(drbg);

  ParticipantIdentity id;
  id.signing_private = signing.private_scalar;
  id.certificate.subject_name = name;
  id.certificate.signing_public = signing.public_point;
  id.certificate.suite = suite;
  if (include_long_term_agreement_key) {
    auto agreement = crypto::keyagree_generate(suite, drbg);
    id.certificate.long_term_agreement_public = agreement.public_value;
    id.long_term_agreement_private = agreement.private_scalar;
  }
  id.certificate.issuer_name = ca.certificate.subject_name;
  id.certificate.serial = get_u64_be(drbg.generate(8).data());
  id.certificate.issuer_signature =
      crypto::ecdsa_sign(ca.signing_private, id.certificate.to_be_signed());
  return id;
}

bool verify_chain(const Certificate& cert, const Certificate& trusted_root) {
  if (cert.issuer_name != trusted_root.subject_name) return false;
  try {
    return crypto::ecdsa_verify(trusted_root.signing_public, cert.to_be_signed(),
                                cert.issuer_signature);
  } catch (const Error&) {
    return false;  // malformed signature encoding
  } catch (const std::exception&) {
    return false;
  }
}

// ---------------------------------------------------------------------------
// Storage

std::string pem_encode(const std::string& kind, ByteView payload) {
  std::string b64 = base64_encode(payload);
  std::ostringstream out;
  out << "-----BEGIN SENTRYBUS " << kind << "-----\n";
  for (size_t i = 0; i < b64.size(); i += 64) {
    out << b64.substr(i, 64) << "\n";
  }
  out << "-----END SENTRYBUS " << kind << "-----\n";
  return out.str();
}

std::optional<Bytes> pem_decode(const std::string& kind, const std::string& text) {
  const std::string begin = "-----BEGIN SENTRYBUS " + kind + "-----";
  const std::string end = "-----END SENTRYBUS " + kind + "-----";
  size_t b = text.find(begin);
  if (b == std::string::npos) return std::nullopt;
  size_t body_start = b + begin.size();
  size_t e = text.find(end, body_start);
  if (e == std::string::npos) return std::nullopt;

  std::string b64;
  for (size_t i = body_start; i < e; ++i) {
    char c = text[i];
    if (c == '\n' || c == '\r' || c == ' ' || c == '\t') continue;
    b64.push_back(c);
  }
  try {
    return base64_decode(b64);
  } catch (const Error&) {
    return std::nullopt;
  }
}

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::IoError, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(Errc::IoError, "short write to " + path.string());
}

}  // namespace

void save_certificate(const std::filesystem::path& path, const Certificate& cert) {
  write_file(path, pem_encode("CERT", cert.encode()));
}

Certificate load_certificate(const std::filesystem::path& path) {
  auto payload = pem_decode("CERT", read_file(path));
  if (!payload) throw Error(Errc::IoError, "no CERT block in " + path.string());
  auto cert = Certificate::decode(*payload);
  if (!cert) throw Error(Errc::IoError, "malformed certificate in " + path.string());
  return *cert;
}

void save_identity(const std::filesystem::path& path, const ParticipantIdentity& id) {
  write_file(path, pem_encode("IDENTITY", id.encode()));
}

ParticipantIdentity load_identity(const std::filesystem::path& path) {
  auto payload = pem_decode("IDENTITY", read_file(path));
  if (!payload) throw Error(Errc::IoError, "no IDENTITY block in " + path.string());
  auto id = ParticipantIdentity::decode(*payload);
  if (!id) throw Error(Errc::IoError, "malformed identity in " + path.string());
  return *id;
}

}  // namespace sentrybus::identity
