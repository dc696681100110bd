#ifndef SENTRYBUS_IDENTITY_HPP
#define SENTRYBUS_IDENTITY_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "sentrybus/bytes.hpp"
#include "sentrybus/crypto.hpp"

namespace sentrybus::identity {

constexpr size_t kMaxNameLen = 255;

// Single-level chain: a root signs participant certificates directly.
struct Certificate {
  std::string subject_name;
  Bytes signing_public;  // 65-byte uncompressed P-256 point
  crypto::Suite suite;
  std::optional<Bytes> long_term_agreement_public;
  std::string issuer_name;
  uint64_t serial = 0;
  Bytes issuer_signature;  // ECDSA over to_be_signed()

  Bytes encode() const;         // canonical TLV, including the signature
  Bytes to_be_signed() const;   // canonical TLV of everything before the signature
  static std::optional<Certificate> decode(ByteView data);

  bool operator==(const Certificate& other) const { return encode() == other.encode(); }
};

struct ParticipantIdentity {
  Certificate certificate;
  Bytes signing_private;  // 32-byte scalar
  std::optional<Bytes> long_term_agreement_private;

  Bytes encode() const;
  static std::optional<ParticipantIdentity> decode(ByteView data);
};

struct CertificateAuthority {
  Certificate certificate;  // self-signed
  Bytes signing_private;
};

CertificateAuthority ca_create(const std::string& name, crypto::HmacDrbg& drbg);

// Issues a certificate + matching private keys signed by `ca`. When
// `include_long_term_agreement_key` is set the certificate pins a long-term
// key-agreement public value (static-DH identities).
ParticipantIdentity issue_identity(const CertificateAuthority& ca, const std::string& name,
                                   crypto::Suite suite, bool include_long_term_agreement_key,
                                   crypto::HmacDrbg& drbg);

// True iff cert's issuer signature verifies under the root and the issuer
// name matches the root subject. Never throws; malformed input is false.
bool verify_chain(const Certificate& cert, const Certificate& trusted_root);

// --- storage -----------------------------------------------------------
// Text files: base64 payload between "-----BEGIN SENTRYBUS <KIND>-----" /
// "-----END SENTRYBUS <KIND>-----" fences; KIND is CERT or IDENTITY.

std::string pem_encode(const std::string& kind, ByteView payload);
std::optional<Bytes> pem_decode(const std::string& kind, const std::string& text);

void save_certificate(const std::filesystem::path& path, const Certificate& cert);
Certificate load_certificate(const std::filesystem::path& path);  // throws Error(IoError)
void save_identity(const std::filesystem::path& path, const ParticipantIdentity& id);
ParticipantIdentity load_identity(const std::filesystem::path& path);

}  // namespace sentrybus::identity

#endif
