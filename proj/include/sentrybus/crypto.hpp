#ifndef SENTRYBUS_CRYPTO_HPP
#define SENTRYBUS_CRYPTO_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <string>

#include "sentrybus/bytes.hpp"

namespace sentrybus::crypto {

// ---------------------------------------------------------------------------
// Suites

enum class Suite : uint8_t {
  DhModp2048_256 = 1,  // finite-field DH, 2048-bit modulus / 256-bit subgroup
  EcdhP256 = 2,        // ECDH over NIST P-256
};

const char* suite_name(Suite s);
std::optional<Suite> suite_from_wire(uint8_t b);  // only the two known ids parse

// ---------------------------------------------------------------------------
// Hashing / MAC / KDF (SHA-256 throughout)

constexpr size_t kHashLen = 32;

std::array<uint8_t, kHashLen> sha256(ByteView data);
std::array<uint8_t, kHashLen> hmac_sha256(ByteView key, ByteView data);

// RFC 5869 extract-and-expand. Throws Error(OutputTooLong) if out_len > 255*32.
Bytes hkdf_sha256(ByteView ikm, ByteView salt, ByteView info, size_t out_len);

// ---------------------------------------------------------------------------
// Deterministic random bit generator (HMAC-DRBG, SP 800-90A, SHA-256)

class HmacDrbg {
 public:
  // Instantiates from operating-system entropy (getentropy).
  static HmacDrbg from_os_entropy();

  // Deterministic instantiation for reproducible runs and known-answer tests.
  static HmacDrbg from_seed(ByteView entropy, ByteView nonce,
                            ByteView personalization = {});

  // Returns n bytes and advances the state. n == 0 still advances one
  // generate step. An internal reseed (from OS entropy) fires when the
  // reseed counter hits its limit; callers never see ReseedRequired.
  Bytes generate(size_t n);

  uint64_t reseed_counter() const { return reseed_counter_; }

  HmacDrbg(const HmacDrbg&) = delete;
  HmacDrbg& operator=(const HmacDrbg&) = delete;
  HmacDrbg(HmacDrbg&&) = default;
  HmacDrbg& operator=(HmacDrbg&&) = default;

 private:
  HmacDrbg() = default;
  void update(ByteView provided);
  void reseed();

  std::array<uint8_t, 32> key_{};
  std::array<uint8_t, 32> value_{};
  uint64_t reseed_counter_ = 1;
};

// ---------------------------------------------------------------------------
// Key agreement

// Finite-field group parameters (hex, big-endian). The production group is
// kModp2048_256; tests may construct small groups, which are not reachable
// from any parser.
struct ModpGroup {
  const char* p_hex;
  const char* g_hex;
  const char* q_hex;         // prime order of the subgroup generated by g
  size_t element_size;       // byte length of one encoded group element
};

extern const ModpGroup kModp2048_256;

struct KeyAgreementKeypair {
  Suite suite;
  Bytes private_scalar;              // big-endian, in [1, q-1]
  Bytes public_value;                // MODP: element_size bytes; P-256: 65-byte uncompressed point
  const ModpGroup* modp = nullptr;   // group backing a MODP keypair
};

// Fresh keypair with private scalar drawn from the DRBG.
KeyAgreementKeypair keyagree_generate(Suite suite, HmacDrbg& drbg);

// Shared group element for `own.private_scalar` against `peer_public`.
// MODP: fixed-width big-endian integer. P-256: 32-byte x-coordinate.
// Throws Error(InvalidPeerPublic) for off-curve points, values outside
// [2, p-2], identity elements, or wrong-order subgroup members.
Bytes keyagree_shared(const KeyAgreementKeypair& own, ByteView peer_public);

// Parameterized MODP construction; the real suite uses kModp2048_256.
KeyAgreementKeypair modp_generate(const ModpGroup& group, HmacDrbg& drbg);
KeyAgreementKeypair modp_keypair_from_scalar(const ModpGroup& group, ByteView scalar);

// ---------------------------------------------------------------------------
// Signatures (ECDSA P-256 with SHA-256, DER-encoded signatures)

struct SigningKeypair {
  Bytes private_scalar;  // 32 bytes
  Bytes public_point;    // 65-byte uncompressed point
};

SigningKeypair ecdsa_generate(HmacDrbg& drbg);
Bytes ecdsa_public_from_private(ByteView private_scalar);
Bytes ecdsa_sign(ByteView private_scalar, ByteView message);
// False on verification failure; throws Error(MalformedSignature) when the
// signature is not even decodable DER of plausible size.
bool ecdsa_verify(ByteView public_point, ByteView message, ByteView signature);

// ---------------------------------------------------------------------------
// AEAD (AES-GCM, 96-bit IV, 128-bit tag); key is 16 or 32 bytes

constexpr size_t kGcmIvLen = 12;
constexpr size_t kGcmTagLen = 16;

struct Sealed {
  Bytes ciphertext;
  std::array<uint8_t, kGcmTagLen> tag;
};

Sealed aead_seal(ByteView key, ByteView iv, ByteView aad, ByteView plaintext);
// Throws Error(AuthenticationFailure); no plaintext is released on failure.
Bytes aead_open(ByteView key, ByteView iv, ByteView aad, ByteView ciphertext,
                ByteView tag);

// AES-GMAC: the GCM tag over `data` as AAD with an empty plaintext.
std::array<uint8_t, kGcmTagLen> gmac_tag(ByteView key, ByteView iv, ByteView data);

// ---------------------------------------------------------------------------
// CBC + HMAC (tunnel profile: AES-128-CBC, PKCS#7 padding, encrypt-then-MAC)

Bytes cbc_encrypt(ByteView key16, ByteView iv16, ByteView plaintext);
// Throws Error(AuthenticationFailure) on padding errors.
Bytes cbc_decrypt(ByteView key16, ByteView iv16, ByteView ciphertext);

}  // namespace sentrybus::crypto

#endif
