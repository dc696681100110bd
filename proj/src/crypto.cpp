#include "sentrybus/crypto.hpp"

#include <openssl/bn.h>
#include <openssl/core_names.h>
#include <openssl/ec.h>
#include <openssl/ecdsa.h>
#include <openssl/evp.h>
#include <openssl/param_build.h>
#include <unistd.h>

#include <cstring>
#include <memory>
#include <stdexcept>

#include "sentrybus/errors.hpp"

namespace sentrybus::crypto {

namespace {

struct BnFree { void operator()(BIGNUM* p) const { BN_free(p); } };
struct BnCtxFree { void operator()(BN_CTX* p) const { BN_CTX_free(p); } };
struct EcGroupFree { void operator()(EC_GROUP* p) const { EC_GROUP_free(p); } };
struct EcPointFree { void operator()(EC_POINT* p) const { EC_POINT_free(p); } };
struct PkeyFree { void operator()(EVP_PKEY* p) const { EVP_PKEY_free(p); } };
struct PkeyCtxFree { void operator()(EVP_PKEY_CTX* p) const { EVP_PKEY_CTX_free(p); } };
struct CipherCtxFree { void operator()(EVP_CIPHER_CTX* p) const { EVP_CIPHER_CTX_free(p); } };
struct MdCtxFree { void operator()(EVP_MD_CTX* p) const { EVP_MD_CTX_free(p); } };
struct ParamBldFree { void operator()(OSSL_PARAM_BLD* p) const { OSSL_PARAM_BLD_free(p); } };
struct ParamFree { void operator()(OSSL_PARAM* p) const { OSSL_PARAM_free(p); } };
struct SigFree { void operator()(ECDSA_SIG* p) const { ECDSA_SIG_free(p); } };

using BnPtr = std::unique_ptr<BIGNUM, BnFree>;
using BnCtxPtr = std::unique_ptr<BN_CTX, BnCtxFree>;
using EcGroupPtr = std::unique_ptr<EC_GROUP, EcGroupFree>;
using EcPointPtr = std::unique_ptr<EC_POINT, EcPointFree>;
using PkeyPtr = std::unique_ptr<EVP_PKEY, PkeyFree>;
using PkeyCtxPtr = std::unique_ptr<EVP_PKEY_CTX, PkeyCtxFree>;
using CipherCtxPtr = std::unique_ptr<EVP_CIPHER_CTX, CipherCtxFree>;
using MdCtxPtr = std::unique_ptr<EVP_MD_CTX, MdCtxFree>;

[[noreturn]] void fail(const char* what) {
  throw std::runtime_error(std::string("openssl: ") + what);
}

BnPtr bn_from_hex(const char* hex) {
  BIGNUM* raw = nullptr;
  if (BN_hex2bn(&raw, hex) == 0) fail("BN_hex2bn");
  return BnPtr(raw);
}

BnPtr bn_from_bytes(ByteView v) {
  BIGNUM* raw = BN_bin2bn(v.data(), static_cast<int>(v.size()), nullptr);
  if (raw == nullptr) fail("BN_bin2bn");
  return BnPtr(raw);
}

Bytes bn_to_fixed(const BIGNUM* bn, size_t width) {
  Bytes out(width);
  if (BN_bn2binpad(bn, out.data(), static_cast<int>(width)) < 0) fail("BN_bn2binpad");
  return out;
}

const EC_GROUP* p256() {
  static EC_GROUP* group = EC_GROUP_new_by_curve_name(NID_X9_62_prime256v1);
  if (group == nullptr) fail("EC_GROUP_new_by_curve_name");
  return group;
}

// Uniform scalar in [1, order-1] by rejection sampling from the DRBG.
BnPtr random_scalar(const BIGNUM* order, HmacDrbg& drbg) {
  size_t len = static_cast<size_t>(BN_num_bytes(order));
  for (;;) {
    Bytes candidate = drbg.generate(len);
    BnPtr x = bn_from_bytes(candidate);
    if (!BN_is_zero(x.get()) && BN_cmp(x.get(), order) < 0) return x;
  }
}

Bytes os_entropy(size_t n) {
  Bytes out(n);
  size_t off = 0;
  while (off < n) {
    size_t chunk = std::min<size_t>(n - off, 256);
    if (getentropy(out.data() + off, chunk) != 0) fail("getentropy");
    off += chunk;
  }
  return out;
}

const EVP_CIPHER* gcm_cipher(size_t key_len) {
  if (key_len == 16) return EVP_aes_128_gcm();
  if (key_len == 32) return EVP_aes_256_gcm();
  throw std::invalid_argument("AES-GCM key must be 16 or 32 bytes");
}

}  // namespace

const char* suite_name(Suite s) {
  switch (s) {
    case Suite::DhModp2048_256: return "DH+MODP-2048-256";
    case Suite::EcdhP256: return "ECDH+prime256v1";
  }
  return "?";
}

std::optional<Suite> suite_from_wire(uint8_t b) {
  if (b == static_cast<uint8_t>(Suite::DhModp2048_256)) return Suite::DhModp2048_256;
  if (b == static_cast<uint8_t>(Suite::EcdhP256)) return Suite::EcdhP256;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Hash / MAC / KDF

std::array<uint8_t, kHashLen> sha256(ByteView data) {
  std::array<uint8_t, kHashLen> out{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), out.data(), &len, EVP_sha256(), nullptr) != 1 ||
      len != kHashLen) {
    fail("EVP_Digest");
  }
  return out;
}

std::array<uint8_t, kHashLen> hmac_sha256(ByteView key, ByteView data) {
  constexpr size_t kBlock = 64;
  std::array<uint8_t, kBlock> k_block{};
  if (key.size() > kBlock) {
    auto digest = sha256(key);
    std::memcpy(k_block.data(), digest.data(), digest.size());
  } else {
    std::memcpy(k_block.data(), key.data(), key.size());
  }

  Bytes inner;
  inner.reserve(kBlock + data.size());
  for (size_t i = 0; i < kBlock; ++i) inner.push_back(k_block[i] ^ 0x36);
  append(inner, data);
  auto inner_hash = sha256(inner);

  Bytes outer;
  outer.reserve(kBlock + kHashLen);
  for (size_t i = 0; i < kBlock; ++i) outer.push_back(k_block[i] ^ 0x5c);
  append(outer, ByteView(inner_hash.data(), inner_hash.size()));
  return sha256(outer);
}

Bytes hkdf_sha256(ByteView ikm, ByteView salt, ByteView info, size_t out_len) {
  if (out_len > 255 * kHashLen) throw Error(Errc::OutputTooLong, "HKDF output too long");
  auto prk = hmac_sha256(salt, ikm);

  Bytes okm;
  okm.reserve(out_len);
  std::array<uint8_t, kHashLen> t{};
  size_t t_len = 0;
  uint8_t counter = 1;
  while (okm.size() < out_len) {
    Bytes block;
    block.reserve(t_len + info.size() + 1);
    append(block, ByteView(t.data(), t_len));
    append(block, info);
    block.push_back(counter++);
    t = hmac_sha256(ByteView(prk.data(), prk.size()), block);
    t_len = kHashLen;
    size_t take = std::min(kHashLen, out_len - okm.size());
    append(okm, ByteView(t.data(), take));
  }
  return okm;
}

// ---------------------------------------------------------------------------
// HMAC-DRBG

namespace {
constexpr uint64_t kReseedInterval = 1ull << 48;
}

HmacDrbg HmacDrbg::from_os_entropy() {
  Bytes entropy = os_entropy(32);
  Bytes nonce = os_entropy(16);
  return from_seed(entropy, nonce);
}

HmacDrbg HmacDrbg::from_seed(ByteView entropy, ByteView nonce, ByteView personalization) {
  HmacDrbg d;
  d.key_.fill(0x00);
  d.value_.fill(0x01);
  Bytes seed;
  seed.reserve(entropy.size() + nonce.size() + personalization.size());
  append(seed, entropy);
  append(seed, nonce);
  append(seed, personalization);
  d.update(seed);
  d.reseed_counter_ = 1;
  return d;
}

void HmacDrbg::update(ByteView provided) {
  Bytes buf;
  buf.reserve(value_.size() + 1 + provided.size());
  append(buf, ByteView(value_.data(), value_.size()));
  buf.push_back(0x00);
  append(buf, provided);
  key_ = hmac_sha256(ByteView(key_.data(), key_.size()), buf);
  value_ = hmac_sha256(ByteView(key_.data(), key_.size()), ByteView(value_.data(), value_.size()));
  if (!provided.empty()) {
    buf.clear();
    append(buf, ByteView(value_.data(), value_.size()));
    buf.push_back(0x01);
    append(buf, provided);
    key_ = hmac_sha256(ByteView(key_.data(), key_.size()), buf);
    value_ =
        hmac_sha256(ByteView(key_.data(), key_.size()), ByteView(value_.data(), value_.size()));
  }
}

void HmacDrbg::reseed() {
  Bytes entropy = os_entropy(32);
  update(entropy);
  reseed_counter_ = 1;
}

Bytes HmacDrbg::generate(size_t n) {
  if (reseed_counter_ > kReseedInterval) reseed();
  Bytes out;
  out.reserve(n);
  while (out.size() < n) {
    value_ =
        hmac_sha256(ByteView(key_.data(), key_.size()), ByteView(value_.data(), value_.size()));
    size_t take = std::min(kHashLen, n - out.size());
    append(out, ByteView(value_.data(), take));
  }
  update({});
  ++reseed_counter_;
  return out;
}

// ---------------------------------------------------------------------------
// MODP key agreement

// RFC 5114 §2.3 (2048-bit MODP group with 256-bit prime order subgroup).
const ModpGroup kModp2048_256 = {
    "87A8E61DB4B6663CFFBBD19C651959998CEEF608660DD0F25D2CEED4435E3B00"
    "E00DF8F1D61957D4FAF7DF4561B2AA3016C3D91134096FAA3BF4296D830E9A7C"
    "209E0C6497517ABD5A8A9D306BCF67ED91F9E6725B4758C022E0B1EF4275BF7B"
    "6C5BFC11D45F9088B941F54EB1E59BB8BC39A0BF12307F5C4FDB70C581B23F76"
    "B63ACAE1CAA6B7902D52526735488A0EF13C6D9A51BFA4AB3AD8347796524D8E"
    "F6A167B5A41825D967E144E5140564251CCACB83E6B486F6B3CA3F7971506026"
    "C0B857F689962856DED4010ABD0BE621C3A3960A54E710C375F26375D7014103"
    "A4B54330C198AF126116D2276E11715F693877FAD7EF09CADB094AE91E1A1597",
    "3FB32C9B73134D0B2E77506660EDBD484CA7B18F21EF205407F4793A1A0BA125"
    "10DBC15077BE463FFF4FED4AAC0BB555BE3A6C1B0C6B47B1BC3773BF7E8C6F62"
    "901228F8C28CBB18A55AE31341000A650196F931C77A57F2DDF463E5E9EC144B"
    "777DE62AAAB8A8628AC376D282D6ED3864E67982428EBC831D14348F6F2F9193"
    "B5045AF2767164E1DFC967C1FB3F2E55A4BD1BFFE83B9C80D052B985D182EA0A"
    "DB2A3B7313D3FE14C8484B1E052588B9B7D2BBD2DF016199ECD06E1557CD0915"
    "B3353BBB64E0EC377FD028370DF92B52C7891428CDC67EB6184B523D1DB246C3"
    "2F63078490F00EF8D647D148D47954515E2327CFEF98C582664B4C0F6CC41659",
    "8CF83642A709A097B447997640129DA299B1A47D1EB3750BA308B0FE64F5FBD3",
    256,
};

namespace {

KeyAgreementKeypair modp_from_scalar_impl(const ModpGroup& group, BnPtr x) {
  BnCtxPtr ctx(BN_CTX_new());
  BnPtr p = bn_from_hex(group.p_hex);
  BnPtr g = bn_from_hex(group.g_hex);
  BnPtr q = bn_from_hex(group.q_hex);
  if (BN_is_zero(x.get()) || BN_cmp(x.get(), q.get()) >= 0) {
    throw std::invalid_argument("MODP scalar out of range");
  }
  BnPtr y(BN_new());
  if (BN_mod_exp(y.get(), g.get(), x.get(), p.get(), ctx.get()) != 1) fail("BN_mod_exp");

  KeyAgreementKeypair kp;
  kp.suite = Suite::DhModp2048_256;
  kp.modp = &group;
  kp.private_scalar = bn_to_fixed(x.get(), static_cast<size_t>(BN_num_bytes(q.get())));
  kp.public_value = bn_to_fixed(y.get(), group.element_size);
  return kp;
}

Bytes modp_shared_impl(const ModpGroup& group, ByteView priv, ByteView peer_public) {
  if (peer_public.size() != group.element_size) {
    throw Error(Errc::InvalidPeerPublic, "wrong element size");
  }
  BnCtxPtr ctx(BN_CTX_new());
  BnPtr p = bn_from_hex(group.p_hex);
  BnPtr q = bn_from_hex(group.q_hex);
  BnPtr y = bn_from_bytes(peer_public);

  // y must lie in [2, p-2] and in the order-q subgroup.
  BnPtr p_minus_1(BN_dup(p.get()));
  BN_sub_word(p_minus_1.get(), 1);
  BnPtr two(BN_new());
  BN_set_word(two.get(), 2);
  if (BN_cmp(y.get(), two.get()) < 0 || BN_cmp(y.get(), p_minus_1.get()) >= 0) {
    throw Error(Errc::InvalidPeerPublic, "value outside [2, p-2]");
  }
  BnPtr check(BN_new());
  if (BN_mod_exp(check.get(), y.get(), q.get(), p.get(), ctx.get()) != 1) fail("BN_mod_exp");
  if (!BN_is_one(check.get())) {
    throw Error(Errc::InvalidPeerPublic, "not in prime-order subgroup");
  }

  BnPtr x = bn_from_bytes(priv);
  BnPtr z(BN_new());
  if (BN_mod_exp(z.get(), y.get(), x.get(), p.get(), ctx.get()) != 1) fail("BN_mod_exp");
  return bn_to_fixed(z.get(), group.element_size);
}

}  // namespace

KeyAgreementKeypair modp_generate(const ModpGroup& group, HmacDrbg& drbg) {
  BnPtr q = bn_from_hex(group.q_hex);
  return modp_from_scalar_impl(group, random_scalar(q.get(), drbg));
}

KeyAgreementKeypair modp_keypair_from_scalar(const ModpGroup& group, ByteView scalar) {
  return modp_from_scalar_impl(group, bn_from_bytes(scalar));
}

// ---------------------------------------------------------------------------
// P-256 key agreement

namespace {

constexpr size_t kP256PointLen = 65;
constexpr size_t kP256ScalarLen = 32;

BnPtr p256_order() {
  BnPtr order(BN_new());
  if (EC_GROUP_get_order(p256(), order.get(), nullptr) != 1) fail("EC_GROUP_get_order");
  return order;
}

Bytes p256_point_encode(const EC_POINT* pt) {
  Bytes out(kP256PointLen);
  BnCtxPtr ctx(BN_CTX_new());
  size_t n = EC_POINT_point2oct(p256(), pt, POINT_CONVERSION_UNCOMPRESSED, out.data(), out.size(),
                                ctx.get());
  if (n != kP256PointLen) fail("EC_POINT_point2oct");
  return out;
}

EcPointPtr p256_point_decode(ByteView encoded) {
  if (encoded.size() != kP256PointLen || encoded[0] != 0x04) {
    throw Error(Errc::InvalidPeerPublic, "expected uncompressed point");
  }
  BnCtxPtr ctx(BN_CTX_new());
  EcPointPtr pt(EC_POINT_new(p256()));
  if (EC_POINT_oct2point(p256(), pt.get(), encoded.data(), encoded.size(), ctx.get()) != 1) {
    throw Error(Errc::InvalidPeerPublic, "not a curve point");
  }
  if (EC_POINT_is_at_infinity(p256(), pt.get()) ||
      EC_POINT_is_on_curve(p256(), pt.get(), ctx.get()) != 1) {
    throw Error(Errc::InvalidPeerPublic, "not a curve point");
  }
  return pt;
}

KeyAgreementKeypair p256_generate(HmacDrbg& drbg) {
  BnPtr order = p256_order();
  BnPtr d = random_scalar(order.get(), drbg);
  BnCtxPtr ctx(BN_CTX_new());
  EcPointPtr pub(EC_POINT_new(p256()));
  if (EC_POINT_mul(p256(), pub.get(), d.get(), nullptr, nullptr, ctx.get()) != 1) {
    fail("EC_POINT_mul");
  }
  KeyAgreementKeypair kp;
  kp.suite = Suite::EcdhP256;
  kp.private_scalar = bn_to_fixed(d.get(), kP256ScalarLen);
  kp.public_value = p256_point_encode(pub.get());
  return kp;
}

Bytes p256_shared(ByteView priv, ByteView peer_public) {
  EcPointPtr peer = p256_point_decode(peer_public);
  BnPtr d = bn_from_bytes(priv);
  BnCtxPtr ctx(BN_CTX_new());
  EcPointPtr shared(EC_POINT_new(p256()));
  if (EC_POINT_mul(p256(), shared.get(), nullptr, peer.get(), d.get(), ctx.get()) != 1) {
    fail("EC_POINT_mul");
  }
  if (EC_POINT_is_at_infinity(p256(), shared.get())) {
    throw Error(Errc::InvalidPeerPublic, "degenerate shared point");
  }
  BnPtr x(BN_new());
  BnPtr y(BN_new());
  if (EC_POINT_get_affine_coordinates(p256(), shared.get(), x.get(), y.get(), ctx.get()) != 1) {
    fail("EC_POINT_get_affine_coordinates");
  }
  return bn_to_fixed(x.get(), kP256ScalarLen);
}

}  // namespace

KeyAgreementKeypair keyagree_generate(Suite suite, HmacDrbg& drbg) {
  if (suite == Suite::EcdhP256) return p256_generate(drbg);
  return modp_generate(kModp2048_256, drbg);
}

Bytes keyagree_shared(const KeyAgreementKeypair& own, ByteView peer_public) {
  if (own.suite == Suite::EcdhP256) return p256_shared(own.private_scalar, peer_public);
  const ModpGroup& group = own.modp != nullptr ? *own.modp : kModp2048_256;
  return modp_shared_impl(group, own.private_scalar, peer_public);
}

// ---------------------------------------------------------------------------
// ECDSA P-256 / SHA-256

namespace {

PkeyPtr p256_pkey(ByteView priv, ByteView pub) {
  std::unique_ptr<OSSL_PARAM_BLD, ParamBldFree> bld(OSSL_PARAM_BLD_new());
  BnPtr d;
  if (!priv.empty()) {
    d = bn_from_bytes(priv);
    if (OSSL_PARAM_BLD_push_BN(bld.get(), OSSL_PKEY_PARAM_PRIV_KEY, d.get()) != 1) {
      fail("OSSL_PARAM_BLD_push_BN");
    }
  }
  if (OSSL_PARAM_BLD_push_utf8_string(bld.get(), OSSL_PKEY_PARAM_GROUP_NAME, "prime256v1", 0) !=
          1 ||
      OSSL_PARAM_BLD_push_octet_string(bld.get(), OSSL_PKEY_PARAM_PUB_KEY, pub.data(),
                                       pub.size()) != 1) {
    fail("OSSL_PARAM_BLD_push");
  }
  std::unique_ptr<OSSL_PARAM, ParamFree> params(OSSL_PARAM_BLD_to_param(bld.get()));
  PkeyCtxPtr ctx(EVP_PKEY_CTX_new_from_name(nullptr, "EC", nullptr));
  EVP_PKEY* raw = nullptr;
  int selection = priv.empty() ? EVP_PKEY_PUBLIC_KEY : EVP_PKEY_KEYPAIR;
  if (EVP_PKEY_fromdata_init(ctx.get()) != 1 ||
      EVP_PKEY_fromdata(ctx.get(), &raw, selection, params.get()) != 1) {
    fail("EVP_PKEY_fromdata");
  }
  return PkeyPtr(raw);
}

}  // namespace

Bytes ecdsa_public_from_private(ByteView private_scalar) {
  BnPtr d = bn_from_bytes(private_scalar);
  BnCtxPtr ctx(BN_CTX_new());
  EcPointPtr pub(EC_POINT_new(p256()));
  if (EC_POINT_mul(p256(), pub.get(), d.get(), nullptr, nullptr, ctx.get()) != 1) {
    fail("EC_POINT_mul");
  }
  return p256_point_encode(pub.get());
}

SigningKeypair ecdsa_generate(HmacDrbg& drbg) {
  BnPtr order = p256_order();
  BnPtr d = random_scalar(order.get(), drbg);
  SigningKeypair kp;
  kp.private_scalar = bn_to_fixed(d.get(), kP256ScalarLen);
  kp.public_point = ecdsa_public_from_private(kp.private_scalar);
  return kp;
}

Bytes ecdsa_sign(ByteView private_scalar, ByteView message) {
  Bytes pub = ecdsa_public_from_private(private_scalar);
  PkeyPtr key = p256_pkey(private_scalar, pub);
  MdCtxPtr md(EVP_MD_CTX_new());
  if (EVP_DigestSignInit(md.get(), nullptr, EVP_sha256(), nullptr, key.get()) != 1) {
    fail("EVP_DigestSignInit");
  }
  size_t sig_len = 0;
  if (EVP_DigestSign(md.get(), nullptr, &sig_len, message.data(), message.size()) != 1) {
    fail("EVP_DigestSign");
  }
  Bytes sig(sig_len);
  if (EVP_DigestSign(md.get(), sig.data(), &sig_len, message.data(), message.size()) != 1) {
    fail("EVP_DigestSign");
  }
  sig.resize(sig_len);
  return sig;
}

bool ecdsa_verify(ByteView public_point, ByteView message, ByteView signature) {
  // Reject undecodable signatures before attempting verification; this is a
  // different failure from a well-formed signature that does not verify.
  if (signature.empty() || signature.size() > 72) {
    throw Error(Errc::MalformedSignature, "bad signature length");
  }
  const unsigned char* der = signature.data();
  std::unique_ptr<ECDSA_SIG, SigFree> parsed(
      d2i_ECDSA_SIG(nullptr, &der, static_cast<long>(signature.size())));
  if (parsed == nullptr || der != signature.data() + signature.size()) {
    throw Error(Errc::MalformedSignature, "not DER");
  }

  PkeyPtr key = p256_pkey({}, public_point);
  MdCtxPtr md(EVP_MD_CTX_new());
  if (EVP_DigestVerifyInit(md.get(), nullptr, EVP_sha256(), nullptr, key.get()) != 1) {
    fail("EVP_DigestVerifyInit");
  }
  int rc = EVP_DigestVerify(md.get(), signature.data(), signature.size(), message.data(),
                            message.size());
  return rc == 1;
}

// ---------------------------------------------------------------------------
// AES-GCM

Sealed aead_seal(ByteView key, ByteView iv, ByteView aad, ByteView plaintext) {
  if (iv.size() != kGcmIvLen) throw std::invalid_argument("AES-GCM IV must be 12 bytes");
  CipherCtxPtr ctx(EVP_CIPHER_CTX_new());
  if (EVP_EncryptInit_ex(ctx.get(), gcm_cipher(key.size()), nullptr, nullptr, nullptr) != 1 ||
      EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_IVLEN, kGcmIvLen, nullptr) != 1 ||
      EVP_EncryptInit_ex(ctx.get(), nullptr, nullptr, key.data(), iv.data()) != 1) {
    fail("EVP_EncryptInit_ex");
  }
  int out_len = 0;
  if (!aad.empty() &&
      EVP_EncryptUpdate(ctx.get(), nullptr, &out_len, aad.data(),
                        static_cast<int>(aad.size())) != 1) {
    fail("EVP_EncryptUpdate aad");
  }
  Sealed sealed;
  sealed.ciphertext.resize(plaintext.size());
  if (!plaintext.empty() &&
      EVP_EncryptUpdate(ctx.get(), sealed.ciphertext.data(), &out_len, plaintext.data(),
                        static_cast<int>(plaintext.size())) != 1) {
    fail("EVP_EncryptUpdate");
  }
  int fin_len = 0;
  if (EVP_EncryptFinal_ex(ctx.get(), sealed.ciphertext.data() + sealed.ciphertext.size(),
                          &fin_len) != 1 ||
      fin_len != 0) {
    fail("EVP_EncryptFinal_ex");
  }
  if (EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_GET_TAG, kGcmTagLen, sealed.tag.data()) != 1) {
    fail("EVP_CTRL_GCM_GET_TAG");
  }
  return sealed;
}

Bytes aead_open(ByteView key, ByteView iv, ByteView aad, ByteView ciphertext, ByteView tag) {
  if (iv.size() != kGcmIvLen) throw std::invalid_argument("AES-GCM IV must be 12 bytes");
  if (tag.size() != kGcmTagLen) throw Error(Errc::AuthenticationFailure, "bad tag length");
  CipherCtxPtr ctx(EVP_CIPHER_CTX_new());
  if (EVP_DecryptInit_ex(ctx.get(), gcm_cipher(key.size()), nullptr, nullptr, nullptr) != 1 ||
      EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_IVLEN, kGcmIvLen, nullptr) != 1 ||
      EVP_DecryptInit_ex(ctx.get(), nullptr, nullptr, key.data(), iv.data()) != 1) {
    fail("EVP_DecryptInit_ex");
  }
  int out_len = 0;
  if (!aad.empty() &&
      EVP_DecryptUpdate(ctx.get(), nullptr, &out_len, aad.data(),
                        static_cast<int>(aad.size())) != 1) {
    fail("EVP_DecryptUpdate aad");
  }
  Bytes plaintext(ciphertext.size());
  if (!ciphertext.empty() &&
      EVP_DecryptUpdate(ctx.get(), plaintext.data(), &out_len, ciphertext.data(),
                        static_cast<int>(ciphertext.size())) != 1) {
    fail("EVP_DecryptUpdate");
  }
  if (EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_TAG, kGcmTagLen,
                          const_cast<uint8_t*>(tag.data())) != 1) {
    fail("EVP_CTRL_GCM_SET_TAG");
  }
  int fin_len = 0;
  if (EVP_DecryptFinal_ex(ctx.get(), plaintext.data() + plaintext.size(), &fin_len) != 1) {
    throw Error(Errc::AuthenticationFailure, "AEAD tag mismatch");
  }
  return plaintext;
}

std::array<uint8_t, kGcmTagLen> gmac_tag(ByteView key, ByteView iv, ByteView data) {
  return aead_seal(key, iv, data, {}).tag;
}

// ---------------------------------------------------------------------------
// AES-128-CBC (PKCS#7)

Bytes cbc_encrypt(ByteView key16, ByteView iv16, ByteView plaintext) {
  if (key16.size() != 16 || iv16.size() != 16) {
    throw std::invalid_argument("AES-128-CBC needs 16-byte key and IV");
  }
  CipherCtxPtr ctx(EVP_CIPHER_CTX_new());
  if (EVP_EncryptInit_ex(ctx.get(), EVP_aes_128_cbc(), nullptr, key16.data(), iv16.data()) != 1) {
    fail("EVP_EncryptInit_ex cbc");
  }
  Bytes out(plaintext.size() + 16);
  int len1 = 0;
  if (!plaintext.empty() &&
      EVP_EncryptUpdate(ctx.get(), out.data(), &len1, plaintext.data(),
                        static_cast<int>(plaintext.size())) != 1) {
    fail("EVP_EncryptUpdate cbc");
  }
  int len2 = 0;
  if (EVP_EncryptFinal_ex(ctx.get(), out.data() + len1, &len2) != 1) fail("EVP_EncryptFinal cbc");
  out.resize(static_cast<size_t>(len1 + len2));
  return out;
}

Bytes cbc_decrypt(ByteView key16, ByteView iv16, ByteView ciphertext) {
  if (key16.size() != 16 || iv16.size() != 16) {
    throw std::invalid_argument("AES-128-CBC needs 16-byte key and IV");
  }
  if (ciphertext.empty() || ciphertext.size() % 16 != 0) {
    throw Error(Errc::AuthenticationFailure, "bad CBC length");
  }
  CipherCtxPtr ctx(EVP_CIPHER_CTX_new());
  if (EVP_DecryptInit_ex(ctx.get(), EVP_aes_128_cbc(), nullptr, key16.data(), iv16.data()) != 1) {
    fail("EVP_DecryptInit_ex cbc");
  }
  Bytes out(ciphertext.size());
  int len1 = 0;
  if (EVP_DecryptUpdate(ctx.get(), out.data(), &len1, ciphertext.data(),
                        static_cast<int>(ciphertext.size())) != 1) {
    fail("EVP_DecryptUpdate cbc");
  }
  int len2 = 0;
  if (EVP_DecryptFinal_ex(ctx.get(), out.data() + len1, &len2) != 1) {
    throw Error(Errc::AuthenticationFailure, "bad CBC padding");
  }
  out.resize(static_cast<size_t>(len1 + len2));
  return out;
}

}  // namespace sentrybus::crypto
