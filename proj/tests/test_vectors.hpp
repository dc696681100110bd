// Known-answer vectors from public standards, plus fixed-input values
// recomputed with independent implementations before being frozen here.
#ifndef SENTRYBUS_TEST_VECTORS_HPP
#define SENTRYBUS_TEST_VECTORS_HPP

namespace vectors {

// --- RFC 5869 Appendix A (HKDF-SHA256) ---
struct HkdfCase {
  const char* ikm;
  const char* salt;
  const char* info;
  unsigned out_len;
  const char* okm;
};

inline constexpr HkdfCase kHkdf[] = {
    // A.1 basic
    {"0b0b0b0b0b0b0b0b0b0b0b0b0b0b0b0b0b0b0b0b0b0b", "000102030405060708090a0b0c",
     "f0f1f2f3f4f5f6f7f8f9", 42,
     "3cb25f25faacd57a90434f64d0362f2a2d2d0a90cf1a5a4c5db02d56ecc4c5bf34007208d5b887185865"},
    // A.2 longer inputs
    {"000102030405060708090a0b0c0d0e0f101112131415161718191a1b1c1d1e1f2021222324252627"
     "28292a2b2c2d2e2f303132333435363738393a3b3c3d3e3f404142434445464748494a4b4c4d4e4f",
     "606162636465666768696a6b6c6d6e6f707172737475767778797a7b7c7d7e7f8081828384858687"
     "88898a8b8c8d8e8f909192939495969798999a9b9c9d9e9fa0a1a2a3a4a5a6a7a8a9aaabacadaeaf",
     "b0b1b2b3b4b5b6b7b8b9babbbcbdbebfc0c1c2c3c4c5c6c7c8c9cacbcccdcecfd0d1d2d3d4d5d6d7"
     "d8d9dadbdcdddedfe0e1e2e3e4e5e6e7e8e9eaebecedeeeff0f1f2f3f4f5f6f7f8f9fafbfcfdfeff",
     82,
     "b11e398dc80327a1c8e7f78c596a49344f012eda2d4efad8a050cc4c19afa97c59045a99cac7827271"
     "cb41c65e590e09da3275600c2f09b8367793a9aca3db71cc30c58179ec3e87c14c01d5c1f3434f1d87"},
    // A.3 zero-length salt and info
    {"0b0b0b0b0b0b0b0b0b0b0b0b0b0b0b0b0b0b0b0b0b0b", "", "", 42,
     "8da4e775a563c18f715f802a063c5a31b8a11f5c5ee1879ec3454e5f3c738d2d9d201395faa4b61a96c8"},
};

// --- AES-GCM (McGrew/Viega GCM spec test cases, as used by NIST CAVP) ---
struct GcmCase {
  const char* key;
  const char* iv;
  const char* aad;
  const char* plaintext;
  const char* ciphertext;
  const char* tag;
};

inline constexpr GcmCase kGcm[] = {
    // AES-128, empty everything
    {"00000000000000000000000000000000", "000000000000000000000000", "", "", "",
     "58e2fccefa7e3061367f1d57a4e7455a"},
    // AES-128, one zero block
    {"00000000000000000000000000000000", "000000000000000000000000", "",
     "00000000000000000000000000000000", "0388dace60b6a392f328c2b971b2fe78",
     "ab6e47d42cec13bdf53a67b21257bddf"},
    // AES-128 with AAD (test case 4)
    {"feffe9928665731c6d6a8f9467308308", "cafebabefacedbaddecaf888",
     "feedfacedeadbeeffeedfacedeadbeefabaddad2",
     "d9313225f88406e5a55909c5aff5269a86a7a9531534f7da2e4c303d8a318a721c3c0c95956809532f"
     "cf0e2449a6b525b16aedf5aa0de657ba637b39",
     "42831ec2217774244b7221b784d0d49ce3aa212f2c02a4e035c17e2329aca12e21d514b25466931c7d"
     "8f6a5aac84aa051ba30b396a0aac973d58e091",
     "5bc94fbc3221a5db94fae95ae7121a47"},
    // AES-256, empty everything (test case 13)
    {"0000000000000000000000000000000000000000000000000000000000000000",
     "000000000000000000000000", "", "", "", "530f8afbc74536b9a963b4f1c4cb738b"},
    // AES-256 with AAD (test case 16)
    {"feffe9928665731c6d6a8f9467308308feffe9928665731c6d6a8f9467308308",
     "cafebabefacedbaddecaf888", "feedfacedeadbeeffeedfacedeadbeefabaddad2",
     "d9313225f88406e5a55909c5aff5269a86a7a9531534f7da2e4c303d8a318a721c3c0c95956809532f"
     "cf0e2449a6b525b16aedf5aa0de657ba637b39",
     "522dc1f099567d07f47f37a32a84427d643a8cdcbfe5c0c97598a2bd2555d1aa8cb08e48590dbb3da7"
     "b08b1056828838c5f61e6393ba7a0abcc9f662",
     "76fc6ece0f4e1768cddf8853bb2d551b"},
};

// --- AES-GMAC (GCM with empty plaintext, data authenticated as AAD) ---
struct GmacCase {
  const char* key;
  const char* iv;
  const char* data;
  const char* tag;
};

inline constexpr GmacCase kGmac[] = {
    {"aaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaa", "abababababababababababab",
     "feedfacedeadbeeffeedfacedeadbeefabaddad2", "9a2795b16814757188f344e4231f3d10"},
    {"11223344556677889900aabbccddeeff", "000000000000000000000001", "0011223344",
     "ac4b0f4be7a7c7ae9368664dfc8c0de8"},
};

// --- HMAC-SHA256 (RFC 4231) ---
inline constexpr const char* kHmacTc1Key = "0b0b0b0b0b0b0b0b0b0b0b0b0b0b0b0b0b0b0b0b";
inline constexpr const char* kHmacTc1Data = "4869205468657265";  // "Hi There"
inline constexpr const char* kHmacTc1Mac =
    "b0344c61d8db38535ca8afceaf0bf12b881dc200c9833da726e9376c2e32cff7";
inline constexpr const char* kHmacTc2Key = "4a656665";                    // "Jefe"
inline constexpr const char* kHmacTc2Data =
    "7768617420646f2079612077616e7420666f72206e6f7468696e673f";  // "what do ya want..."
inline constexpr const char* kHmacTc2Mac =
    "5bdcc146bf60754e6a042426089575c75a003f089d2739839dec58b964ec3843";

// --- AES-128-CBC (NIST SP 800-38A F.2.1, no padding) ---
inline constexpr const char* kCbcKey = "2b7e151628aed2a6abf7158809cf4f3c";
inline constexpr const char* kCbcIv = "000102030405060708090a0b0c0d0e0f";
inline constexpr const char* kCbcPlain =
    "6bc1bee22e409f96e93d7e117393172aae2d8a571e03ac9c9eb76fac45af8e51"
    "30c81c46a35ce411e5fbc1191a0a52eff69f2445df4f9b17ad2b417be66c3710";
inline constexpr const char* kCbcCipher =
    "7649abac8119b246cee98e9b12e9197d5086cb9b507219ee95db113a917678b2"
    "73bed6b8e3c1743b7116e69e222295163ff1caa1681fac09120eca307586e1a7";

// --- HMAC-DRBG SHA-256 (NIST CAVP, no reseed, no additional input, COUNT 0) ---
inline constexpr const char* kDrbgEntropy =
    "ca851911349384bffe89de1cbdc46e6831e44d34a4fb935ee285dd14b71a7488";
inline constexpr const char* kDrbgNonce = "659ba96c601dc69fc902940805ec0ca8";
inline constexpr const char* kDrbgReturned =
    "e528e9abf2dece54d47c7e75e5fe302149f817ea9fb4bee6f4199697d04d5b89"
    "d54fbb978a15b5c443c9ec21036d2460b6f73ebad0dc2aba6e624abf07745bc1"
    "07694bb7547bb0995f70de25d6b29e2d3011bb19d27676c07162c8b5ccde0668"
    "961df86803482cb37ed6d5c0bb8d50cf1f50d476aa0458bdaba806f48be9dcb8";

// Deterministic self-vector (recomputed with an independent implementation).
inline constexpr const char* kDrbgSelfEntropy =
    "0101010101010101010101010101010101010101010101010101010101010101";
inline constexpr const char* kDrbgSelfNonce = "02020202020202020202020202020202";
inline constexpr const char* kDrbgSelfPers = "73656e747279";  // "sentry"
inline constexpr const char* kDrbgSelfG1 =
    "921d89db5d8f30b4ae5a59469e8dcf71fc5533aab34f0d0684249fae4df78255";
inline constexpr const char* kDrbgSelfG2 =
    "dac82632436c8d4f04cad496c365240764df29bb03e4c68c47413c2bf2405a20";

// --- ECDSA P-256 / SHA-256 (RFC 6979 A.2.5 deterministic signatures) ---
inline constexpr const char* kEcdsaPriv =
    "c9afa9d845ba75166b5c215767b1d6934e50c3db36e89b127b8a622b120f6721";
inline constexpr const char* kEcdsaPub =
    "0460fed4ba255a9d31c961eb74c6356d68c049b8923b61fa6ce669622e60f29fb6"
    "7903fe1008b8bc99a41ae9e95628bc64f2f1b20c2d7e9f5177a3c294d4462299";
inline constexpr const char* kEcdsaMsgSample = "73616d706c65";  // "sample"
inline constexpr const char* kEcdsaSigSampleDer =
    "3046022100efd48b2aacb6a8fd1140dd9cd45e81d69d2c877b56aaf991c34d0ea84eaf3716022100"
    "f7cb1c942d657c41d436c7a1b6e29f65f3e900dbb9aff4064dc4ab2f843acda8";
inline constexpr const char* kEcdsaMsgTest = "74657374";  // "test"
inline constexpr const char* kEcdsaSigTestDer =
    "3045022100f1abb023518351cd71d881567b1ea663ed3efcf6c5132b354f28d3b0b7d38367022001"
    "9f4113742a2b14bd25926b49c649155f267e60d3814b4c0cc84250e46f0083";

// --- ECDH P-256 fixed-scalar pair (recomputed with an independent oracle) ---
inline constexpr const char* kEcdhPrivA =
    "3f49f6d4a3c55f3874c9b3e3d2103f504aff607beb40b7995899b8a6cd3c1abd";
inline constexpr const char* kEcdhPrivB =
    "55188b3d32f6bb9a900afcfbeed4e72a59cb9ac2f19d7cfb6b4fdd49f47fc5fd";
inline constexpr const char* kEcdhPubA =
    "0420b003d2f297be2c5e2c83a7e9f9a5b9eff49111acf4fddbcc0301480e359de6"
    "dc809c49652aeb6d63329abf5a52155c766345c28fed3024741c8ed01589d28b";
inline constexpr const char* kEcdhPubB =
    "041ea1f0f01faf1d9609592284f19e4c0047b58afd8615a69f559077b22faaa190"
    "4c55f33e429dad377356703a9ab85160472d1130e28e36765f89aff915b1214a";
inline constexpr const char* kEcdhShared =
    "ec0234a357c8ad05341010a60a397d9b99796b13b4f866f1868d34f373bfa698";

// --- MODP-2048-256 fixed-scalar pair (recomputed with a GMP oracle) ---
inline constexpr const char* kModpScalar1 =
    "5f1d9a5f1d9a5f1d9a5f1d9a5f1d9a5f1d9a5f1d9a5f1d9a5f1d9a5f1d9a7777";
inline constexpr const char* kModpScalar2 =
    "1234567890abcdef1234567890abcdef1234567890abcdef1234567890abcdef";

}  // namespace vectors

#endif
