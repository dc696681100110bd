#ifndef SENTRYBUS_FRAME_HPP
#define SENTRYBUS_FRAME_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sentrybus/bytes.hpp"
#include "sentrybus/session.hpp"

namespace sentrybus::frame {

// Wire layout (big-endian integers):
//   magic "SBUS" | version 0x01 | kind | sessionId(8) | sequence(4)
//   | topicLen(1) | topic | bodyLen(4) | body
constexpr std::array<uint8_t, 4> kMagic{0x53, 0x42, 0x55, 0x53};
constexpr uint8_t kVersion = 0x01;
constexpr size_t kMaxDatagram = 65507;

enum class Kind : uint8_t {
  Data = 0x00,
  HsReq = 0x01,
  HsReply = 0x02,
  HsFinal = 0x03,
  BenchCtrl = 0x04,
};

struct Frame {
  Kind kind = Kind::Data;
  uint64_t session_id = 0;
  uint32_t sequence = 0;
  std::string topic;
  Bytes body;
};

size_t header_size(const Frame& f);
Bytes header_bytes(const Frame& f);  // everything before the body (AEAD AAD)
Bytes header_bytes(Kind kind, uint64_t session_id, uint32_t sequence, const std::string& topic,
                   size_t body_len);
Bytes encode(const Frame& f);        // throws Error(PayloadTooLarge) past 65507
std::optional<Frame> decode(ByteView datagram);

// Crypto DATA body: iv(12) | ciphertext | tag(16) | receiverTagCount(1)
// | {nameLen(1), name, tag(16)}*
Bytes encode_protected(const session::ProtectedRecord& record);

// The ciphertext length is not explicit on the wire, so with receiver tags
// present more than one split can satisfy the trailer grammar. All exactly
// consistent parses are returned (almost always one); the caller picks the
// candidate whose AEAD tag verifies.
std::vector<session::ProtectedRecord> decode_protected(ByteView body);

// Tunnel DATA body: iv(16) | cbcCiphertext | hmac(32)
struct TunnelBody {
  std::array<uint8_t, 16> iv{};
  Bytes ciphertext;
  std::array<uint8_t, 32> mac{};
};

Bytes encode_tunnel(const TunnelBody& body);
std::optional<TunnelBody> decode_tunnel(ByteView body);

}  // namespace sentrybus::frame

#endif
