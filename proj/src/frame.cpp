#include "sentrybus/frame.hpp"

#include "sentrybus/errors.hpp"

namespace sentrybus::frame {

namespace {
constexpr size_t kFixedHeader = 4 + 1 + 1 + 8 + 4 + 1;  // up to and including topicLen
}

size_t header_size(const Frame& f) { return kFixedHeader + f.topic.size() + 4; }

Bytes header_bytes(Kind kind, uint64_t session_id, uint32_t sequence, const std::string& topic,
                   size_t body_len) {
  if (topic.size() > 255 || (kind == Kind::Data && topic.empty())) {
    throw Error(Errc::MalformedMessage, "bad topic length");
  }
  Bytes out;
  out.reserve(kFixedHeader + topic.size() + 4);
  append(out, ByteView(kMagic.data(), kMagic.size()));
  out.push_back(kVersion);
  out.push_back(static_cast<uint8_t>(kind));
  put_u64_be(out, session_id);
  put_u32_be(out, sequence);
  out.push_back(static_cast<uint8_t>(topic.size()));
  append(out, as_view(topic));
  put_u32_be(out, static_cast<uint32_t>(body_len));
  return out;
}

Bytes header_bytes(const Frame& f) {
  return header_bytes(f.kind, f.session_id, f.sequence, f.topic, f.body.size());
}

Bytes encode(const Frame& f) {
  Bytes out = header_bytes(f);
  if (out.size() + f.body.size() > kMaxDatagram) {
    throw Error(Errc::PayloadTooLarge, "frame exceeds one datagram");
  }
  append(out, f.body);
  return out;
}

std::optional<Frame> decode(ByteView datagram) {
  if (datagram.size() < kFixedHeader + 1 + 4 || datagram.size() > kMaxDatagram) {
    return std::nullopt;
  }
  if (!std::equal(kMagic.begin(), kMagic.end(), datagram.begin())) return std::nullopt;
  if (datagram[4] != kVersion) return std::nullopt;
  uint8_t kind = datagram[5];
  if (kind > static_cast<uint8_t>(Kind::BenchCtrl)) return std::nullopt;

  Frame f;
  f.kind = static_cast<Kind>(kind);
  f.session_id = get_u64_be(datagram.data() + 6);
  f.sequence = get_u32_be(datagram.data() + 14);
  uint8_t topic_len = datagram[18];
  if (topic_len == 0 && f.kind == Kind::Data) return std::nullopt;
  size_t body_len_at = kFixedHeader + topic_len;
  if (datagram.size() < body_len_at + 4) return std::nullopt;
  f.topic = std::string(reinterpret_cast<const char*>(datagram.data() + kFixedHeader), topic_len);
  uint32_t body_len = get_u32_be(datagram.data() + body_len_at);
  if (datagram.size() != body_len_at + 4 + body_len) return std::nullopt;
  f.body = to_bytes(datagram.subspan(body_len_at + 4));
  return f;
}

// ---------------------------------------------------------------------------
// Crypto DATA body

Bytes encode_protected(const session::ProtectedRecord& record) {
  if (record.receiver_tags.size() > 255) {
    throw Error(Errc::MalformedMessage, "too many receiver tags");
  }
  Bytes out;
  append(out, ByteView(record.iv.data(), record.iv.size()));
  append(out, record.ciphertext);
  append(out, ByteView(record.tag.data(), record.tag.size()));
  out.push_back(static_cast<uint8_t>(record.receiver_tags.size()));
  for (const auto& [name, tag] : record.receiver_tags) {
    if (name.empty() || name.size() > 255) {
      throw Error(Errc::MalformedMessage, "bad receiver name length");
    }
    out.push_back(static_cast<uint8_t>(name.size()));
    append(out, as_view(name));
    append(out, ByteView(tag.data(), tag.size()));
  }
  return out;
}

namespace {

// Builds the receiver-tag list for a trailer already known to be consistent.
void read_trailer(ByteView body, size_t start, session::ProtectedRecord& record) {
  size_t pos = start;
  uint8_t count = body[pos++];
  for (uint8_t i = 0; i < count; ++i) {
    uint8_t name_len = body[pos++];
    std::string name(reinterpret_cast<const char*>(body.data() + pos), name_len);
    pos += name_len;
    std::array<uint8_t, session::kTagLen> tag{};
    std::copy(body.begin() + pos, body.begin() + pos + session::kTagLen, tag.begin());
    pos += session::kTagLen;
    record.receiver_tags.emplace_back(std::move(name), tag);
  }
}

}  // namespace

std::vector<session::ProtectedRecord> decode_protected(ByteView body) {
  std::vector<session::ProtectedRecord> candidates;
  if (body.size() < session::kIvLen + session::kTagLen + 1) return candidates;

  // The receiver-tag entry grammar {nameLen(1), name, tag(16)} chains forward,
  // so one backward pass counts how many whole entries fit exactly between
  // each position and the end of the body (-1: no exact chain).
  const size_t end = body.size();
  const size_t min_start = session::kIvLen + session::kTagLen;
  std::vector<int> entries_to_end(end + 1, -1);
  entries_to_end[end] = 0;
  for (size_t p = end; p-- > min_start + 1;) {
    uint8_t name_len = body[p];
    if (name_len == 0) continue;
    size_t next = p + 1 + name_len + session::kTagLen;
    if (next <= end && entries_to_end[next] >= 0) {
      entries_to_end[p] = entries_to_end[next] + 1;
    }
  }

  // Trailer candidates from shortest (count byte only) to longest; the true
  // parse is always among them since its walk is exactly consistent. More
  // than one candidate is possible with adversarial ciphertext bytes; the
  // caller resolves ambiguity with the AEAD tag.
  for (size_t start = end; start-- > min_start;) {
    if (static_cast<int>(body[start]) != entries_to_end[start + 1]) continue;
    session::ProtectedRecord record;
    std::copy(body.begin(), body.begin() + session::kIvLen, record.iv.begin());
    size_t ct_len = start - session::kIvLen - session::kTagLen;
    record.ciphertext = to_bytes(body.subspan(session::kIvLen, ct_len));
    std::copy(body.begin() + start - session::kTagLen, body.begin() + start,
              record.tag.begin());
    read_trailer(body, start, record);
    candidates.push_back(std::move(record));
  }
  return candidates;
}

// ---------------------------------------------------------------------------
// Tunnel DATA body

Bytes encode_tunnel(const TunnelBody& body) {
  Bytes out;
  append(out, ByteView(body.iv.data(), body.iv.size()));
  append(out, body.ciphertext);
  append(out, ByteView(body.mac.data(), body.mac.size()));
  return out;
}

std::optional<TunnelBody> decode_tunnel(ByteView body) {
  if (body.size() < 16 + 16 + 32) return std::nullopt;  // at least one cipher block
  TunnelBody t;
  std::copy(body.begin(), body.begin() + 16, t.iv.begin());
  t.ciphertext = to_bytes(body.subspan(16, body.size() - 16 - 32));
  std::copy(body.end() - 32, body.end(), t.mac.begin());
  if (t.ciphertext.size() % 16 != 0) return std::nullopt;
  return t;
}

}  // namespace sentrybus::frame
