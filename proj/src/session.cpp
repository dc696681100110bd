#include "sentrybus/session.hpp"

#include <cstring>

#include "sentrybus/errors.hpp"

namespace sentrybus::session {

namespace {

ByteView info_view(const char* s) {
  return ByteView(reinterpret_cast<const uint8_t*>(s), std::strlen(s));
}

Bytes expand(ByteView master, const std::string& info, size_t n) {
  return crypto::hkdf_sha256(master, {}, as_view(info), n);
}

}  // namespace

SessionKeyMaterial SessionKeyMaterial::derive(ByteView master_secret, handshake::Role role,
                                              const std::vector<std::string>& receiver_names) {
  SessionKeyMaterial skm;

  Bytes i2r_key = crypto::hkdf_sha256(master_secret, {}, info_view("i2r"), 32);
  Bytes r2i_key = crypto::hkdf_sha256(master_secret, {}, info_view("r2i"), 32);
  Bytes i2r_iv = crypto::hkdf_sha256(master_secret, {}, info_view("iv:i2r"), kIvPrefixLen);
  Bytes r2i_iv = crypto::hkdf_sha256(master_secret, {}, info_view("iv:r2i"), kIvPrefixLen);

  const bool initiator = role == handshake::Role::Initiator;
  skm.send_key_ = initiator ? i2r_key : r2i_key;
  skm.recv_key_ = initiator ? r2i_key : i2r_key;
  const Bytes& send_iv = initiator ? i2r_iv : r2i_iv;
  const Bytes& recv_iv = initiator ? r2i_iv : i2r_iv;
  std::copy(send_iv.begin(), send_iv.end(), skm.send_iv_prefix_.begin());
  std::copy(recv_iv.begin(), recv_iv.end(), skm.recv_iv_prefix_.begin());

  Bytes sid = crypto::hkdf_sha256(master_secret, {}, info_view("sid"), 8);
  skm.session_id_ = get_u64_be(sid.data());
  if (skm.session_id_ == 0) skm.session_id_ = 1;  // 0 is reserved for unkeyed frames

  for (const auto& name : receiver_names) {
    skm.receiver_mac_keys_[name] = expand(master_secret, "gmac:" + name, kGmacKeyLen);
  }
  return skm;
}

std::array<uint8_t, kIvLen> SessionKeyMaterial::next_iv() {
  if (send_counter_ >= 0xffffffffu) {
    throw Error(Errc::CounterExhausted, "IV counter space spent; re-handshake required");
  }
  std::array<uint8_t, kIvLen> iv{};
  std::copy(send_iv_prefix_.begin(), send_iv_prefix_.end(), iv.begin());
  uint32_t c = send_counter_++;
  iv[8] = static_cast<uint8_t>(c >> 24);
  iv[9] = static_cast<uint8_t>(c >> 16);
  iv[10] = static_cast<uint8_t>(c >> 8);
  iv[11] = static_cast<uint8_t>(c);
  return iv;
}

ProtectedRecord SessionKeyMaterial::protect(ByteView aad, ByteView payload,
                                            const std::vector<std::string>& receivers) {
  for (const auto& name : receivers) {
    if (receiver_mac_keys_.find(name) == receiver_mac_keys_.end()) {
      throw Error(Errc::UnknownReceiver, name);
    }
  }

  ProtectedRecord record;
  record.iv = next_iv();
  auto sealed = crypto::aead_seal(send_key_, record.iv, aad, payload);
  record.ciphertext = std::move(sealed.ciphertext);
  record.tag = sealed.tag;

  for (const auto& name : receivers) {
    const Bytes& key = receiver_mac_keys_.at(name);
    record.receiver_tags.emplace_back(name,
                                      crypto::gmac_tag(key, record.iv, record.ciphertext));
  }
  return record;
}

bool SessionKeyMaterial::replay_check(uint32_t counter) const {
  if (!replay_seen_any_) return true;
  if (counter > replay_highest_) return true;
  uint32_t age = replay_highest_ - counter;
  if (age >= kReplayWindow) return false;  // older than the window
  return (replay_bitmap_ & (1ull << age)) == 0;
}

void SessionKeyMaterial::replay_commit(uint32_t counter) {
  if (!replay_seen_any_) {
    replay_seen_any_ = true;
    replay_highest_ = counter;
    replay_bitmap_ = 1;  // bit 0 = highest
    return;
  }
  if (counter > replay_highest_) {
    uint32_t shift = counter - replay_highest_;
    replay_bitmap_ = shift >= 64 ? 0 : replay_bitmap_ << shift;
    replay_bitmap_ |= 1;
    replay_highest_ = counter;
    return;
  }
  replay_bitmap_ |= 1ull << (replay_highest_ - counter);
}

Bytes SessionKeyMaterial::unprotect(ByteView aad, const ProtectedRecord& record,
                                    const std::optional<std::string>& my_name) {
  if (!std::equal(recv_iv_prefix_.begin(), recv_iv_prefix_.end(), record.iv.begin())) {
    throw Error(Errc::AuthenticationFailure, "IV prefix is not this session's peer prefix");
  }
  uint32_t counter = get_u32_be(record.iv.data() + kIvPrefixLen);
  if (!replay_check(counter)) throw Error(Errc::ReplayDetected, "counter already seen or stale");

  Bytes plaintext = crypto::aead_open(recv_key_, record.iv, aad, record.ciphertext, record.tag);

  if (my_name) {
    for (const auto& [name, tag] : record.receiver_tags) {
      if (name != *my_name) continue;
      auto it = receiver_mac_keys_.find(name);
      if (it == receiver_mac_keys_.end()) {
        throw Error(Errc::BadReceiverTag, "no MAC key for " + name);
      }
      auto expected = crypto::gmac_tag(it->second, record.iv, record.ciphertext);
      if (!ct_equal(ByteView(expected.data(), expected.size()),
                    ByteView(tag.data(), tag.size()))) {
        throw Error(Errc::BadReceiverTag, "receiver tag mismatch for " + name);
      }
    }
  }

  replay_commit(counter);
  return plaintext;
}

}  // namespace sentrybus::session
