#include "sentrybus/tlv.hpp"

#include "sentrybus/errors.hpp"

namespace sentrybus::tlv {

void put(Bytes& out, uint8_t tag, ByteView value) {
  if (value.size() > 0xffff) throw Error(Errc::MalformedMessage, "TLV value too long");
  out.push_back(tag);
  put_u16_be(out, static_cast<uint16_t>(value.size()));
  append(out, value);
}

std::optional<Reader::Item> Reader::next() {
  if (pos_ + 3 > data_.size()) return std::nullopt;
  uint8_t tag = data_[pos_];
  uint16_t len = get_u16_be(data_.data() + pos_ + 1);
  if (pos_ + 3 + len > data_.size()) return std::nullopt;
  Item item{tag, data_.subspan(pos_ + 3, len)};
  pos_ += 3 + static_cast<size_t>(len);
  return item;
}

std::optional<ByteView> Reader::expect(uint8_t tag) {
  auto item = next();
  if (!item || item->tag != tag) return std::nullopt;
  return item->value;
}

}  // namespace sentrybus::tlv
