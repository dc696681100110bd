#ifndef SENTRYBUS_TLV_HPP
#define SENTRYBUS_TLV_HPP

#include <cstdint>
#include <optional>

#include "sentrybus/bytes.hpp"

namespace sentrybus::tlv {

// Wire element: tag(1 byte), length(2 bytes big-endian), value.
void put(Bytes& out, uint8_t tag, ByteView value);

class Reader {
 public:
  explicit Reader(ByteView data) : data_(data) {}

  bool done() const { return pos_ == data_.size(); }

  // Next element, or nullopt once exhausted or on a truncated element.
  struct Item {
    uint8_t tag;
    ByteView value;
  };
  std::optional<Item> next();

  // Consumes the next element, which must carry exactly `tag`.
  std::optional<ByteView> expect(uint8_t tag);

 private:
  ByteView data_;
  size_t pos_ = 0;
};

}  // namespace sentrybus::tlv

#endif
