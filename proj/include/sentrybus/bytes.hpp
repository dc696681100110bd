#ifndef SENTRYBUS_BYTES_HPP
#define SENTRYBUS_BYTES_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace sentrybus {

using Bytes = std::vector<uint8_t>;
using ByteView = std::span<const uint8_t>;

inline Bytes to_bytes(ByteView v) { return Bytes(v.begin(), v.end()); }
inline Bytes to_bytes(const std::string& s) { return Bytes(s.begin(), s.end()); }
inline ByteView as_view(const std::string& s) {
  return ByteView(reinterpret_cast<const uint8_t*>(s.data()), s.size());
}
inline std::string to_string(ByteView v) {
  return std::string(reinterpret_cast<const char*>(v.data()), v.size());
}

std::string to_hex(ByteView data);
Bytes from_hex(const std::string& hex);  // throws Error(MalformedMessage) on bad input

std::string base64_encode(ByteView data);
Bytes base64_decode(const std::string& text);  // throws on bad input

// Constant-time equality; false for mismatched lengths.
bool ct_equal(ByteView a, ByteView b);

void append(Bytes& out, ByteView more);
void put_u16_be(Bytes& out, uint16_t v);
void put_u32_be(Bytes& out, uint32_t v);
void put_u64_be(Bytes& out, uint64_t v);
uint16_t get_u16_be(const uint8_t* p);
uint32_t get_u32_be(const uint8_t* p);
uint64_t get_u64_be(const uint8_t* p);

}  // namespace sentrybus

#endif
