#pragma once

#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dpt/errors.hpp"

namespace dpt {

/// Little-endian fixed-width writer into a growing byte buffer.
class ByteWriter {
 public:
  void u8(std::uint8_t v) { buf_.push_back(static_cast<char>(v)); }
  void u32(std::uint32_t v) { put(v, 4); }
  void u64(std::uint64_t v) { put(v, 8); }
  void bytes(std::string_view s) {
    u64(s.size());
    buf_.append(s);
  }
  void words(std::span<const std::uint64_t> w) {
    u64(w.size());
    for (auto x : w) u64(x);
  }
  const std::string& str() const { return buf_; }

 private:
  void put(std::uint64_t v, int width) {
    for (int i = 0; i < width; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  }
  std::string buf_;
};

class ByteReader {
 public:
  explicit ByteReader(std::string_view data) : data_(data) {}

  std::uint8_t u8() { return static_cast<std::uint8_t>(take(1)[0]); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(get(4)); }
  std::uint64_t u64() { return get(8); }
  std::string bytes() {
    auto len = u64();
    return std::string(take(len));
  }
  std::vector<std::uint64_t> words() {
    auto len = u64();
    if (len > remaining() / 8) throw FormatError("word array longer than input");
    std::vector<std::uint64_t> out(len);
    for (auto& x : out) x = u64();
    return out;
  }
  std::size_t remaining() const { return data_.size() - pos_; }

 private:
  std::string_view take(std::uint64_t len) {
    if (len > remaining()) throw FormatError("truncated input");
    auto s = data_.substr(pos_, len);
    pos_ += len;
    return s;
  }
  std::uint64_t get(int width) {
    auto s = take(width);
    std::uint64_t v = 0;
    for (int i = 0; i < width; ++i) v |= static_cast<std::uint64_t>(static_cast<std::uint8_t>(s[i])) << (8 * i);
    return v;
  }
  std::string_view data_;
  std::size_t pos_ = 0;
};

}  // namespace dpt
