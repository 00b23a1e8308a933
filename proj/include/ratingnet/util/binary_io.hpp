#pragma once

#include <bit>
#include <cstdint>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <type_traits>

namespace ratingnet::util {

/// Little-endian primitive writer over an ostream.
class BinaryWriter {
 public:
  explicit BinaryWriter(std::ostream& out) : out_(out) {}

  template <typename T>
    requires std::is_integral_v<T>
  void put(T value) {
    using U = std::make_unsigned_t<T>;
    auto u = static_cast<U>(value);
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      out_.put(static_cast<char>(u & 0xff));
      if constexpr (sizeof(T) > 1) u >>= 8;
    }
  }
  void put_f32(float v) { put(std::bit_cast<std::uint32_t>(v)); }
  void put_f64(double v) { put(std::bit_cast<std::uint64_t>(v)); }
  void put_bytes(const std::string& bytes) { out_.write(bytes.data(), static_cast<std::streamsize>(bytes.size())); }
  void put_string(const std::string& s) {
    put(static_cast<std::uint32_t>(s.size()));
    put_bytes(s);
  }

 private:
  std::ostream& out_;
};

class BinaryReader {
 public:
  explicit BinaryReader(std::istream& in) : in_(in) {}

  template <typename T>
    requires std::is_integral_v<T>
  T get() {
    using U = std::make_unsigned_t<T>;
    U u = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      const int c = in_.get();
      if (c == std::char_traits<char>::eof()) throw std::runtime_error("unexpected end of binary file");
      u |= static_cast<U>(static_cast<U>(static_cast<unsigned char>(c)) << (8 * i));
    }
    return static_cast<T>(u);
  }
  float get_f32() { return std::bit_cast<float>(get<std::uint32_t>()); }
  double get_f64() { return std::bit_cast<double>(get<std::uint64_t>()); }
  std::string get_bytes(std::size_t n) {
    std::string s(n, '\0');
    in_.read(s.data(), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in_.gcount()) != n) throw std::runtime_error("unexpected end of binary file");
    return s;
  }
  std::string get_string(std::size_t max_len = 1 << 20) {
    const auto n = get<std::uint32_t>();
    if (n > max_len) throw std::runtime_error("string length out of range in binary file");
    return get_bytes(n);
  }

 private:
  std::istream& in_;
};

}  // namespace ratingnet::util
