#pragma once

// Little-endian helpers for the "SSEG" binary raster container shared by the
// prediction-tensor and score-map files:
//   magic "SSEG" | u32 version=1 | u32 kind | kind-specific u32 header | f32 payload

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "screenseg/error.hpp"

namespace screenseg::binfmt {

inline constexpr char kMagic[4] = {'S', 'S', 'E', 'G'};
inline constexpr std::uint32_t kVersion = 1;
inline constexpr std::uint32_t kKindTensor = 1;
inline constexpr std::uint32_t kKindScoreMap = 2;

inline void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

inline void put_f32(std::vector<std::uint8_t>& out, float f) { put_u32(out, std::bit_cast<std::uint32_t>(f)); }

class Reader {
 public:
  Reader(std::span<const std::uint8_t> bytes, std::string what) : bytes_(bytes), what_(std::move(what)) {}

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes_[pos_ + i]) << (8 * i);
    pos_ += 4;
    return v;
  }
  float f32() { return std::bit_cast<float>(u32()); }

  void expect_magic() {
    need(4);
    if (std::memcmp(bytes_.data() + pos_, kMagic, 4) != 0) throw InputError(what_ + ": bad magic (expected SSEG)");
    pos_ += 4;
  }

  void need(std::size_t n) const {
    if (pos_ + n > bytes_.size()) {
      throw InputError(what_ + ": truncated file (need " + std::to_string(pos_ + n) + " bytes, have " +
                       std::to_string(bytes_.size()) + ")");
    }
  }
  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  std::span<const std::uint8_t> bytes_;
  std::string what_;
  std::size_t pos_ = 0;
};

inline std::vector<std::uint8_t> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

inline void write_file(const std::string& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

inline std::vector<std::uint8_t> header(std::uint32_t kind) {
  std::vector<std::uint8_t> out(kMagic, kMagic + 4);
  put_u32(out, kVersion);
  put_u32(out, kind);
  return out;
}

/// Validates magic, version and kind.
inline void read_header(Reader& r, std::uint32_t kind, const std::string& what) {
  r.expect_magic();
  const auto version = r.u32();
  if (version != kVersion) throw InputError(what + ": unsupported version " + std::to_string(version));
  const auto k = r.u32();
  if (k != kind) {
    throw InputError(what + ": wrong kind " + std::to_string(k) + " (expected " + std::to_string(kind) + ")");
  }
}

}  // namespace screenseg::binfmt
