#pragma once

// PNG (8-bit gray / gray+alpha / RGB / RGBA, via libpng) and binary PPM (P6)
// reading and writing. Alpha is dropped on read.

#include <png.h>

#include <fstream>
#include <string>
#include <vector>

#include "screenseg/error.hpp"
#include "screenseg/raster.hpp"

namespace screenseg {

namespace detail {

inline bool has_png_signature(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  unsigned char sig[8] = {};
  in.read(reinterpret_cast<char*>(sig), 8);
  return in.gcount() == 8 && png_sig_cmp(sig, 0, 8) == 0;
}

inline RgbImage read_png(const std::string& path) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.c_str())) {
    throw InputError(path + ": " + image.message);
  }
  image.format = PNG_FORMAT_RGB;
  if (image.width < 1 || image.height < 1) {
    png_image_free(&image);
    throw InputError(path + ": empty PNG");
  }
  RgbImage img(static_cast<int>(image.width), static_cast<int>(image.height));
  if (!png_image_finish_read(&image, nullptr, img.data.data(), 0, nullptr)) {
    throw InputError(path + ": " + image.message);
  }
  return img;
}

inline RgbImage read_ppm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  std::string magic;
  in >> magic;
  if (magic != "P6") throw InputError(path + ": not a PNG or binary PPM (P6) file");
  auto next_int = [&]() {
    int v = -1;
    while (in >> std::ws && in.peek() == '#') {
      std::string comment;
      std::getline(in, comment);
    }
    in >> v;
    return v;
  };
  const int w = next_int();
  const int h = next_int();
  const int maxval = next_int();
  if (w < 1 || h < 1 || maxval != 255) throw InputError(path + ": unsupported PPM header");
  in.get();
  RgbImage img(w, h);
  in.read(reinterpret_cast<char*>(img.data.data()), static_cast<std::streamsize>(img.data.size() * 3));
  if (in.gcount() != static_cast<std::streamsize>(img.data.size() * 3)) {
    throw InputError(path + ": truncated PPM data");
  }
  return img;
}

}  // namespace detail

static_assert(sizeof(Rgb) == 3, "Rgb must be tightly packed");

/// Reads a PNG, falling back to binary PPM when the PNG signature is absent.
inline RgbImage read_image(const std::string& path) {
  if (detail::has_png_signature(path)) return detail::read_png(path);
  return detail::read_ppm(path);
}

inline void write_png(const std::string& path, const RgbImage& img) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(img.width);
  image.height = static_cast<png_uint_32>(img.height);
  image.format = PNG_FORMAT_RGB;
  if (!png_image_write_to_file(&image, path.c_str(), 0, img.data.data(), 0, nullptr)) {
    throw InputError("cannot write " + path + ": " + image.message);
  }
}

inline void write_ppm(const std::string& path, const RgbImage& img) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path);
  out << "P6\n" << img.width << " " << img.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.data.data()), static_cast<std::streamsize>(img.data.size() * 3));
}

}  // namespace screenseg
