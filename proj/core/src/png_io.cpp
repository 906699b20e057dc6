#include "salmanip/png_io.hpp"

#include <png.h>

#include <cstring>
#include <fstream>
#include <iterator>

namespace salmanip::png {
namespace {

struct ImageGuard {
  png_image image;
  ImageGuard() {
    std::memset(&image, 0, sizeof(image));
    image.version = PNG_IMAGE_VERSION;
  }
  ~ImageGuard() { png_image_free(&image); }
  ImageGuard(const ImageGuard&) = delete;
  ImageGuard& operator=(const ImageGuard&) = delete;
};

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("write failed for " + path.string());
}

// Decodes into the requested format; returns width, height and pixel buffer.
std::vector<std::uint8_t> decode(std::span<const std::uint8_t> bytes, png_uint_32 format,
                                 int& width, int& height) {
  ImageGuard g;
  if (bytes.empty() ||
      !png_image_begin_read_from_memory(&g.image, bytes.data(), bytes.size())) {
    throw InputError(std::string("invalid PNG: ") + g.image.message);
  }
  g.image.format = format;
  std::vector<std::uint8_t> buf(PNG_IMAGE_SIZE(g.image));
  if (!png_image_finish_read(&g.image, nullptr, buf.data(), 0, nullptr)) {
    throw InputError(std::string("invalid PNG: ") + g.image.message);
  }
  width = static_cast<int>(g.image.width);
  height = static_cast<int>(g.image.height);
  return buf;
}

std::vector<std::uint8_t> encode(const std::uint8_t* pixels, int width, int height,
                                 png_uint_32 format) {
  ImageGuard g;
  g.image.width = static_cast<png_uint_32>(width);
  g.image.height = static_cast<png_uint_32>(height);
  g.image.format = format;
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&g.image, nullptr, &size, 0, pixels, 0, nullptr)) {
    throw Error(std::string("PNG encode failed: ") + g.image.message);
  }
  std::vector<std::uint8_t> out(size);
  if (!png_image_write_to_memory(&g.image, out.data(), &size, 0, pixels, 0, nullptr)) {
    throw Error(std::string("PNG encode failed: ") + g.image.message);
  }
  out.resize(size);
  return out;
}

}  // namespace

RgbImage decode_rgb(std::span<const std::uint8_t> bytes) {
  RgbImage img;
  img.data = decode(bytes, PNG_FORMAT_RGB, img.width, img.height);
  return img;
}

GrayImage decode_gray(std::span<const std::uint8_t> bytes) {
  GrayImage img;
  img.data = decode(bytes, PNG_FORMAT_GRAY, img.width, img.height);
  return img;
}

RgbImage read_rgb(const std::filesystem::path& path) {
  try {
    return decode_rgb(read_file(path));
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

GrayImage read_gray(const std::filesystem::path& path) {
  try {
    return decode_gray(read_file(path));
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

std::vector<std::uint8_t> encode_rgb(const RgbImage& img) {
  img.validate();
  return encode(img.data.data(), img.width, img.height, PNG_FORMAT_RGB);
}

std::vector<std::uint8_t> encode_gray(const GrayImage& img) {
  if (img.width < 1 || img.height < 1 ||
      img.data.size() != static_cast<std::size_t>(img.width) * img.height) {
    throw InputError("invalid grayscale image");
  }
  return encode(img.data.data(), img.width, img.height, PNG_FORMAT_GRAY);
}

void write_rgb(const std::filesystem::path& path, const RgbImage& img) {
  write_file(path, encode_rgb(img));
}

void write_gray(const std::filesystem::path& path, const GrayImage& img) {
  write_file(path, encode_gray(img));
}

}  // namespace salmanip::png
