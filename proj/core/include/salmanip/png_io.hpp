#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "salmanip/image.hpp"

namespace salmanip::png {

// Any PNG color type is accepted on read and converted (alpha dropped,
// 16-bit reduced to 8-bit). Failures throw InputError.
RgbImage read_rgb(const std::filesystem::path& path);
GrayImage read_gray(const std::filesystem::path& path);
RgbImage decode_rgb(std::span<const std::uint8_t> bytes);
GrayImage decode_gray(std::span<const std::uint8_t> bytes);

// Writes throw Error on failure.
void write_rgb(const std::filesystem::path& path, const RgbImage& img);
void write_gray(const std::filesystem::path& path, const GrayImage& img);
std::vector<std::uint8_t> encode_rgb(const RgbImage& img);
std::vector<std::uint8_t> encode_gray(const GrayImage& img);

}  // namespace salmanip::png
