#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "salmanip/error.hpp"

namespace salmanip {

/// Single real-valued plane, row-major.
class Plane {
 public:
  Plane() = default;
  Plane(int width, int height, double fill = 0.0);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& operator()(int x, int y) { return data_[index(x, y)]; }
  double operator()(int x, int y) const { return data_[index(x, y)]; }

  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }

  bool operator==(const Plane&) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<double> data_;
};

/// Binary per-pixel mask. Stored as bytes (0 or 1).
class Mask {
 public:
  Mask() = default;
  Mask(int width, int height, bool fill = false);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return data_.size(); }

  bool operator()(int x, int y) const { return data_[index(x, y)] != 0; }
  void set(int x, int y, bool v) { data_[index(x, y)] = v ? 1 : 0; }
  bool at(std::size_t i) const { return data_[i] != 0; }
  void set(std::size_t i, bool v) { data_[i] = v ? 1 : 0; }

  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  std::size_t count() const;
  Mask complement() const;

  bool operator==(const Mask&) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> data_;
};

/// 8-bit sRGB image, interleaved RGB triples, row-major.
struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;

  RgbImage() = default;
  RgbImage(int w, int h);

  std::uint8_t* pixel(int x, int y) {
    return data.data() + 3 * (static_cast<std::size_t>(y) * width + x);
  }
  const std::uint8_t* pixel(int x, int y) const {
    return data.data() + 3 * (static_cast<std::size_t>(y) * width + x);
  }

  /// Throws InputError when the dimensions or buffer length are inconsistent.
  void validate() const;

  bool operator==(const RgbImage&) const = default;
};

/// 8-bit single-channel image.
struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;

  GrayImage() = default;
  GrayImage(int w, int h, std::uint8_t fill = 0);

  std::uint8_t& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }
  std::uint8_t at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }

  bool operator==(const GrayImage&) const = default;
};

/// Planar CIELAB image. Channel 0 is L in [0,100], channels 1 and 2 are a and b.
class LabImage {
 public:
  static constexpr int kChannels = 3;

  LabImage() = default;
  LabImage(int width, int height);

  int width() const { return planes_[0].width(); }
  int height() const { return planes_[0].height(); }
  std::size_t pixel_count() const { return planes_[0].size(); }

  Plane& channel(int c) { return planes_[static_cast<std::size_t>(c)]; }
  const Plane& channel(int c) const { return planes_[static_cast<std::size_t>(c)]; }

  double& operator()(int c, int x, int y) { return planes_[static_cast<std::size_t>(c)](x, y); }
  double operator()(int c, int x, int y) const {
    return planes_[static_cast<std::size_t>(c)](x, y);
  }

  /// True when no plane contains NaN or Inf.
  bool is_finite() const;

  bool operator==(const LabImage&) const = default;

 private:
  Plane planes_[kChannels];
};

/// Forward differences of every channel. dx is zero on the last column and dy
/// on the last row.
struct GradientField {
  Plane dx[LabImage::kChannels];
  Plane dy[LabImage::kChannels];

  int width() const { return dx[0].width(); }
  int height() const { return dx[0].height(); }
};

}  // namespace salmanip
