#include "salmanip/image.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace salmanip {

Plane::Plane(int width, int height, double fill) : width_(width), height_(height) {
  if (width < 0 || height < 0) throw InputError("negative plane dimensions");
  data_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
}

Mask::Mask(int width, int height, bool fill) : width_(width), height_(height) {
  if (width < 0 || height < 0) throw InputError("negative mask dimensions");
  data_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height),
               fill ? 1 : 0);
}

std::size_t Mask::count() const {
  return static_cast<std::size_t>(std::count(data_.begin(), data_.end(), std::uint8_t{1}));
}

Mask Mask::complement() const {
  Mask out = *this;
  for (auto& v : out.data_) v = v ? 0 : 1;
  return out;
}

RgbImage::RgbImage(int w, int h) : width(w), height(h) {
  if (w < 0 || h < 0) throw InputError("negative image dimensions");
  data.assign(3 * static_cast<std::size_t>(w) * static_cast<std::size_t>(h), 0);
}

void RgbImage::validate() const {
  if (width < 1 || height < 1) {
    throw InputError("image must be at least 1x1, got " + std::to_string(width) + "x" +
                     std::to_string(height));
  }
  if (data.size() != 3 * static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    throw InputError("RGB buffer length does not match 3*width*height");
  }
}

GrayImage::GrayImage(int w, int h, std::uint8_t fill) : width(w), height(h) {
  if (w < 0 || h < 0) throw InputError("negative image dimensions");
  data.assign(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), fill);
}

LabImage::LabImage(int width, int height)
    : planes_{Plane(width, height), Plane(width, height), Plane(width, height)} {}

bool LabImage::is_finite() const {
  for (const auto& p : planes_) {
    for (double v : p.values()) {
      if (!std::isfinite(v)) return false;
    }
  }
  return true;
}

}  // namespace salmanip
