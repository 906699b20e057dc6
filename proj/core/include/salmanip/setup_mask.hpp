#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "salmanip/image.hpp"

namespace salmanip {

/// What the optimisation does to a pixel.
enum class Label : std::uint8_t { kKeep = 0, kIncrease = 1, kDecrease = 2 };

enum class Mode { kEnhance, kAttenuate, kDeclutter };

std::string to_string(Mode m);
/// Accepts "enhance", "attenuate", "declutter". Throws InputError otherwise.
Mode parse_mode(const std::string& s);

class SetupMask {
 public:
  SetupMask() = default;
  SetupMask(int width, int height, Label fill = Label::kKeep);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return labels_.size(); }

  Label operator()(int x, int y) const { return labels_[index(x, y)]; }
  Label at(std::size_t i) const { return labels_[i]; }
  void set(int x, int y, Label l) { labels_[index(x, y)] = l; }
  void set(std::size_t i, Label l) { labels_[i] = l; }

  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  Mask select(Label l) const;
  std::size_t count(Label l) const;

  /// Throws InputError unless at least one pixel is Increase or Decrease.
  void validate() const;

  bool operator==(const SetupMask&) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<Label> labels_;
};

/// enhance: Increase in R, Decrease outside. attenuate: Decrease in R, Keep
/// outside. declutter: Keep in R, Decrease outside.
SetupMask build_setup(const Mask& region, Mode mode);

/// Region whose contrast against the rest is driven toward delta_s: R for
/// enhance and declutter, the complement of R for attenuate.
Mask contrast_region(const Mask& region, Mode mode);

/// Region used for a hand-made setup: Increase pixels, or every non-Decrease
/// pixel when nothing is marked Increase.
Mask contrast_region(const SetupMask& setup);

/// Ternary grayscale encoding: 0 Decrease, 128 Keep, 255 Increase. Values are
/// snapped to the nearest of the three.
SetupMask setup_from_gray(const GrayImage& g);
GrayImage setup_to_gray(const SetupMask& s);

/// Mask from 8-bit grayscale, value >= 128 is inside.
Mask mask_from_gray(const GrayImage& g);

/// Majority vote of each label's area fraction; ties go to Keep.
SetupMask resample_setup(const SetupMask& s, int width, int height);

}  // namespace salmanip
