#pragma once

#include <vector>

#include "salmanip/image.hpp"

namespace salmanip {

// sRGB (D65) <-> CIELAB.
LabImage rgb_to_lab(const RgbImage& img);
RgbImage lab_to_rgb(const LabImage& img);

struct Lab {
  double L, a, b;
};
Lab srgb_to_lab(std::uint8_t r, std::uint8_t g, std::uint8_t b);
void lab_to_srgb(const Lab& lab, std::uint8_t out[3]);

GradientField gradients(const LabImage& img);

/// Area-weighted averaging when shrinking an axis, bilinear interpolation
/// (pixel-center aligned, edge clamped) when growing it. Same size is a copy.
Plane resample_to(const Plane& plane, int width, int height);
LabImage resample_to(const LabImage& img, int width, int height);

/// Resamples a binary mask with the image geometry and re-thresholds at 0.5.
Mask resample_mask(const Mask& mask, int width, int height);

/// Gaussian pyramid ordered coarse to fine.
struct Pyramid {
  static constexpr double kScaleGap = 0.5;
  static constexpr int kDefaultCoarsestWidth = 150;

  std::vector<LabImage> levels;

  std::size_t size() const { return levels.size(); }
  const LabImage& coarsest() const { return levels.front(); }
  const LabImage& finest() const { return levels.back(); }
};

/// Size of the next coarser level: half, rounded down, at least 1.
int half_extent(int extent);

/// Per-level sizes, coarse to fine, for an image of the given size.
std::vector<std::pair<int, int>> pyramid_sizes(int width, int height,
                                               int coarsest_width = Pyramid::kDefaultCoarsestWidth);

/// Repeated [1,4,6,4,1]/16 blur and 2x decimation while the next level stays
/// at least coarsest_width wide.
Pyramid build_pyramid(const LabImage& img, int coarsest_width = Pyramid::kDefaultCoarsestWidth);

/// One separable binomial blur followed by decimation to the given size.
LabImage blur_decimate(const LabImage& img, int width, int height);

}  // namespace salmanip
