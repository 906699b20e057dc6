#pragma once

#include <memory>

#include "salmanip/image.hpp"

namespace salmanip {

/// Per-pixel saliency in [0,1] on the grid of its source image.
class SaliencyMap {
 public:
  SaliencyMap() = default;
  /// Throws InputError if any value lies outside [0,1].
  explicit SaliencyMap(Plane values);

  int width() const { return values_.width(); }
  int height() const { return values_.height(); }
  std::size_t size() const { return values_.size(); }
  double operator()(int x, int y) const { return values_(x, y); }
  double at(std::size_t i) const { return values_.values()[i]; }

  const Plane& plane() const { return values_; }

  /// value = round(255 * s)
  GrayImage to_gray() const;

 private:
  Plane values_;
};

struct SaliencyConfig {
  int patch_size = 5;
  bool use_center_prior = false;  // accepted for completeness; must stay off
  /// Fraction of patch variance the retained principal components must cover.
  double pca_variance = 0.97;
  /// Hard cap on retained components; 0 means patch_size^2 * 3.
  int pca_max_dims = 0;

  void validate() const;
};

/// Patch-distinctness saliency: every overlapping Lab patch is projected onto
/// the principal components of the patch set (mean removed); its score is the
/// L1 norm of those coordinates. Pixels inherit the score of the patch centred
/// on them (border pixels use the nearest interior centre) and the plane is
/// min-max normalised. A constant plane maps to all zeros.
SaliencyMap compute_saliency(const LabImage& img, const SaliencyConfig& cfg = {});

/// Raw (unnormalised) distinctness per pixel; exposed for tests and tooling.
Plane patch_distinctness(const LabImage& img, const SaliencyConfig& cfg = {});

/// Pluggable estimator so maps from other detectors can drive the pipeline.
class SaliencyEstimator {
 public:
  virtual ~SaliencyEstimator() = default;
  virtual SaliencyMap compute(const LabImage& img) const = 0;
};

class PatchPcaSaliency final : public SaliencyEstimator {
 public:
  explicit PatchPcaSaliency(SaliencyConfig cfg = {}) : cfg_(cfg) { cfg_.validate(); }
  SaliencyMap compute(const LabImage& img) const override { return compute_saliency(img, cfg_); }

 private:
  SaliencyConfig cfg_;
};

struct ContrastParams {
  double beta_top = 0.20;
  void validate() const;
};

/// Mean of the top ceil(beta*n) values among the selected pixels.
double top_fraction_mean(const SaliencyMap& s, const Mask& select, double beta_top);

/// Contrast between the most salient pixels inside and outside the region.
/// Throws InputError("degenerate region") for an empty or full region.
double contrast_psi(const SaliencyMap& s, const Mask& region, const ContrastParams& params = {});

/// |psi - delta_s|
double saliency_energy(const SaliencyMap& s, const Mask& region, double delta_s,
                       const ContrastParams& params = {});

}  // namespace salmanip
