#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "salmanip/image.hpp"
#include "salmanip/patch_db.hpp"
#include "salmanip/setup_mask.hpp"

namespace salmanip {

struct SynthesisConfig {
  int patch_size = 7;
  int pm_iterations = 5;
  double random_search_decay = 0.5;

  void validate() const;
};

/// Square patch of Lab values addressed by its centre.
struct PatchRef {
  const LabImage* image;
  int cx;
  int cy;
};

/// SSD over L, a and b of two equally sized patches.
double patch_ssd(PatchRef a, PatchRef b, int patch_size);

/// Nearest-neighbour field from target patch centres into a database.
/// Entries exist only for searched target centres (has_match).
class NNField {
 public:
  NNField() = default;
  NNField(int width, int height, int patch_size);

  int width() const { return width_; }
  int height() const { return height_; }
  int patch_size() const { return patch_size_; }

  bool has_match(int x, int y) const { return matched_[index(x, y)] != 0; }
  int source_x(int x, int y) const { return sx_[index(x, y)]; }
  int source_y(int x, int y) const { return sy_[index(x, y)]; }
  double distance(int x, int y) const { return dist_[index(x, y)]; }

  void set(int x, int y, int source_x, int source_y, double dist);

  std::size_t match_count() const;
  double total_distance() const;
  double mean_distance() const;

  /// Total distance after initialisation and after each PatchMatch iteration.
  std::vector<double> iteration_costs;

  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

 private:
  int width_ = 0;
  int height_ = 0;
  int patch_size_ = 0;
  std::vector<std::uint8_t> matched_;
  std::vector<int> sx_;
  std::vector<int> sy_;
  std::vector<double> dist_;
};

/// PatchMatch over translations. Every target centre whose patch fits and is
/// marked in target_valid gets an admissible source patch. Starting points
/// come from `init` (entries still admissible) or uniformly random admissible
/// centres; the co-located source patch is also tried when admissible. Then
/// pm_iterations of alternating-direction propagation and random search with
/// a window starting at the larger source dimension and shrinking by
/// random_search_decay. No entry ever gets worse.
NNField nn_search(const LabImage& target, const Mask& target_valid, const PatchDatabase& db,
                  const SynthesisConfig& cfg, std::uint64_t seed,
                  const NNField* init = nullptr);

struct FieldSource {
  const NNField* field;
  const PatchDatabase* db;
};

struct VoteResult {
  LabImage image;
  /// Non-Keep pixels no matched patch covered; they fall back to `original`.
  std::size_t uncovered = 0;
};

/// Every non-Keep pixel becomes the mean of the source colours of all matched
/// target patches overlapping it. Keep pixels copy `original`.
VoteResult vote(std::span<const FieldSource> fields, const SetupMask& setup,
                const LabImage& original);

/// Offsets as an RGB image: R = 128 + dx, G = 128 + dy (clamped), B = 255
/// where matched. Debug aid.
RgbImage field_to_rgb(const NNField& field);

}  // namespace salmanip
