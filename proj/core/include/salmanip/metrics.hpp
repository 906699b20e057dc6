#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "salmanip/image.hpp"
#include "salmanip/saliency.hpp"

namespace salmanip {

struct EvalPair {
  const Plane& predicted;  // values in [0,1]
  const Mask& ground_truth;
};

/// Sample Pearson correlation over all pixels. Throws InputError("undefined
/// correlation") if either side is constant.
double pearson_cc(const EvalPair& pair);

/// Same statistic between two continuous maps of equal size.
double pearson_cc(const Plane& a, const Plane& b);

struct WeightedFBetaParams {
  double beta_sq = 1.0;
  double gaussian_sigma = 5.0;
  int gaussian_size = 7;
  /// Importance of a background pixel at distance d from the foreground is
  /// 2 - exp(decay * d).
  double importance_decay = -0.13862943611198905;  // ln(0.5) / 5
};

/// Weighted F-beta of a continuous foreground map. Throws InputError when the
/// ground truth has no foreground.
double weighted_fbeta(const EvalPair& pair, const WeightedFBetaParams& params = {});

/// Exact Euclidean distance from every pixel to the nearest set pixel of
/// `mask`, plus that pixel's linear index. Set pixels get distance 0 and
/// their own index.
struct DistanceTransform {
  Plane distance;
  std::vector<std::size_t> nearest;
};
DistanceTransform distance_to_set(const Mask& mask);

enum class Metric { kCC, kWFB };
std::string to_string(Metric m);
Metric parse_metric(const std::string& s);

struct CorpusRow {
  std::string image_id;
  double score;
};

struct CorpusReport {
  Metric metric = Metric::kCC;
  std::vector<CorpusRow> rows;
  std::vector<std::string> warnings;

  bool empty() const { return rows.empty(); }
  double mean() const;
  /// Columns image_id,metric,score with a trailing "mean" row when non-empty.
  std::string to_csv() const;
};

/// Scores every PNG in pred_dir against the same-named PNG in gt_dir
/// (grayscale, >= 128 is foreground). Unmatched or unusable files are skipped
/// with a warning.
CorpusReport evaluate_corpus(const std::filesystem::path& pred_dir,
                             const std::filesystem::path& gt_dir, Metric metric);

}  // namespace salmanip
