#include "salmanip/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <set>
#include <sstream>

#include "salmanip/png_io.hpp"

namespace salmanip {
namespace {

void check_pair(const EvalPair& pair) {
  if (pair.predicted.width() != pair.ground_truth.width() ||
      pair.predicted.height() != pair.ground_truth.height()) {
    throw InputError("prediction and ground truth differ in size");
  }
  if (pair.predicted.size() == 0) throw InputError("empty evaluation pair");
}

// 1-D squared distance transform (lower envelope of parabolas). `f` holds the
// sampled cost (0 on set pixels, +inf elsewhere or a previous pass's result);
// `arg` receives the index of the minimising sample.
void dt_1d(const std::vector<double>& f, std::vector<double>& d, std::vector<int>& arg) {
  const int n = static_cast<int>(f.size());
  std::vector<int> v(static_cast<std::size_t>(n));
  std::vector<double> z(static_cast<std::size_t>(n) + 1);
  int k = -1;
  for (int q = 0; q < n; ++q) {
    if (!std::isfinite(f[static_cast<std::size_t>(q)])) continue;
    if (k < 0) {
      k = 0;
      v[0] = q;
      z[0] = -std::numeric_limits<double>::infinity();
      z[1] = std::numeric_limits<double>::infinity();
      continue;
    }
    auto intersect = [&](int p) {
      return ((f[static_cast<std::size_t>(q)] + static_cast<double>(q) * q) -
              (f[static_cast<std::size_t>(p)] + static_cast<double>(p) * p)) /
             (2.0 * (q - p));
    };
    // z[0] is -inf, so the loop stops at k == 0 at the latest.
    double s = intersect(v[static_cast<std::size_t>(k)]);
    while (s <= z[static_cast<std::size_t>(k)]) {
      --k;
      s = intersect(v[static_cast<std::size_t>(k)]);
    }
    ++k;
    v[static_cast<std::size_t>(k)] = q;
    z[static_cast<std::size_t>(k)] = s;
    z[static_cast<std::size_t>(k) + 1] = std::numeric_limits<double>::infinity();
  }
  d.assign(static_cast<std::size_t>(n), std::numeric_limits<double>::infinity());
  arg.assign(static_cast<std::size_t>(n), -1);
  if (k < 0) return;
  int j = 0;
  for (int q = 0; q < n; ++q) {
    while (z[static_cast<std::size_t>(j) + 1] < q) ++j;
    const int p = v[static_cast<std::size_t>(j)];
    d[static_cast<std::size_t>(q)] =
        static_cast<double>(q - p) * (q - p) + f[static_cast<std::size_t>(p)];
    arg[static_cast<std::size_t>(q)] = p;
  }
}

std::vector<double> gaussian_kernel(int size, double sigma) {
  const int r = size / 2;
  std::vector<double> k(static_cast<std::size_t>(size) * size);
  double sum = 0.0;
  for (int y = -r; y <= r; ++y) {
    for (int x = -r; x <= r; ++x) {
      const double v = std::exp(-(x * x + y * y) / (2.0 * sigma * sigma));
      k[static_cast<std::size_t>((y + r) * size + (x + r))] = v;
      sum += v;
    }
  }
  for (double& v : k) v /= sum;
  return k;
}

// Correlation with edge replication.
Plane filter_replicate(const Plane& in, const std::vector<double>& kernel, int size) {
  const int r = size / 2;
  const int w = in.width();
  const int h = in.height();
  Plane out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int dy = -r; dy <= r; ++dy) {
        const int yy = std::clamp(y + dy, 0, h - 1);
        for (int dx = -r; dx <= r; ++dx) {
          const int xx = std::clamp(x + dx, 0, w - 1);
          acc += kernel[static_cast<std::size_t>((dy + r) * size + (dx + r))] * in(xx, yy);
        }
      }
      out(x, y) = acc;
    }
  }
  return out;
}

}  // namespace

double pearson_cc(const Plane& a, const Plane& b) {
  if (a.width() != b.width() || a.height() != b.height()) throw InputError("map size mismatch");
  if (a.size() == 0) throw InputError("empty map");
  const auto p = a.values();
  const auto q = b.values();
  const std::size_t n = p.size();
  double mp = 0.0, mq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mp += p[i];
    mq += q[i];
  }
  mp /= static_cast<double>(n);
  mq /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double u = p[i] - mp;
    const double v = q[i] - mq;
    sxy += u * v;
    sxx += u * u;
    syy += v * v;
  }
  // Exact comparison on the inputs; the centred sums pick up rounding noise.
  const auto [plo, phi] = std::ranges::minmax(p);
  const auto [qlo, qhi] = std::ranges::minmax(q);
  if (plo == phi || qlo == qhi) throw InputError("undefined correlation");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double pearson_cc(const EvalPair& pair) {
  check_pair(pair);
  Plane gt(pair.ground_truth.width(), pair.ground_truth.height());
  for (std::size_t i = 0; i < gt.size(); ++i) gt.values()[i] = pair.ground_truth.at(i) ? 1.0 : 0.0;
  return pearson_cc(pair.predicted, gt);
}

DistanceTransform distance_to_set(const Mask& mask) {
  const int w = mask.width();
  const int h = mask.height();
  const double inf = std::numeric_limits<double>::infinity();
  DistanceTransform out{Plane(w, h, inf), std::vector<std::size_t>(mask.size(), 0)};

  // Columns: squared distance to the nearest set pixel in the same column.
  Plane col_d(w, h, inf);
  std::vector<int> col_arg(mask.size(), -1);
  std::vector<double> f, d;
  std::vector<int> arg;
  for (int x = 0; x < w; ++x) {
    f.assign(static_cast<std::size_t>(h), inf);
    for (int y = 0; y < h; ++y) {
      if (mask(x, y)) f[static_cast<std::size_t>(y)] = 0.0;
    }
    dt_1d(f, d, arg);
    for (int y = 0; y < h; ++y) {
      col_d(x, y) = d[static_cast<std::size_t>(y)];
      col_arg[mask.index(x, y)] = arg[static_cast<std::size_t>(y)];
    }
  }
  // Rows over the column result.
  for (int y = 0; y < h; ++y) {
    f.assign(static_cast<std::size_t>(w), inf);
    for (int x = 0; x < w; ++x) f[static_cast<std::size_t>(x)] = col_d(x, y);
    dt_1d(f, d, arg);
    for (int x = 0; x < w; ++x) {
      const double dd = d[static_cast<std::size_t>(x)];
      out.distance(x, y) = std::isfinite(dd) ? std::sqrt(dd) : inf;
      const int sx = arg[static_cast<std::size_t>(x)];
      if (sx >= 0) {
        const int sy = col_arg[mask.index(sx, y)];
        out.nearest[mask.index(x, y)] = mask.index(sx, sy);
      }
    }
  }
  return out;
}

double weighted_fbeta(const EvalPair& pair, const WeightedFBetaParams& params) {
  check_pair(pair);
  const Mask& gt = pair.ground_truth;
  const std::size_t fg_count = gt.count();
  if (fg_count == 0) throw InputError("ground truth has no foreground");
  if (params.gaussian_size < 1 || params.gaussian_size % 2 == 0 || !(params.gaussian_sigma > 0)) {
    throw InputError("invalid Gaussian kernel for weighted F-beta");
  }
  const int w = gt.width();
  const int h = gt.height();
  const std::size_t n = gt.size();

  Plane err(w, h);
  for (std::size_t i = 0; i < n; ++i) {
    err.values()[i] = std::abs(pair.predicted.values()[i] - (gt.at(i) ? 1.0 : 0.0));
  }
  const DistanceTransform dt = distance_to_set(gt);

  // Background errors borrow the error of their nearest foreground pixel.
  Plane borrowed = err;
  for (std::size_t i = 0; i < n; ++i) {
    if (!gt.at(i)) borrowed.values()[i] = err.values()[dt.nearest[i]];
  }
  const Plane smoothed =
      filter_replicate(borrowed, gaussian_kernel(params.gaussian_size, params.gaussian_sigma),
                       params.gaussian_size);

  double fg_err = 0.0, bg_err = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double e = err.values()[i];
    if (gt.at(i)) {
      e = std::min(e, smoothed.values()[i]);
      fg_err += e;
    } else {
      const double importance = 2.0 - std::exp(params.importance_decay * dt.distance.values()[i]);
      bg_err += e * importance;
    }
  }
  const double tp = static_cast<double>(fg_count) - fg_err;
  const double recall = 1.0 - fg_err / static_cast<double>(fg_count);
  const double precision = tp + bg_err > 0.0 ? tp / (tp + bg_err) : 0.0;
  const double denom = params.beta_sq * precision + recall;
  if (!(denom > 0.0)) return 0.0;
  return std::clamp((1.0 + params.beta_sq) * precision * recall / denom, 0.0, 1.0);
}

std::string to_string(Metric m) { return m == Metric::kCC ? "cc" : "wfb"; }

Metric parse_metric(const std::string& s) {
  if (s == "cc") return Metric::kCC;
  if (s == "wfb") return Metric::kWFB;
  throw InputError("unknown metric '" + s + "' (expected cc or wfb)");
}

double CorpusReport::mean() const {
  if (rows.empty()) return std::numeric_limits<double>::quiet_NaN();
  double acc = 0.0;
  for (const auto& r : rows) acc += r.score;
  return acc / static_cast<double>(rows.size());
}

std::string CorpusReport::to_csv() const {
  std::ostringstream out;
  out << std::setprecision(12);
  out << "image_id,metric,score\n";
  for (const auto& r : rows) out << r.image_id << ',' << to_string(metric) << ',' << r.score << '\n';
  if (!rows.empty()) out << "mean," << to_string(metric) << ',' << mean() << '\n';
  return out.str();
}

CorpusReport evaluate_corpus(const std::filesystem::path& pred_dir,
                             const std::filesystem::path& gt_dir, Metric metric) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(pred_dir)) throw InputError("not a directory: " + pred_dir.string());
  if (!fs::is_directory(gt_dir)) throw InputError("not a directory: " + gt_dir.string());

  auto png_names = [](const fs::path& dir) {
    std::set<std::string> names;
    for (const auto& e : fs::directory_iterator(dir)) {
      if (e.is_regular_file() && e.path().extension() == ".png") {
        names.insert(e.path().filename().string());
      }
    }
    return names;
  };
  const auto preds = png_names(pred_dir);
  const auto gts = png_names(gt_dir);

  CorpusReport report;
  report.metric = metric;
  for (const auto& name : preds) {
    if (!gts.contains(name)) {
      report.warnings.push_back(name + ": no ground truth, skipped");
      continue;
    }
    try {
      const GrayImage pg = png::read_gray(pred_dir / name);
      const GrayImage gg = png::read_gray(gt_dir / name);
      if (pg.width != gg.width || pg.height != gg.height) {
        report.warnings.push_back(name + ": size mismatch, skipped");
        continue;
      }
      Plane pred(pg.width, pg.height);
      for (std::size_t i = 0; i < pg.data.size(); ++i) pred.values()[i] = pg.data[i] / 255.0;
      Mask gt(gg.width, gg.height);
      for (std::size_t i = 0; i < gg.data.size(); ++i) gt.set(i, gg.data[i] >= 128);
      const EvalPair pair{pred, gt};
      const double score = metric == Metric::kCC ? pearson_cc(pair) : weighted_fbeta(pair);
      report.rows.push_back({fs::path(name).stem().string(), score});
    } catch (const InputError& e) {
      report.warnings.push_back(name + ": " + e.what() + ", skipped");
    }
  }
  for (const auto& name : gts) {
    if (!preds.contains(name)) report.warnings.push_back(name + ": no prediction, skipped");
  }
  return report;
}

}  // namespace salmanip
