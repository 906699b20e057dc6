#include "salmanip/saliency.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace salmanip {
namespace {

constexpr double kFlatRange = 1e-12;

// Fills one row of patch vectors (one per valid centre x) for centre row cy.
// Layout per vector: for each patch row, for each patch column, L a b.
void fill_patch_row(const LabImage& img, const double channel_mean[3], int patch, int cy,
                    Eigen::MatrixXd& block) {
  const int r = patch / 2;
  const int nx = img.width() - 2 * r;
  for (int i = 0; i < nx; ++i) {
    const int cx = i + r;
    Eigen::Index k = 0;
    for (int dy = -r; dy <= r; ++dy) {
      for (int dx = -r; dx <= r; ++dx) {
        for (int c = 0; c < 3; ++c) {
          block(i, k++) = img(c, cx + dx, cy + dy) - channel_mean[c];
        }
      }
    }
  }
}

}  // namespace

SaliencyMap::SaliencyMap(Plane values) : values_(std::move(values)) {
  for (double v : values_.values()) {
    if (!(v >= 0.0 && v <= 1.0)) throw InputError("saliency values must lie in [0,1]");
  }
}

GrayImage SaliencyMap::to_gray() const {
  GrayImage out(width(), height());
  for (std::size_t i = 0; i < size(); ++i) {
    out.data[i] = static_cast<std::uint8_t>(std::lround(255.0 * at(i)));
  }
  return out;
}

void SaliencyConfig::validate() const {
  if (patch_size < 3 || patch_size % 2 == 0) {
    throw InputError("saliency patch size must be odd and >= 3");
  }
  if (use_center_prior) throw InputError("the center prior is not supported");
  if (!(pca_variance > 0.0 && pca_variance <= 1.0)) {
    throw InputError("pca variance fraction must be in (0,1]");
  }
  if (pca_max_dims < 0) throw InputError("pca_max_dims must be >= 0");
}

void ContrastParams::validate() const {
  if (!(beta_top > 0.0 && beta_top <= 1.0)) throw InputError("beta_top must be in (0,1]");
}

Plane patch_distinctness(const LabImage& img, const SaliencyConfig& cfg) {
  cfg.validate();
  const int patch = cfg.patch_size;
  if (img.width() < patch || img.height() < patch) {
    throw InputError("image too small for saliency patch");
  }
  const int r = patch / 2;
  const int w = img.width();
  const int h = img.height();
  const int nx = w - 2 * r;
  const int ny = h - 2 * r;
  const Eigen::Index dim = static_cast<Eigen::Index>(patch) * patch * 3;

  // Pre-centre by the channel means so the moment accumulation stays well
  // conditioned; it does not change the patch covariance.
  double channel_mean[3];
  for (int c = 0; c < 3; ++c) {
    double s = 0.0;
    for (double v : img.channel(c).values()) s += v;
    channel_mean[c] = s / static_cast<double>(img.pixel_count());
  }

  Eigen::MatrixXd block(nx, dim);
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(dim);
  Eigen::MatrixXd second = Eigen::MatrixXd::Zero(dim, dim);
  for (int cy = r; cy < h - r; ++cy) {
    fill_patch_row(img, channel_mean, patch, cy, block);
    sum += block.colwise().sum().transpose();
    second.selfadjointView<Eigen::Lower>().rankUpdate(block.transpose());
  }
  const double n = static_cast<double>(nx) * ny;
  const Eigen::VectorXd mean = sum / n;
  Eigen::MatrixXd cov = second.selfadjointView<Eigen::Lower>();
  cov = cov / n - mean * mean.transpose();

  Plane out(w, h);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  if (eig.info() != Eigen::Success) throw Error("PCA eigen-decomposition failed");
  // Eigen sorts ascending; walk from the largest.
  const Eigen::VectorXd evals = eig.eigenvalues().cwiseMax(0.0);
  const double total = evals.sum();
  if (!(total > kFlatRange * kFlatRange)) return out;

  const Eigen::Index cap = cfg.pca_max_dims > 0 ? std::min<Eigen::Index>(cfg.pca_max_dims, dim) : dim;
  Eigen::Index keep = 0;
  double covered = 0.0;
  while (keep < cap) {
    covered += evals(dim - 1 - keep);
    ++keep;
    if (covered >= cfg.pca_variance * total) break;
  }
  const Eigen::MatrixXd basis = eig.eigenvectors().rightCols(keep);

  Plane centre_score(nx, ny);
  for (int cy = r; cy < h - r; ++cy) {
    fill_patch_row(img, channel_mean, patch, cy, block);
    block.rowwise() -= mean.transpose();
    const Eigen::VectorXd l1 = (block * basis).cwiseAbs().rowwise().sum();
    for (int i = 0; i < nx; ++i) centre_score(i, cy - r) = l1(i);
  }
  for (int y = 0; y < h; ++y) {
    const int cy = std::clamp(y - r, 0, ny - 1);
    for (int x = 0; x < w; ++x) out(x, y) = centre_score(std::clamp(x - r, 0, nx - 1), cy);
  }
  return out;
}

SaliencyMap compute_saliency(const LabImage& img, const SaliencyConfig& cfg) {
  Plane d = patch_distinctness(img, cfg);
  const auto [lo, hi] = std::minmax_element(d.values().begin(), d.values().end());
  const double min = *lo;
  const double range = *hi - *lo;
  for (double& v : d.values()) v = range < kFlatRange ? 0.0 : std::clamp((v - min) / range, 0.0, 1.0);
  return SaliencyMap(std::move(d));
}

double top_fraction_mean(const SaliencyMap& s, const Mask& select, double beta_top) {
  std::vector<double> vals;
  vals.reserve(select.count());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (select.at(i)) vals.push_back(s.at(i));
  }
  if (vals.empty()) throw InputError("degenerate region");
  // Guard against beta*n landing a hair above an integer.
  const double raw = beta_top * static_cast<double>(vals.size());
  const std::size_t k = std::clamp<std::size_t>(static_cast<std::size_t>(std::ceil(raw - 1e-9)), 1,
                                                vals.size());
  std::nth_element(vals.begin(), vals.begin() + static_cast<std::ptrdiff_t>(k - 1), vals.end(),
                   std::greater<>());
  double acc = 0.0;
  for (std::size_t i = 0; i < k; ++i) acc += vals[i];
  return acc / static_cast<double>(k);
}

double contrast_psi(const SaliencyMap& s, const Mask& region, const ContrastParams& params) {
  params.validate();
  if (region.width() != s.width() || region.height() != s.height()) {
    throw InputError("region size does not match saliency map");
  }
  const std::size_t inside = region.count();
  if (inside == 0 || inside == region.size()) throw InputError("degenerate region");
  return top_fraction_mean(s, region, params.beta_top) -
         top_fraction_mean(s, region.complement(), params.beta_top);
}

double saliency_energy(const SaliencyMap& s, const Mask& region, double delta_s,
                       const ContrastParams& params) {
  if (!(delta_s >= 0.0 && delta_s <= 1.0)) throw InputError("delta_s must be in [0,1]");
  return std::abs(contrast_psi(s, region, params) - delta_s);
}

}  // namespace salmanip
