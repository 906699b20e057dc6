#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <random>

#include "salmanip/image_ops.hpp"
#include "salmanip/saliency.hpp"

namespace salmanip {
namespace {

LabImage gray_with_red_square(int size, int x0, int y0, int side) {
  RgbImage rgb(size, size);
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      const bool in = x >= x0 && x < x0 + side && y >= y0 && y < y0 + side;
      std::uint8_t* p = rgb.pixel(x, y);
      p[0] = in ? 230 : 128;
      p[1] = in ? 20 : 128;
      p[2] = in ? 30 : 128;
    }
  }
  return rgb_to_lab(rgb);
}

// Straight from the definition: SVD of the centred patch matrix, keep the
// leading components up to the variance fraction, L1 of the coordinates.
Plane distinctness_oracle(const LabImage& img, int patch, double variance) {
  const int r = patch / 2;
  const int nx = img.width() - 2 * r, ny = img.height() - 2 * r;
  Eigen::MatrixXd data(nx * ny, patch * patch * 3);
  for (int cy = 0; cy < ny; ++cy) {
    for (int cx = 0; cx < nx; ++cx) {
      int k = 0;
      for (int dy = 0; dy < patch; ++dy) {
        for (int dx = 0; dx < patch; ++dx) {
          for (int c = 0; c < 3; ++c) data(cy * nx + cx, k++) = img(c, cx + dx, cy + dy);
        }
      }
    }
  }
  data.rowwise() -= data.colwise().mean();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(data, Eigen::ComputeThinV);
  const Eigen::VectorXd var = svd.singularValues().array().square();
  Eigen::Index keep = 0;
  double covered = 0.0;
  while (keep < var.size()) {
    covered += var(keep++);
    if (covered >= variance * var.sum()) break;
  }
  const Eigen::VectorXd l1 = (data * svd.matrixV().leftCols(keep)).cwiseAbs().rowwise().sum();
  Plane out(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      const int cx = std::clamp(x - r, 0, nx - 1), cy = std::clamp(y - r, 0, ny - 1);
      out(x, y) = l1(cy * nx + cx);
    }
  }
  return out;
}

TEST(Saliency, ConstantImageGivesZeros) {
  LabImage img(20, 20);
  for (double& v : img.channel(0).values()) v = 60.0;
  const SaliencyMap s = compute_saliency(img);
  for (double v : s.plane().values()) EXPECT_EQ(v, 0.0);
  for (double v : patch_distinctness(img).values()) EXPECT_NEAR(v, 0.0, 1e-9);
}

TEST(Saliency, DistinctnessMatchesDefinition) {
  std::mt19937 rng(21);
  std::normal_distribution<double> n(0.0, 10.0);
  LabImage img(16, 16);
  for (int c = 0; c < 3; ++c) {
    for (int y = 0; y < 16; ++y) {
      for (int x = 0; x < 16; ++x) img(c, x, y) = 40.0 + 2.0 * x - y + c * 5.0 + n(rng);
    }
  }
  const Plane got = patch_distinctness(img);
  const Plane want = distinctness_oracle(img, 5, 0.97);
  double scale = 0.0;
  for (double v : want.values()) scale = std::max(scale, v);
  for (std::size_t i = 0; i < got.size(); ++i) {
    ASSERT_NEAR(got.values()[i], want.values()[i], 1e-8 * scale) << i;
  }
}

TEST(Saliency, RedSquareHoldsTheMaximum) {
  const LabImage img = gray_with_red_square(64, 30, 12, 10);
  const Plane oracle = distinctness_oracle(img, 5, 0.97);
  const auto at_max = [](const Plane& p) {
    const auto it = std::max_element(p.values().begin(), p.values().end());
    const auto i = static_cast<int>(it - p.values().begin());
    return std::pair{i % p.width(), i / p.width()};
  };
  const auto [ox, oy] = at_max(oracle);
  EXPECT_TRUE(ox >= 30 && ox < 40 && oy >= 12 && oy < 22);

  const SaliencyMap s = compute_saliency(img);
  const auto [x, y] = at_max(s.plane());
  EXPECT_TRUE(x >= 30 && x < 40 && y >= 12 && y < 22) << x << "," << y;
}

TEST(Saliency, NormalisedToUnitRange) {
  const LabImage img = gray_with_red_square(40, 5, 5, 8);
  const SaliencyMap s = compute_saliency(img);
  const auto [lo, hi] = std::minmax_element(s.plane().values().begin(), s.plane().values().end());
  EXPECT_EQ(*lo, 0.0);
  EXPECT_EQ(*hi, 1.0);
}

TEST(Saliency, InvariantToLightnessShift) {
  std::mt19937 rng(4);
  std::uniform_real_distribution<double> u(20.0, 60.0);
  LabImage img(24, 20);
  for (int c = 0; c < 3; ++c) {
    for (double& v : img.channel(c).values()) v = u(rng);
  }
  LabImage shifted = img;
  for (double& v : shifted.channel(0).values()) v += 17.0;
  const SaliencyMap a = compute_saliency(img), b = compute_saliency(shifted);
  for (std::size_t i = 0; i < a.size(); ++i) ASSERT_NEAR(a.at(i), b.at(i), 1e-9);
}

TEST(Saliency, RejectsCentrePriorAndTinyImages) {
  SaliencyConfig cfg;
  cfg.use_center_prior = true;
  EXPECT_THROW(cfg.validate(), InputError);
  EXPECT_THROW(compute_saliency(LabImage(4, 10)), InputError);
}

TEST(SaliencyMap, RejectsValuesOutsideUnitRange) {
  Plane p(2, 2, 0.5);
  p(1, 1) = 1.5;
  EXPECT_THROW(SaliencyMap{p}, InputError);
}

TEST(SaliencyMap, GrayEncodingRounds) {
  Plane p(3, 1);
  p(0, 0) = 0.0;
  p(1, 0) = 0.5;
  p(2, 0) = 1.0;
  const GrayImage g = SaliencyMap(p).to_gray();
  EXPECT_EQ(g.at(0, 0), 0);
  EXPECT_EQ(g.at(1, 0), 128);
  EXPECT_EQ(g.at(2, 0), 255);
}

SaliencyMap map_from(std::initializer_list<double> v, int w) {
  Plane p(w, static_cast<int>(v.size()) / w);
  std::copy(v.begin(), v.end(), p.values().begin());
  return SaliencyMap(p);
}

Mask left_half(int w, int h) {
  Mask m(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w / 2; ++x) m.set(x, y, true);
  }
  return m;
}

TEST(Contrast, HandWorkedFourByFour) {
  const SaliencyMap s = map_from({.9, .8, .1, .2, .7, .6, .1, .3, .5, .4, .2, .1, .3, .2, .1, .0}, 4);
  EXPECT_NEAR(contrast_psi(s, left_half(4, 4), {0.25}), 0.60, 1e-12);
}

TEST(Contrast, Extremes) {
  Plane p(6, 4);
  const Mask r = left_half(6, 4);
  for (int y = 0; y < 4; ++y) {
    for (int x = 0; x < 6; ++x) p(x, y) = r(x, y) ? 1.0 : 0.0;
  }
  EXPECT_DOUBLE_EQ(contrast_psi(SaliencyMap(p), r), 1.0);
  EXPECT_DOUBLE_EQ(contrast_psi(SaliencyMap(Plane(6, 4, 0.37)), r), 0.0);
}

TEST(Contrast, DegenerateRegionThrows) {
  const SaliencyMap s(Plane(4, 4, 0.5));
  EXPECT_THROW(contrast_psi(s, Mask(4, 4, false)), InputError);
  EXPECT_THROW(contrast_psi(s, Mask(4, 4, true)), InputError);
}

TEST(Contrast, TopFractionUsesCeiling) {
  // 5 selected values, beta 0.3 -> top 2.
  const SaliencyMap s = map_from({0.1, 0.9, 0.5, 0.7, 0.3, 0.0}, 6);
  Mask m(6, 1, true);
  m.set(5, 0, false);
  EXPECT_NEAR(top_fraction_mean(s, m, 0.3), 0.8, 1e-12);
  EXPECT_NEAR(top_fraction_mean(s, m, 1.0), 0.5, 1e-12);
}

TEST(Energy, AbsoluteDifference) {
  // psi = 0.6 on the hand-worked map.
  const SaliencyMap s = map_from({.9, .8, .1, .2, .7, .6, .1, .3, .5, .4, .2, .1, .3, .2, .1, .0}, 4);
  const Mask r = left_half(4, 4);
  EXPECT_NEAR(saliency_energy(s, r, 0.6, {0.25}), 0.0, 1e-12);
  EXPECT_NEAR(saliency_energy(s, r, 0.2, {0.25}), 0.4, 1e-12);
  EXPECT_NEAR(saliency_energy(s, r, 1.0, {0.25}), 0.4, 1e-12);
  EXPECT_THROW(saliency_energy(s, r, 1.5), InputError);
}

}  // namespace
}  // namespace salmanip
