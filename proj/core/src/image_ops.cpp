#include "salmanip/image_ops.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace salmanip {
namespace {

using Mat3 = std::array<std::array<double, 3>, 3>;

// Linear sRGB -> XYZ, D65.
constexpr Mat3 kRgbToXyz = {{{0.4124564, 0.3575761, 0.1804375},
                             {0.2126729, 0.7151522, 0.0721750},
                             {0.0193339, 0.1191920, 0.9503041}}};

constexpr Mat3 invert(const Mat3& m) {
  const double c00 = m[1][1] * m[2][2] - m[1][2] * m[2][1];
  const double c01 = m[1][2] * m[2][0] - m[1][0] * m[2][2];
  const double c02 = m[1][0] * m[2][1] - m[1][1] * m[2][0];
  const double det = m[0][0] * c00 + m[0][1] * c01 + m[0][2] * c02;
  Mat3 r{};
  r[0][0] = c00 / det;
  r[0][1] = (m[0][2] * m[2][1] - m[0][1] * m[2][2]) / det;
  r[0][2] = (m[0][1] * m[1][2] - m[0][2] * m[1][1]) / det;
  r[1][0] = c01 / det;
  r[1][1] = (m[0][0] * m[2][2] - m[0][2] * m[2][0]) / det;
  r[1][2] = (m[0][2] * m[1][0] - m[0][0] * m[1][2]) / det;
  r[2][0] = c02 / det;
  r[2][1] = (m[0][1] * m[2][0] - m[0][0] * m[2][1]) / det;
  r[2][2] = (m[0][0] * m[1][1] - m[0][1] * m[1][0]) / det;
  return r;
}

constexpr Mat3 kXyzToRgb = invert(kRgbToXyz);

// White point = image of linear RGB (1,1,1), so sRGB white maps to a = b = 0.
constexpr double kWhite[3] = {kRgbToXyz[0][0] + kRgbToXyz[0][1] + kRgbToXyz[0][2],
                              kRgbToXyz[1][0] + kRgbToXyz[1][1] + kRgbToXyz[1][2],
                              kRgbToXyz[2][0] + kRgbToXyz[2][1] + kRgbToXyz[2][2]};

constexpr double kDelta = 6.0 / 29.0;

double srgb_to_linear(double c) {
  return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
}

double linear_to_srgb(double c) {
  return c <= 0.0031308 ? 12.92 * c : 1.055 * std::pow(c, 1.0 / 2.4) - 0.055;
}

double lab_f(double t) {
  return t > kDelta * kDelta * kDelta ? std::cbrt(t) : t / (3.0 * kDelta * kDelta) + 4.0 / 29.0;
}

double lab_f_inv(double t) {
  return t > kDelta ? t * t * t : 3.0 * kDelta * kDelta * (t - 4.0 / 29.0);
}

// 256-entry table; every 8-bit input goes through it.
const std::array<double, 256>& linear_table() {
  static const std::array<double, 256> table = [] {
    std::array<double, 256> t{};
    for (int i = 0; i < 256; ++i) t[static_cast<std::size_t>(i)] = srgb_to_linear(i / 255.0);
    return t;
  }();
  return table;
}

std::uint8_t to_byte(double v) {
  const double scaled = std::round(std::clamp(v, 0.0, 1.0) * 255.0);
  return static_cast<std::uint8_t>(scaled);
}

constexpr double kBinomial[5] = {1.0 / 16, 4.0 / 16, 6.0 / 16, 4.0 / 16, 1.0 / 16};

int clamp_index(int i, int n) { return std::clamp(i, 0, n - 1); }

Plane binomial_blur(const Plane& in) {
  const int w = in.width();
  const int h = in.height();
  Plane tmp(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int k = -2; k <= 2; ++k) acc += kBinomial[k + 2] * in(clamp_index(x + k, w), y);
      tmp(x, y) = acc;
    }
  }
  Plane out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int k = -2; k <= 2; ++k) acc += kBinomial[k + 2] * tmp(x, clamp_index(y + k, h));
      out(x, y) = acc;
    }
  }
  return out;
}

// Weights of one output sample along one axis: pairs (source index, weight).
struct Tap {
  int index;
  double weight;
};

std::vector<std::vector<Tap>> axis_taps(int src, int dst) {
  std::vector<std::vector<Tap>> taps(static_cast<std::size_t>(dst));
  if (src == dst) {
    for (int i = 0; i < dst; ++i) taps[static_cast<std::size_t>(i)].push_back({i, 1.0});
    return taps;
  }
  const double scale = static_cast<double>(src) / dst;
  if (dst < src) {
    // Box integration of [i*scale, (i+1)*scale).
    for (int i = 0; i < dst; ++i) {
      const double lo = i * scale;
      const double hi = (i + 1) * scale;
      auto& t = taps[static_cast<std::size_t>(i)];
      for (int s = static_cast<int>(std::floor(lo)); s < static_cast<int>(std::ceil(hi)); ++s) {
        const double overlap = std::min<double>(hi, s + 1) - std::max<double>(lo, s);
        if (overlap > 0.0) t.push_back({std::clamp(s, 0, src - 1), overlap / scale});
      }
    }
  } else {
    for (int i = 0; i < dst; ++i) {
      const double pos = (i + 0.5) * scale - 0.5;
      const int i0 = static_cast<int>(std::floor(pos));
      const double frac = pos - i0;
      auto& t = taps[static_cast<std::size_t>(i)];
      t.push_back({clamp_index(i0, src), 1.0 - frac});
      if (frac > 0.0) t.push_back({clamp_index(i0 + 1, src), frac});
    }
  }
  return taps;
}

}  // namespace

Lab srgb_to_lab(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  const auto& lin = linear_table();
  const double rgb[3] = {lin[r], lin[g], lin[b]};
  double f[3];
  for (int i = 0; i < 3; ++i) {
    const auto& row = kRgbToXyz[static_cast<std::size_t>(i)];
    const double v = row[0] * rgb[0] + row[1] * rgb[1] + row[2] * rgb[2];
    f[i] = lab_f(v / kWhite[i]);
  }
  return {116.0 * f[1] - 16.0, 500.0 * (f[0] - f[1]), 200.0 * (f[1] - f[2])};
}

void lab_to_srgb(const Lab& lab, std::uint8_t out[3]) {
  const double fy = (lab.L + 16.0) / 116.0;
  const double fx = fy + lab.a / 500.0;
  const double fz = fy - lab.b / 200.0;
  const double xyz[3] = {kWhite[0] * lab_f_inv(fx), kWhite[1] * lab_f_inv(fy),
                         kWhite[2] * lab_f_inv(fz)};
  for (int i = 0; i < 3; ++i) {
    const auto& row = kXyzToRgb[static_cast<std::size_t>(i)];
    const double lin = row[0] * xyz[0] + row[1] * xyz[1] + row[2] * xyz[2];
    out[i] = to_byte(linear_to_srgb(std::clamp(lin, 0.0, 1.0)));
  }
}

LabImage rgb_to_lab(const RgbImage& img) {
  img.validate();
  LabImage out(img.width, img.height);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      const std::uint8_t* p = img.pixel(x, y);
      const Lab lab = srgb_to_lab(p[0], p[1], p[2]);
      out(0, x, y) = lab.L;
      out(1, x, y) = lab.a;
      out(2, x, y) = lab.b;
    }
  }
  return out;
}

RgbImage lab_to_rgb(const LabImage& img) {
  RgbImage out(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      lab_to_srgb({img(0, x, y), img(1, x, y), img(2, x, y)}, out.pixel(x, y));
    }
  }
  return out;
}

GradientField gradients(const LabImage& img) {
  const int w = img.width();
  const int h = img.height();
  GradientField g;
  for (int c = 0; c < LabImage::kChannels; ++c) {
    const Plane& p = img.channel(c);
    g.dx[c] = Plane(w, h);
    g.dy[c] = Plane(w, h);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        if (x + 1 < w) g.dx[c](x, y) = p(x + 1, y) - p(x, y);
        if (y + 1 < h) g.dy[c](x, y) = p(x, y + 1) - p(x, y);
      }
    }
  }
  return g;
}

Plane resample_to(const Plane& plane, int width, int height) {
  if (width < 1 || height < 1) throw InputError("resample target must be at least 1x1");
  if (width == plane.width() && height == plane.height()) return plane;
  const auto xt = axis_taps(plane.width(), width);
  const auto yt = axis_taps(plane.height(), height);
  Plane rows(width, plane.height());
  for (int y = 0; y < plane.height(); ++y) {
    for (int x = 0; x < width; ++x) {
      double acc = 0.0;
      for (const Tap& t : xt[static_cast<std::size_t>(x)]) acc += t.weight * plane(t.index, y);
      rows(x, y) = acc;
    }
  }
  Plane out(width, height);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      double acc = 0.0;
      for (const Tap& t : yt[static_cast<std::size_t>(y)]) acc += t.weight * rows(x, t.index);
      out(x, y) = acc;
    }
  }
  return out;
}

LabImage resample_to(const LabImage& img, int width, int height) {
  LabImage out(width, height);
  for (int c = 0; c < LabImage::kChannels; ++c) {
    out.channel(c) = resample_to(img.channel(c), width, height);
  }
  return out;
}

Mask resample_mask(const Mask& mask, int width, int height) {
  if (width == mask.width() && height == mask.height()) return mask;
  Plane p(mask.width(), mask.height());
  for (std::size_t i = 0; i < mask.size(); ++i) p.values()[i] = mask.at(i) ? 1.0 : 0.0;
  const Plane r = resample_to(p, width, height);
  Mask out(width, height);
  for (std::size_t i = 0; i < out.size(); ++i) out.set(i, r.values()[i] >= 0.5);
  return out;
}

int half_extent(int extent) { return std::max(1, extent / 2); }

std::vector<std::pair<int, int>> pyramid_sizes(int width, int height, int coarsest_width) {
  std::vector<std::pair<int, int>> sizes{{width, height}};
  while (half_extent(sizes.back().first) >= coarsest_width && sizes.back().first >= 2) {
    sizes.emplace_back(half_extent(sizes.back().first), half_extent(sizes.back().second));
  }
  std::reverse(sizes.begin(), sizes.end());
  return sizes;
}

LabImage blur_decimate(const LabImage& img, int width, int height) {
  LabImage out(width, height);
  for (int c = 0; c < LabImage::kChannels; ++c) {
    const Plane blurred = binomial_blur(img.channel(c));
    Plane& dst = out.channel(c);
    for (int y = 0; y < height; ++y) {
      for (int x = 0; x < width; ++x) {
        dst(x, y) = blurred(std::min(2 * x, img.width() - 1), std::min(2 * y, img.height() - 1));
      }
    }
  }
  return out;
}

Pyramid build_pyramid(const LabImage& img, int coarsest_width) {
  const auto sizes = pyramid_sizes(img.width(), img.height(), coarsest_width);
  Pyramid pyr;
  pyr.levels.resize(sizes.size());
  pyr.levels.back() = img;
  for (std::size_t k = sizes.size() - 1; k > 0; --k) {
    pyr.levels[k - 1] = blur_decimate(pyr.levels[k], sizes[k - 1].first, sizes[k - 1].second);
  }
  return pyr;
}

}  // namespace salmanip
