#include "salmanip/setup_mask.hpp"

#include <algorithm>

#include "salmanip/image_ops.hpp"

namespace salmanip {

std::string to_string(Mode m) {
  switch (m) {
    case Mode::kEnhance:
      return "enhance";
    case Mode::kAttenuate:
      return "attenuate";
    case Mode::kDeclutter:
      return "declutter";
  }
  return "unknown";
}

Mode parse_mode(const std::string& s) {
  if (s == "enhance") return Mode::kEnhance;
  if (s == "attenuate") return Mode::kAttenuate;
  if (s == "declutter") return Mode::kDeclutter;
  throw InputError("unknown mode '" + s + "'");
}

SetupMask::SetupMask(int width, int height, Label fill) : width_(width), height_(height) {
  if (width < 0 || height < 0) throw InputError("negative setup dimensions");
  labels_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
}

Mask SetupMask::select(Label l) const {
  Mask m(width_, height_);
  for (std::size_t i = 0; i < labels_.size(); ++i) m.set(i, labels_[i] == l);
  return m;
}

std::size_t SetupMask::count(Label l) const {
  return static_cast<std::size_t>(std::count(labels_.begin(), labels_.end(), l));
}

void SetupMask::validate() const {
  if (width_ < 1 || height_ < 1) throw InputError("empty setup mask");
  if (count(Label::kKeep) == labels_.size()) {
    throw InputError("setup mask has no Increase or Decrease pixel");
  }
}

SetupMask build_setup(const Mask& region, Mode mode) {
  const std::size_t inside = region.count();
  if (inside == 0 || inside == region.size()) throw InputError("degenerate region");
  Label in = Label::kKeep;
  Label out = Label::kKeep;
  switch (mode) {
    case Mode::kEnhance:
      in = Label::kIncrease;
      out = Label::kDecrease;
      break;
    case Mode::kAttenuate:
      in = Label::kDecrease;
      out = Label::kKeep;
      break;
    case Mode::kDeclutter:
      in = Label::kKeep;
      out = Label::kDecrease;
      break;
  }
  SetupMask s(region.width(), region.height());
  for (std::size_t i = 0; i < region.size(); ++i) s.set(i, region.at(i) ? in : out);
  return s;
}

Mask contrast_region(const Mask& region, Mode mode) {
  return mode == Mode::kAttenuate ? region.complement() : region;
}

Mask contrast_region(const SetupMask& setup) {
  if (setup.count(Label::kIncrease) > 0) return setup.select(Label::kIncrease);
  return setup.select(Label::kDecrease).complement();
}

SetupMask setup_from_gray(const GrayImage& g) {
  SetupMask s(g.width, g.height);
  for (std::size_t i = 0; i < g.data.size(); ++i) {
    const int v = g.data[i];
    s.set(i, v < 64 ? Label::kDecrease : (v < 192 ? Label::kKeep : Label::kIncrease));
  }
  return s;
}

GrayImage setup_to_gray(const SetupMask& s) {
  GrayImage g(s.width(), s.height());
  for (std::size_t i = 0; i < s.size(); ++i) {
    switch (s.at(i)) {
      case Label::kDecrease:
        g.data[i] = 0;
        break;
      case Label::kKeep:
        g.data[i] = 128;
        break;
      case Label::kIncrease:
        g.data[i] = 255;
        break;
    }
  }
  return g;
}

Mask mask_from_gray(const GrayImage& g) {
  Mask m(g.width, g.height);
  for (std::size_t i = 0; i < g.data.size(); ++i) m.set(i, g.data[i] >= 128);
  return m;
}

SetupMask resample_setup(const SetupMask& s, int width, int height) {
  if (width == s.width() && height == s.height()) return s;
  Plane frac[3];
  for (int l = 0; l < 3; ++l) {
    Plane p(s.width(), s.height());
    for (std::size_t i = 0; i < s.size(); ++i) {
      p.values()[i] = static_cast<int>(s.at(i)) == l ? 1.0 : 0.0;
    }
    frac[l] = resample_to(p, width, height);
  }
  SetupMask out(width, height);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double keep = frac[0].values()[i];
    const double inc = frac[1].values()[i];
    const double dec = frac[2].values()[i];
    Label l = Label::kKeep;
    if (inc > keep && inc > dec) l = Label::kIncrease;
    else if (dec > keep && dec > inc) l = Label::kDecrease;
    out.set(i, l);
  }
  return out;
}

}  // namespace salmanip
