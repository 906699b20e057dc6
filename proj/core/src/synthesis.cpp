#include "salmanip/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace salmanip {
namespace {

// L,a,b interleaved copy for contiguous patch rows.
struct Interleaved {
  int w = 0;
  int h = 0;
  std::vector<double> px;

  explicit Interleaved(const LabImage& img) : w(img.width()), h(img.height()) {
    px.resize(img.pixel_count() * 3);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        double* p = &px[(static_cast<std::size_t>(y) * w + x) * 3];
        p[0] = img(0, x, y);
        p[1] = img(1, x, y);
        p[2] = img(2, x, y);
      }
    }
  }

  const double* row(int x0, int y) const {
    return &px[(static_cast<std::size_t>(y) * w + x0) * 3];
  }
};

// SSD with early exit once the partial sum reaches `cutoff`; the return value
// is exact whenever it is below the cutoff.
double ssd_bounded(const Interleaved& t, int tx, int ty, const Interleaved& s, int sx, int sy,
                   int r, double cutoff) {
  const int n = 3 * (2 * r + 1);
  double acc = 0.0;
  for (int dy = -r; dy <= r; ++dy) {
    const double* a = t.row(tx - r, ty + dy);
    const double* b = s.row(sx - r, sy + dy);
    for (int k = 0; k < n; ++k) {
      const double d = a[k] - b[k];
      acc += d * d;
    }
    if (acc >= cutoff) return acc;
  }
  return acc;
}

class Searcher {
 public:
  Searcher(const LabImage& target, const Mask& target_valid, const PatchDatabase& db,
           const SynthesisConfig& cfg, std::uint64_t seed)
      : t_(target), s_(db.source), valid_(db.valid), target_valid_(target_valid), cfg_(cfg),
        r_(cfg.patch_size / 2), rng_(seed) {}

  NNField run(const NNField* init) {
    NNField field(t_.w, t_.h, cfg_.patch_size);
    collect_admissible();
    collect_targets();
    if (admissible_.empty()) throw InputError("empty database");
    if (targets_.empty()) throw InputError("no valid target patch");

    for (const auto& [tx, ty] : targets_) {
      int sx = -1, sy = -1;
      if (init != nullptr && init->width() == t_.w && init->height() == t_.h &&
          init->has_match(tx, ty) && admissible(init->source_x(tx, ty), init->source_y(tx, ty))) {
        sx = init->source_x(tx, ty);
        sy = init->source_y(tx, ty);
      } else {
        const auto& pick = admissible_[uniform(admissible_.size())];
        sx = pick.first;
        sy = pick.second;
      }
      field.set(tx, ty, sx, sy, ssd_bounded(t_, tx, ty, s_, sx, sy, r_, kInf));
      if (s_.w == t_.w && s_.h == t_.h && admissible(tx, ty)) try_candidate(field, tx, ty, tx, ty);
    }
    field.iteration_costs.push_back(field.total_distance());

    for (int it = 0; it < cfg_.pm_iterations; ++it) {
      const bool forward = it % 2 == 0;
      const int step = forward ? 1 : -1;
      const std::size_t n = targets_.size();
      for (std::size_t k = 0; k < n; ++k) {
        const auto [tx, ty] = targets_[forward ? k : n - 1 - k];
        propagate(field, tx, ty, tx - step, ty, step, 0);
        propagate(field, tx, ty, tx, ty - step, 0, step);
        random_search(field, tx, ty);
      }
      field.iteration_costs.push_back(field.total_distance());
    }
    return field;
  }

 private:
  static constexpr double kInf = std::numeric_limits<double>::infinity();

  bool admissible(int sx, int sy) const {
    return sx >= r_ && sy >= r_ && sx < s_.w - r_ && sy < s_.h - r_ && valid_(sx, sy);
  }

  void collect_admissible() {
    for (int y = r_; y < s_.h - r_; ++y) {
      for (int x = r_; x < s_.w - r_; ++x) {
        if (valid_(x, y)) admissible_.emplace_back(x, y);
      }
    }
  }

  void collect_targets() {
    for (int y = r_; y < t_.h - r_; ++y) {
      for (int x = r_; x < t_.w - r_; ++x) {
        if (target_valid_(x, y)) targets_.emplace_back(x, y);
      }
    }
  }

  std::size_t uniform(std::size_t n) { return static_cast<std::size_t>(rng_() % n); }

  void try_candidate(NNField& field, int tx, int ty, int sx, int sy) {
    const double best = field.distance(tx, ty);
    const double d = ssd_bounded(t_, tx, ty, s_, sx, sy, r_, best);
    if (d < best) field.set(tx, ty, sx, sy, d);
  }

  void propagate(NNField& field, int tx, int ty, int nx, int ny, int ox, int oy) {
    if (nx < 0 || ny < 0 || nx >= t_.w || ny >= t_.h || !field.has_match(nx, ny)) return;
    const int sx = field.source_x(nx, ny) + ox;
    const int sy = field.source_y(nx, ny) + oy;
    if (sx == field.source_x(tx, ty) && sy == field.source_y(tx, ty)) return;
    if (admissible(sx, sy)) try_candidate(field, tx, ty, sx, sy);
  }

  void random_search(NNField& field, int tx, int ty) {
    double radius = std::max(s_.w, s_.h);
    while (radius >= 1.0) {
      const int rad = static_cast<int>(radius);
      const int bx = field.source_x(tx, ty);
      const int by = field.source_y(tx, ty);
      const int x0 = std::max(r_, bx - rad);
      const int x1 = std::min(s_.w - 1 - r_, bx + rad);
      const int y0 = std::max(r_, by - rad);
      const int y1 = std::min(s_.h - 1 - r_, by + rad);
      const int sx = x0 + static_cast<int>(uniform(static_cast<std::size_t>(x1 - x0 + 1)));
      const int sy = y0 + static_cast<int>(uniform(static_cast<std::size_t>(y1 - y0 + 1)));
      if ((sx != bx || sy != by) && admissible(sx, sy)) try_candidate(field, tx, ty, sx, sy);
      radius *= cfg_.random_search_decay;
    }
  }

  Interleaved t_;
  Interleaved s_;
  const Mask& valid_;
  const Mask& target_valid_;
  const SynthesisConfig& cfg_;
  int r_;
  std::mt19937_64 rng_;
  std::vector<std::pair<int, int>> admissible_;
  std::vector<std::pair<int, int>> targets_;
};

}  // namespace

void SynthesisConfig::validate() const {
  if (patch_size < 1 || patch_size % 2 == 0) throw InputError("patch size must be odd");
  if (pm_iterations < 1) throw InputError("pm_iterations must be >= 1");
  if (!(random_search_decay > 0.0 && random_search_decay < 1.0)) {
    throw InputError("random_search_decay must be in (0,1)");
  }
}

double patch_ssd(PatchRef a, PatchRef b, int patch_size) {
  const int r = patch_size / 2;
  double acc = 0.0;
  for (int dy = -r; dy <= r; ++dy) {
    for (int dx = -r; dx <= r; ++dx) {
      for (int c = 0; c < 3; ++c) {
        const double d = (*a.image)(c, a.cx + dx, a.cy + dy) - (*b.image)(c, b.cx + dx, b.cy + dy);
        acc += d * d;
      }
    }
  }
  return acc;
}

NNField::NNField(int width, int height, int patch_size)
    : width_(width), height_(height), patch_size_(patch_size) {
  const std::size_t n = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  matched_.assign(n, 0);
  sx_.assign(n, -1);
  sy_.assign(n, -1);
  dist_.assign(n, 0.0);
}

void NNField::set(int x, int y, int source_x, int source_y, double dist) {
  const std::size_t i = index(x, y);
  matched_[i] = 1;
  sx_[i] = source_x;
  sy_[i] = source_y;
  dist_[i] = dist;
}

std::size_t NNField::match_count() const {
  return static_cast<std::size_t>(std::count(matched_.begin(), matched_.end(), std::uint8_t{1}));
}

double NNField::total_distance() const {
  double acc = 0.0;
  for (std::size_t i = 0; i < dist_.size(); ++i) {
    if (matched_[i]) acc += dist_[i];
  }
  return acc;
}

double NNField::mean_distance() const {
  const std::size_t n = match_count();
  return n == 0 ? 0.0 : total_distance() / static_cast<double>(n);
}

NNField nn_search(const LabImage& target, const Mask& target_valid, const PatchDatabase& db,
                  const SynthesisConfig& cfg, std::uint64_t seed, const NNField* init) {
  cfg.validate();
  if (target_valid.width() != target.width() || target_valid.height() != target.height()) {
    throw InputError("target mask does not match target image");
  }
  if (db.valid.width() != db.source.width() || db.valid.height() != db.source.height()) {
    throw InputError("database mask does not match its source image");
  }
  return Searcher(target, target_valid, db, cfg, seed).run(init);
}

VoteResult vote(std::span<const FieldSource> fields, const SetupMask& setup,
                const LabImage& original) {
  const int w = original.width();
  const int h = original.height();
  if (setup.width() != w || setup.height() != h) {
    throw InputError("setup mask does not match image size");
  }
  const std::size_t n = original.pixel_count();
  // Mean accumulated as first sample plus deviations, so identical
  // contributions reproduce the sample exactly.
  std::vector<double> base(3 * n, 0.0);
  std::vector<double> dev(3 * n, 0.0);
  std::vector<std::uint32_t> count(n, 0);

  for (const FieldSource& fs : fields) {
    const NNField& f = *fs.field;
    const LabImage& src = fs.db->source;
    if (f.width() != w || f.height() != h) throw InputError("field does not match image size");
    const int r = f.patch_size() / 2;
    for (int ty = 0; ty < h; ++ty) {
      for (int tx = 0; tx < w; ++tx) {
        if (!f.has_match(tx, ty)) continue;
        const int sx = f.source_x(tx, ty);
        const int sy = f.source_y(tx, ty);
        for (int dy = -r; dy <= r; ++dy) {
          for (int dx = -r; dx <= r; ++dx) {
            const int px = tx + dx;
            const int py = ty + dy;
            const std::size_t i = static_cast<std::size_t>(py) * w + px;
            if (setup.at(i) == Label::kKeep) continue;
            for (int c = 0; c < 3; ++c) {
              const double v = src(c, sx + dx, sy + dy);
              if (count[i] == 0) base[3 * i + c] = v;
              else dev[3 * i + c] += v - base[3 * i + c];
            }
            ++count[i];
          }
        }
      }
    }
  }

  VoteResult res{LabImage(w, h), 0};
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      const bool keep = setup.at(i) == Label::kKeep;
      if (!keep && count[i] == 0) ++res.uncovered;
      for (int c = 0; c < 3; ++c) {
        res.image(c, x, y) = keep || count[i] == 0
                                 ? original(c, x, y)
                                 : base[3 * i + c] + dev[3 * i + c] / count[i];
      }
    }
  }
  return res;
}

RgbImage field_to_rgb(const NNField& field) {
  RgbImage out(field.width(), field.height());
  for (int y = 0; y < field.height(); ++y) {
    for (int x = 0; x < field.width(); ++x) {
      std::uint8_t* p = out.pixel(x, y);
      if (!field.has_match(x, y)) continue;
      p[0] = static_cast<std::uint8_t>(std::clamp(128 + field.source_x(x, y) - x, 0, 255));
      p[1] = static_cast<std::uint8_t>(std::clamp(128 + field.source_y(x, y) - y, 0, 255));
      p[2] = 255;
    }
  }
  return out;
}

}  // namespace salmanip
