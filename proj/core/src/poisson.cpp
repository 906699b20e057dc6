#include "salmanip/poisson.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace salmanip {
namespace {

using Vec = std::vector<double>;

double dot(const Vec& a, const Vec& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

// out = D^T (gx, gy)
void adjoint(const double* gx, const double* gy, int w, int h, double* out) {
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      double v = 0.0;
      if (x > 0) v += gx[i - 1];
      if (x + 1 < w) v -= gx[i];
      if (y > 0) v += gy[i - static_cast<std::size_t>(w)];
      if (y + 1 < h) v -= gy[i];
      out[i] = v;
    }
  }
}

class Operator {
 public:
  Operator(int w, int h, double lambda)
      : w_(w), h_(h), lambda_(lambda), gx_(static_cast<std::size_t>(w) * h),
        gy_(static_cast<std::size_t>(w) * h), tmp_(static_cast<std::size_t>(w) * h) {}

  // out = x + lambda * D^T D x
  void apply(const Vec& x, Vec& out) {
    for (int y = 0; y < h_; ++y) {
      for (int xx = 0; xx < w_; ++xx) {
        const std::size_t i = static_cast<std::size_t>(y) * w_ + xx;
        gx_[i] = xx + 1 < w_ ? x[i + 1] - x[i] : 0.0;
        gy_[i] = y + 1 < h_ ? x[i + static_cast<std::size_t>(w_)] - x[i] : 0.0;
      }
    }
    adjoint(gx_.data(), gy_.data(), w_, h_, tmp_.data());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] + lambda_ * tmp_[i];
  }

  double diagonal(std::size_t i) const {
    const int x = static_cast<int>(i % static_cast<std::size_t>(w_));
    const int y = static_cast<int>(i / static_cast<std::size_t>(w_));
    const int deg = (x > 0) + (x + 1 < w_) + (y > 0) + (y + 1 < h_);
    return 1.0 + lambda_ * deg;
  }

 private:
  int w_, h_;
  double lambda_;
  Vec gx_, gy_, tmp_;
};

}  // namespace

Plane difference_adjoint(const Plane& gx, const Plane& gy) {
  Plane out(gx.width(), gx.height());
  adjoint(gx.values().data(), gy.values().data(), gx.width(), gx.height(), out.values().data());
  return out;
}

Plane solve_screened_poisson(const Plane& data, const Plane& gx, const Plane& gy, double lambda,
                             const PoissonOptions& opts, PoissonStats* stats) {
  const int w = data.width();
  const int h = data.height();
  if (gx.width() != w || gx.height() != h || gy.width() != w || gy.height() != h) {
    throw InputError("gradient target does not match data term");
  }
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw InputError("lambda must be >= 0");
  if (!(opts.tol > 0.0)) throw InputError("tolerance must be > 0");

  const std::size_t n = data.size();
  Vec b(n);
  adjoint(gx.values().data(), gy.values().data(), w, h, b.data());
  for (std::size_t i = 0; i < n; ++i) b[i] = data.values()[i] + lambda * b[i];
  const double bnorm = std::sqrt(dot(b, b));

  Plane out = data;
  Vec x(out.values().begin(), out.values().end());
  if (bnorm == 0.0) {
    for (double& v : out.values()) v = 0.0;
    if (stats) *stats = {0, 0.0};
    return out;
  }

  Operator op(w, h, lambda);
  Vec inv_diag(n);
  for (std::size_t i = 0; i < n; ++i) inv_diag[i] = 1.0 / op.diagonal(i);

  Vec r(n), z(n), p(n), q(n);
  const double target = opts.tol * bnorm;
  auto true_residual = [&]() {
    op.apply(x, q);
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - q[i];
    return std::sqrt(dot(r, r));
  };

  double res = true_residual();
  int it = 0;
  while (res > target && it < opts.max_iterations) {
    // (Re)start from the true residual.
    for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
    p = z;
    double rz = dot(r, z);
    while (it < opts.max_iterations) {
      op.apply(p, q);
      const double pq = dot(p, q);
      if (!(pq > 0.0)) break;
      const double alpha = rz / pq;
      for (std::size_t i = 0; i < n; ++i) {
        x[i] += alpha * p[i];
        r[i] -= alpha * q[i];
      }
      ++it;
      if (std::sqrt(dot(r, r)) <= target) break;
      for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
      const double rz_next = dot(r, z);
      const double beta = rz_next / rz;
      rz = rz_next;
      for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }
    res = true_residual();
  }

  if (stats) *stats = {it, res / bnorm};
  if (res > target) {
    throw ConvergenceError("screened Poisson solve did not converge, relative residual " +
                               std::to_string(res / bnorm),
                           res / bnorm);
  }
  std::copy(x.begin(), x.end(), out.values().begin());
  return out;
}

LabImage solve_screened_poisson(const ScreenedPoissonProblem& p, const PoissonOptions& opts,
                                PoissonStats* stats) {
  const int w = p.data_term.width();
  const int h = p.data_term.height();
  if (p.gradient_target.width() != w || p.gradient_target.height() != h) {
    throw InputError("gradient target does not match data term");
  }
  LabImage out(w, h);
  PoissonStats worst;
  for (int c = 0; c < LabImage::kChannels; ++c) {
    PoissonStats s;
    out.channel(c) = solve_screened_poisson(p.data_term.channel(c), p.gradient_target.dx[c],
                                            p.gradient_target.dy[c], p.lambda, opts, &s);
    worst.iterations = std::max(worst.iterations, s.iterations);
    worst.relative_residual = std::max(worst.relative_residual, s.relative_residual);
  }
  if (stats) *stats = worst;
  return out;
}

}  // namespace salmanip
