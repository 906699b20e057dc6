#pragma once

#include "salmanip/image.hpp"

namespace salmanip {

/// min_J ||J - v||^2 + lambda * ||grad J - g||^2 per channel, with forward
/// differences that vanish across the far borders (Neumann boundaries).
struct ScreenedPoissonProblem {
  LabImage data_term;
  GradientField gradient_target;
  double lambda = 5.0;
};

struct PoissonOptions {
  double tol = 1e-8;  // relative: ||b - A x|| <= tol * ||b||
  int max_iterations = 10000;
};

struct PoissonStats {
  int iterations = 0;
  double relative_residual = 0.0;
};

/// Solves (I + lambda * D^T D) x = v + lambda * D^T g by Jacobi-preconditioned
/// conjugate gradient, starting from x = v. Throws ConvergenceError if the
/// residual target is not met within max_iterations.
Plane solve_screened_poisson(const Plane& data, const Plane& gx, const Plane& gy, double lambda,
                             const PoissonOptions& opts = {}, PoissonStats* stats = nullptr);

LabImage solve_screened_poisson(const ScreenedPoissonProblem& p, const PoissonOptions& opts = {},
                                PoissonStats* stats = nullptr);

/// D^T applied to a pair of difference planes (negative divergence).
Plane difference_adjoint(const Plane& gx, const Plane& gy);

}  // namespace salmanip
