#pragma once

#include "rgfi/solver.hpp"

namespace rgfi {

struct EfficientConfig {
  SolverConfig base;
  int tau_max1 = 50;  // gradient steps per filter update
  int tau_max2 = 50;  // coordinate-descent sweeps per denoising update
  /// step size of the filter update; 0 selects 1/L automatically
  double mu = 0.0;

  void validate() const;
};

/// Gradient of f1(H) = ||Y - HX||^2 + gamma ||SH - HS||^2 with respect to H.
Matrix grad_f1(const Matrix& h, const Matrix& s, const Matrix& x, const Matrix& y, double gamma);

double f1_value(const Matrix& h, const Matrix& s, const Matrix& x, const Matrix& y, double gamma);

/// L = 2 ||X X^T||_2 + 8 gamma ||S||_2^2, an upper bound on the curvature of f1.
double f1_lipschitz(const Matrix& s, const Matrix& x, double gamma);

struct GdResult {
  Matrix h;
  int iterations = 0;
  double mu = 0.0;    // final step size (after any halvings)
  int halvings = 0;
};

/// tau_max1 steps H <- H - mu grad f1. A non-positive mu means 1/L. Three
/// consecutive objective increases halve mu.
GdResult filter_step_gd(const Matrix& h_init, const Matrix& s, const Matrix& x, const Matrix& y,
                        double gamma, double mu, int tau_max1);

/// Reduced-complexity solver: gradient steps on H and bounded coordinate
/// descent sweeps on S. H^(0) comes from the closed-form identification on
/// Sbar with order min(5, N).
RfiResult efficient_rfi(const Matrix& x, const Matrix& y, const Gso& sbar, const EfficientConfig& config);

}  // namespace rgfi
