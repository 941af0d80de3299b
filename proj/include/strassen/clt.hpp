#pragma once

#include <vector>

#include "strassen/measures.hpp"

namespace strassen {

/// Centered Gaussian limit of √n (T − P): covariance diag(p) − p pᵀ.
struct GaussParams {
  std::vector<double> mean;
  Table cov;
};

GaussParams gauss_params(const Dist& p);

struct BinaryCltInstance {
  double sigma_x2 = 0.0;
  double sigma_y2 = 0.0;
  double delta = 0.0;

  /// Variances a − a², b − b².
  static BinaryCltInstance from(double a, double b, double delta);
};

struct Crossing {
  std::vector<double> roots;           ///< sorted
  bool negative_discriminant = false;  ///< set when no real root exists
};

/// Solutions a′ of φ_X(a′) = φ_Y(a′ + Δ) for centered normal densities.
Crossing crossing_points(const BinaryCltInstance& inst);

/// Φ(x / √sigma2).
double normal_cdf(double x, double sigma2);

/// Binary Gaussian excess-cost probability Λ_Δ, 0 ≤ a ≤ b ≤ ½.
double lambda_binary(double a, double b, double delta);

/// sup_{a′} F_X(a′) − F_Y(a′ + Δ) by grid search and golden-section polish.
double lambda_dual_grid(double a, double b, double delta, int grid = 4001);

}  // namespace strassen
