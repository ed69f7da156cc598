#pragma once

#include <Eigen/Dense>

#include <vector>

namespace pilotforge {

/// One T-transform: mixes coordinates k_min and k_max (0-based) with weight xi.
struct TransformStep {
  int k_min = 0;
  int k_max = 0;
  double xi = 0.0;
};

/// Result of walking a majorizing vector x down to z with T-transforms.
struct TransformChain {
  std::vector<TransformStep> steps;
  /// Ordered product W_1 * W_2 * ... of the orthogonal factors.
  Eigen::MatrixXd w_matrix;
  /// T_n ... T_1 x, which reproduces z.
  Eigen::VectorXd t_product_applied;
};

/// True iff x majorizes z (both nonincreasing, equal totals within 1e-9).
bool majorizes(const Eigen::VectorXd& x, const Eigen::VectorXd& z);

/// First tau entries equal sum(z)/tau, the remaining entries zero.
Eigen::VectorXd uniform_majorant(const Eigen::VectorXd& z, int tau);

/// The 2x2-block doubly stochastic matrix of a step, size K.
Eigen::MatrixXd t_matrix(const TransformStep& step, int size);
/// Its orthogonal companion: sqrt(T) on and above the diagonal, -sqrt(T) below.
Eigen::MatrixXd w_factor(const TransformStep& step, int size);

/// Builds the chain taking x to z. Requires majorizes(x, z).
///
/// Each step picks k_min as the smallest index with z < x and k_max as the
/// largest index with z > x (tolerance 1e-12), sets
/// xi = min(x[k_min] - z[k_min], z[k_max] - x[k_max]) / (x[k_min] - x[k_max]),
/// and updates the working vector x <- T x. Stops once |x - z|_inf <= 1e-11.
TransformChain t_transform_chain(const Eigen::VectorXd& x, const Eigen::VectorXd& z);

}  // namespace pilotforge
