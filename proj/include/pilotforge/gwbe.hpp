#pragma once

#include <Eigen/Dense>

#include <utility>

#include "pilotforge/model.hpp"

namespace pilotforge {

/// Pilots for one cell together with the quantities used to build them.
struct CellDesign {
  Eigen::MatrixXd pilots;       // tau x K, unit-norm columns
  double b_scale = 0.0;         // B_l = sum(z) / tau
  Eigen::VectorXd z_vector;     // gamma_hat / (1 + gamma_hat)
  Eigen::VectorXd gamma_hat_row;
};

/// Raises a nonincreasing target row onto the per-cell region boundary
/// sum(z) = tau/L while keeping every entry at or below 1/(L-1).
///
/// The deficit is spread equally in the effective-bandwidth domain; users that
/// would exceed the cap are clipped and their excess is shared among the rest.
Eigen::VectorXd gamma_hat(const Eigen::VectorXd& gamma_row, int tau, int num_cells);

/// Builds the tight frame S_l with S_l diag(z) S_l^T = B_l I for one cell.
CellDesign design_cell(const Eigen::VectorXd& gamma_hat_row, int tau, int num_cells);

/// Designs every cell independently and stacks the result cell-major.
///
/// A caller-supplied gamma_hat on `targets` is used verbatim; otherwise
/// gamma_hat() fills it. The returned targets carry the gamma_hat in use.
std::pair<PilotBook, SinrTargets> design_network(const SinrTargets& targets,
                                                 const NetworkConfig& config);

}  // namespace pilotforge
