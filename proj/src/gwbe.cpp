#include "pilotforge/gwbe.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "pilotforge/format.hpp"
#include "pilotforge/majorize.hpp"

namespace pilotforge {
namespace {

constexpr double kTightFrameTol = 1e-8;

double effective(double gamma) { return gamma / (1.0 + gamma); }

// Column-normalized sqrt(B) V diag(z)^(-1/2); returns the residual of the
// tight-frame identity through `residual`.
Eigen::MatrixXd frame_from(const Eigen::MatrixXd& v, const Eigen::VectorXd& z, double b,
                           double& residual) {
  Eigen::MatrixXd s = std::sqrt(b) * v * z.cwiseSqrt().cwiseInverse().asDiagonal();
  for (Eigen::Index c = 0; c < s.cols(); ++c) s.col(c).normalize();
  const Eigen::MatrixXd check = s * z.asDiagonal() * s.transpose();
  residual =
      (check - b * Eigen::MatrixXd::Identity(v.rows(), v.rows())).cwiseAbs().maxCoeff();
  return s;
}

}  // namespace

Eigen::VectorXd gamma_hat(const Eigen::VectorXd& gamma_row, int tau, int num_cells) {
  if (num_cells < 1 || tau < 1) throw ArgumentError("tau and L must be >= 1");
  const Eigen::Index size = gamma_row.size();
  if (size < 1) throw ArgumentError("empty target row");
  if (tau >= size) {
    throw ShapeError("pilot length tau = " + std::to_string(tau) +
                     " must be smaller than users per cell K = " + std::to_string(size));
  }
  for (Eigen::Index k = 0; k < size; ++k) {
    if (!(gamma_row[k] > 0.0)) throw ArgumentError("SINR targets must be > 0");
    if (k > 0 && gamma_row[k] > gamma_row[k - 1] + 1e-12) {
      throw ArgumentError("target row must be nonincreasing");
    }
  }

  const double region = static_cast<double>(tau) / num_cells;
  const double z_cap = 1.0 / num_cells;
  if (num_cells >= 2) {
    const double gamma_cap = 1.0 / (num_cells - 1);
    if (gamma_row[0] > gamma_cap + 1e-12) {
      throw FeasibilityError("maximum SINR target " + format_number(gamma_row[0], 6) +
                             " > 1/(L-1) = " + format_number(gamma_cap, 6));
    }
  }

  Eigen::VectorXd z(size);
  for (Eigen::Index k = 0; k < size; ++k) z[k] = effective(gamma_row[k]);
  const double total = z.sum();
  if (total > region + 1e-12) {
    throw FeasibilityError("per-cell effective bandwidth " + format_number(total, 6) +
                           " > tau/L = " + format_number(region, 6));
  }

  double deficit = region - total;
  if (deficit <= 0.0) return gamma_row;

  std::vector<bool> capped(size, false);
  for (Eigen::Index k = 0; k < size; ++k) capped[k] = z[k] >= z_cap;
  for (int round = 0; round <= size && deficit > 1e-15; ++round) {
    int open = 0;
    for (Eigen::Index k = 0; k < size; ++k) open += capped[k] ? 0 : 1;
    if (open == 0) break;
    const double share = deficit / open;
    double excess = 0.0;
    for (Eigen::Index k = 0; k < size; ++k) {
      if (capped[k]) continue;
      z[k] += share;
      if (z[k] > z_cap) {
        excess += z[k] - z_cap;
        z[k] = z_cap;
        capped[k] = true;
      }
    }
    deficit = excess;
  }
  if (std::abs(z.sum() - region) > 1e-12) {
    throw FeasibilityError("cannot raise targets onto tau/L = " + format_number(region, 6) +
                           " without exceeding the per-user cap");
  }

  Eigen::VectorXd out(size);
  for (Eigen::Index k = 0; k < size; ++k) {
    if (z[k] >= 1.0 - 1e-12) {
      throw FeasibilityError("adjusted target for user " + std::to_string(k + 1) +
                             " would be unbounded");
    }
    out[k] = std::max(gamma_row[k], z[k] / (1.0 - z[k]));
  }
  return out;
}

CellDesign design_cell(const Eigen::VectorXd& gamma_hat_row, int tau, int num_cells) {
  const int size = static_cast<int>(gamma_hat_row.size());
  if (tau < 1 || num_cells < 1) throw ArgumentError("tau and L must be >= 1");
  if (tau >= size) {
    throw ShapeError("pilot length tau = " + std::to_string(tau) +
                     " must be smaller than users per cell K = " + std::to_string(size) +
                     " (supported scenario is K_tot > K > tau)");
  }
  CellDesign design;
  design.gamma_hat_row = gamma_hat_row;
  design.z_vector.resize(size);
  for (int k = 0; k < size; ++k) {
    if (!(gamma_hat_row[k] > 0.0) || !std::isfinite(gamma_hat_row[k])) {
      throw ArgumentError("adjusted targets must be finite and > 0");
    }
    design.z_vector[k] = effective(gamma_hat_row[k]);
  }
  const Eigen::VectorXd& z = design.z_vector;
  design.b_scale = z.sum() / tau;
  if (z.maxCoeff() > design.b_scale + 1e-12) {
    throw FeasibilityError("largest effective bandwidth " + format_number(z.maxCoeff(), 6) +
                           " exceeds B = " + format_number(design.b_scale, 6) +
                           "; the per-user cap 1/(L-1) is violated");
  }

  const Eigen::VectorXd x = uniform_majorant(z, tau);
  const TransformChain chain = t_transform_chain(x, z);
  if ((chain.t_product_applied - z).cwiseAbs().maxCoeff() > 1e-9) {
    throw InternalError("T-transform chain did not reproduce the effective bandwidths");
  }

  double residual = 0.0;
  design.pilots = frame_from(chain.w_matrix.topRows(tau), z, design.b_scale, residual);
  if (residual > kTightFrameTol) {
    double transposed_residual = 0.0;
    Eigen::MatrixXd alt = frame_from(chain.w_matrix.transpose().topRows(tau), z,
                                     design.b_scale, transposed_residual);
    if (transposed_residual > kTightFrameTol) {
      throw InternalError("tight-frame identity S Z S^T = B I failed (residual " +
                          format_number(std::min(residual, transposed_residual), 3) + ")");
    }
    design.pilots = std::move(alt);
  }
  return design;
}

std::pair<PilotBook, SinrTargets> design_network(const SinrTargets& targets,
                                                 const NetworkConfig& config) {
  const int cells = config.num_cells();
  const int users = config.users_per_cell();
  const int tau = config.pilot_length();
  if (targets.num_cells() != cells || targets.users_per_cell() != users) {
    throw ArgumentError("targets shape does not match the network configuration");
  }
  if (config.total_users() <= tau || users <= tau) {
    throw ShapeError("GWBE design needs K_tot > K > tau (K = " + std::to_string(users) +
                     ", tau = " + std::to_string(tau) + ")");
  }

  Eigen::MatrixXd hat(cells, users);
  if (targets.has_gamma_hat()) {
    hat = *targets.gamma_hat();
  } else {
    for (int l = 0; l < cells; ++l) {
      try {
        hat.row(l) = gamma_hat(targets.gamma().row(l).transpose(), tau, cells).transpose();
      } catch (const FeasibilityError& e) {
        throw FeasibilityError("cell " + std::to_string(l + 1) + ": " + e.what());
      }
    }
  }
  SinrTargets filled = targets.has_gamma_hat() ? targets : targets.with_sorted_gamma_hat(hat);

  Eigen::MatrixXd sequences(tau, config.total_users());
  for (int l = 0; l < cells; ++l) {
    try {
      const CellDesign cell = design_cell(hat.row(l).transpose(), tau, cells);
      sequences.middleCols(static_cast<Eigen::Index>(l) * users, users) = cell.pilots;
    } catch (const FeasibilityError& e) {
      throw FeasibilityError("cell " + std::to_string(l + 1) + ": " + e.what());
    }
  }
  return {PilotBook(std::move(sequences)), std::move(filled)};
}

}  // namespace pilotforge
