#include "pilotforge/baselines.hpp"

#include <cmath>
#include <map>
#include <string>

#include "pilotforge/gwbe.hpp"

namespace pilotforge {
namespace {

Eigen::MatrixXd replicate(const Eigen::MatrixXd& cell, int num_cells) {
  Eigen::MatrixXd out(cell.rows(), cell.cols() * num_cells);
  for (int l = 0; l < num_cells; ++l) out.middleCols(l * cell.cols(), cell.cols()) = cell;
  return out;
}

// Groups flat columns whose per-cell pilot index is identical.
std::vector<std::vector<int>> groups_by_key(int users_per_cell, int num_cells,
                                            int (*key)(int, int), int tau) {
  std::map<int, std::vector<int>> by_key;
  for (int l = 0; l < num_cells; ++l) {
    for (int k = 0; k < users_per_cell; ++k) by_key[key(k, tau)].push_back(l * users_per_cell + k);
  }
  std::vector<std::vector<int>> out;
  for (auto& [_, members] : by_key) out.push_back(std::move(members));
  return out;
}

}  // namespace

double wbe_nominal_rho(int users_per_cell, int tau) {
  if (tau >= users_per_cell) throw ShapeError("WBE needs tau < K");
  return std::sqrt(static_cast<double>(users_per_cell - tau) /
                   (static_cast<double>(users_per_cell - 1) * tau));
}

double wbe_kappa(int users_per_cell, int tau) {
  if (tau >= users_per_cell) throw ShapeError("WBE needs tau < K");
  return static_cast<double>(users_per_cell - 1) * tau / (users_per_cell - tau);
}

std::pair<PilotBook, BaselineMeta> wbe_pilots(int users_per_cell, int tau, int num_cells) {
  if (tau < 1 || num_cells < 1) throw ArgumentError("tau and L must be >= 1");
  if (tau >= users_per_cell) {
    throw ShapeError("WBE pilots need tau < K (tau = " + std::to_string(tau) +
                     ", K = " + std::to_string(users_per_cell) + ")");
  }
  // Equal effective bandwidths on the region boundary give an equal-norm
  // tight frame; for K = tau + 1 that frame is the regular simplex.
  const double z = static_cast<double>(tau) / (num_cells * users_per_cell);
  const Eigen::VectorXd row = Eigen::VectorXd::Constant(users_per_cell, z / (1.0 - z));
  const CellDesign cell = design_cell(row, tau, num_cells);

  BaselineMeta meta;
  meta.scheme = Scheme::kWbe;
  meta.nominal_rho = wbe_nominal_rho(users_per_cell, tau);
  meta.kappa = wbe_kappa(users_per_cell, tau);
  meta.reuse_groups = groups_by_key(users_per_cell, num_cells, [](int k, int) { return k; }, tau);
  const Eigen::MatrixXd gram = cell.pilots.transpose() * cell.pilots;
  for (int a = 0; a < users_per_cell; ++a) {
    for (int b = a + 1; b < users_per_cell; ++b) {
      meta.max_rho_deviation =
          std::max(meta.max_rho_deviation, std::abs(std::abs(gram(a, b)) - meta.nominal_rho));
    }
  }
  return {PilotBook(replicate(cell.pilots, num_cells)), std::move(meta)};
}

std::pair<PilotBook, BaselineMeta> fos_pilots(int users_per_cell, int tau, int num_cells) {
  if (tau < 1 || num_cells < 1 || users_per_cell < 1) {
    throw ArgumentError("tau, K and L must be >= 1");
  }
  Eigen::MatrixXd cell = Eigen::MatrixXd::Zero(tau, users_per_cell);
  for (int k = 0; k < users_per_cell; ++k) cell(k % tau, k) = 1.0;

  BaselineMeta meta;
  meta.scheme = Scheme::kFos;
  meta.nominal_rho = 1.0;
  meta.reuse_groups =
      groups_by_key(users_per_cell, num_cells, [](int k, int t) { return k % t; }, tau);
  return {PilotBook(replicate(cell, num_cells)), std::move(meta)};
}

}  // namespace pilotforge
