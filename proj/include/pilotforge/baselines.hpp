#pragma once

#include <utility>
#include <vector>

#include "pilotforge/model.hpp"

namespace pilotforge {

/// Structural facts about a baseline pilot book used by the analysis formulas.
struct BaselineMeta {
  Scheme scheme = Scheme::kWbe;
  /// WBE: sqrt((K - tau) / ((K - 1) tau)). FOS: 1 (within reuse groups).
  double nominal_rho = 0.0;
  /// WBE only: (K - 1) tau / (K - tau).
  double kappa = 0.0;
  /// Flat 0-based user indices sharing one pilot sequence.
  std::vector<std::vector<int>> reuse_groups;
  /// WBE: largest | |rho| - nominal_rho | over distinct pilots of one cell.
  double max_rho_deviation = 0.0;
};

double wbe_nominal_rho(int users_per_cell, int tau);
double wbe_kappa(int users_per_cell, int tau);

/// Equal-weight tight frame per cell, replicated across all cells.
std::pair<PilotBook, BaselineMeta> wbe_pilots(int users_per_cell, int tau, int num_cells);

/// User k of every cell gets the standard basis vector e_{k mod tau}.
std::pair<PilotBook, BaselineMeta> fos_pilots(int users_per_cell, int tau, int num_cells);

}  // namespace pilotforge
