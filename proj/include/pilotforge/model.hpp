#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "pilotforge/error.hpp"

namespace pilotforge {

enum class Scheme { kGwbe, kWbe, kFos };

std::string_view to_string(Scheme scheme);
Scheme parse_scheme(std::string_view name);

/// 1-based (cell, user) pair as used in all reports.
struct UserIndex {
  int cell = 1;
  int user = 1;

  friend bool operator==(const UserIndex&, const UserIndex&) = default;
};

/// Network dimensions, noise powers and the two large-scale tensors.
///
/// `xi2(i, j, l)` is the uplink product p_ij * beta_ijl seen by BS l from user
/// j of cell i; `beta(i, j, l)` is the bare large-scale gain used by the
/// downlink. Both are stored L x K x L, all indices 0-based.
class NetworkConfig {
 public:
  /// Builds a config with same-cell entries 1 and every cross-cell entry equal
  /// to the given scalars.
  static NetworkConfig uniform(int num_cells, int users_per_cell, int pilot_length,
                               double sigma_z2 = 1.0, double sigma_w2 = 1.0,
                               double xi2_cross = 0.9, double beta_cross = 0.9);

  NetworkConfig(int num_cells, int users_per_cell, int pilot_length, double sigma_z2,
                double sigma_w2, std::vector<double> xi2, std::vector<double> beta);

  int num_cells() const { return num_cells_; }
  int users_per_cell() const { return users_per_cell_; }
  int pilot_length() const { return pilot_length_; }
  int total_users() const { return num_cells_ * users_per_cell_; }
  double sigma_z2() const { return sigma_z2_; }
  double sigma_w2() const { return sigma_w2_; }

  double xi2(int cell, int user, int bs) const { return xi2_[offset(cell, user, bs)]; }
  double beta(int cell, int user, int bs) const { return beta_[offset(cell, user, bs)]; }

  const std::vector<double>& xi2_tensor() const { return xi2_; }
  const std::vector<double>& beta_tensor() const { return beta_; }

  /// 0-based column of (cell, user) in the cell-major flattening.
  int column(int cell, int user) const { return cell * users_per_cell_ + user; }

  NetworkConfig with_noise(double sigma_z2, double sigma_w2) const;

 private:
  std::size_t offset(int cell, int user, int bs) const {
    return (static_cast<std::size_t>(cell) * users_per_cell_ + user) * num_cells_ + bs;
  }

  int num_cells_;
  int users_per_cell_;
  int pilot_length_;
  double sigma_z2_;
  double sigma_w2_;
  std::vector<double> xi2_;
  std::vector<double> beta_;
};

/// Cell-major 1-based flat index: (l - 1) * K + k.
int flat_index(UserIndex u, const NetworkConfig& config);
UserIndex unflatten(int flat, const NetworkConfig& config);

/// Per-cell SINR requirements.
///
/// Rows are sorted nonincreasing at construction (stable), and the input order
/// is kept in `permutation()` so reports can map sorted slot k back to the
/// caller's user index.
class SinrTargets {
 public:
  explicit SinrTargets(const Eigen::MatrixXd& gamma);

  /// `gamma_hat` is given in the caller's (unsorted) order and permuted the
  /// same way as gamma. Throws FeasibilityError/ArgumentError on invariant
  /// violations.
  SinrTargets with_gamma_hat(const Eigen::MatrixXd& gamma_hat_input_order) const;
  /// Same, but gamma_hat is already in sorted order.
  SinrTargets with_sorted_gamma_hat(const Eigen::MatrixXd& gamma_hat) const;

  int num_cells() const { return static_cast<int>(gamma_.rows()); }
  int users_per_cell() const { return static_cast<int>(gamma_.cols()); }

  /// Sorted (nonincreasing per row).
  const Eigen::MatrixXd& gamma() const { return gamma_; }
  const std::optional<Eigen::MatrixXd>& gamma_hat() const { return gamma_hat_; }
  bool has_gamma_hat() const { return gamma_hat_.has_value(); }

  /// permutation()[l][k] = input position of the user in sorted slot k.
  const std::vector<std::vector<int>>& permutation() const { return permutation_; }
  /// Original (input-order) matrix.
  Eigen::MatrixXd gamma_input_order() const;
  /// Reorders a sorted L x K matrix back to input order.
  Eigen::MatrixXd to_input_order(const Eigen::MatrixXd& sorted) const;

 private:
  Eigen::MatrixXd gamma_;
  std::optional<Eigen::MatrixXd> gamma_hat_;
  std::vector<std::vector<int>> permutation_;
};

/// tau x K_tot real pilot matrix with its cached Gram matrix.
class PilotBook {
 public:
  /// Throws ArgumentError unless every column has unit norm within 1e-9.
  explicit PilotBook(Eigen::MatrixXd sequences);

  const Eigen::MatrixXd& sequences() const { return sequences_; }
  const Eigen::MatrixXd& gram() const { return gram_; }
  int pilot_length() const { return static_cast<int>(sequences_.rows()); }
  int total_users() const { return static_cast<int>(sequences_.cols()); }

  /// rho between flat columns a and b.
  double correlation(int a, int b) const { return gram_(a, b); }

 private:
  Eigen::MatrixXd sequences_;
  Eigen::MatrixXd gram_;
};

struct PowerAllocation {
  Eigen::MatrixXd power;  // L x K, P_lk
  Eigen::MatrixXd alpha;  // L x K, alpha_lk
};

/// Checks the PowerAllocation invariants against a config.
void validate(const PowerAllocation& allocation, const NetworkConfig& config);

}  // namespace pilotforge
