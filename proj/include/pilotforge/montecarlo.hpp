#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <vector>

#include "pilotforge/model.hpp"

namespace pilotforge {

/// One block-fading draw. `h[l]` is M x K_tot: column c holds h_{c,l}, the
/// small-scale channel from user c to BS l. `noise[l]` is the tau x M uplink
/// noise at BS l.
struct ChannelRealization {
  int antennas = 0;
  std::vector<Eigen::MatrixXcd> h;
  std::vector<Eigen::MatrixXcd> noise;

  auto channel(int column, int bs) const { return h[bs].col(column); }
};

/// Draws h ~ CN(0, 1) and noise ~ CN(0, sigma_z^2) in a fixed order.
ChannelRealization draw_realization(const NetworkConfig& config, int antennas,
                                    std::mt19937_64& rng);

/// LS estimate of h_lkl in the expanded form
/// h_lkl + sum_{(i,j) != (l,k)} rho Xi_ijl h_ijl + S_lk^T z_l.
Eigen::VectorXcd ls_estimate(const ChannelRealization& realization, const PilotBook& pilots,
                             const NetworkConfig& config, UserIndex target);

/// Same estimate obtained by forming the received pilot block
/// Y_l = sum_ij Xi_ijl s_ij h_ijl^T + Z_l and projecting it onto s_lk.
Eigen::VectorXcd ls_estimate_from_received(const ChannelRealization& realization,
                                           const PilotBook& pilots, const NetworkConfig& config,
                                           UserIndex target);

/// t = estimate / sqrt(M alpha).
Eigen::VectorXcd mrt_precoder(const Eigen::VectorXcd& estimate, double alpha, int antennas);

struct MonteCarloReport {
  Eigen::MatrixXd empirical_theta;  // L x K
  Eigen::MatrixXd stderr_;          // batch-means standard error of theta
  Eigen::MatrixXcd mean_g;          // sample mean of g_lk
  Eigen::MatrixXd var_g;            // unbiased complex sample variance of g_lk
  /// K_tot x K_tot: entry (victim, source) is the mean of |g^{source}_{victim}|^2.
  Eigen::MatrixXd mean_cross_power;
  Eigen::MatrixXd mean_estimate_energy;  // mean of |h_hat_lkl|^2 / M
  int realizations = 0;
  std::uint64_t seed = 0;
  int antennas = 0;
};

/// OpenMP kernel: realizations run in parallel, each from stream_rng(seed, r),
/// and are reduced serially in index order so the result does not depend on
/// the thread count.
MonteCarloReport simulate(const NetworkConfig& config, const PilotBook& pilots,
                          const PowerAllocation& power, int antennas, int realizations,
                          std::uint64_t seed);

/// Single-threaded reference that builds the received pilot block literally.
MonteCarloReport simulate_serial(const NetworkConfig& config, const PilotBook& pilots,
                                 const PowerAllocation& power, int antennas, int realizations,
                                 std::uint64_t seed);

}  // namespace pilotforge
