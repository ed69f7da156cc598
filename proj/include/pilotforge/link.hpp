#pragma once

#include <Eigen/Dense>

#include <optional>

#include "pilotforge/baselines.hpp"
#include "pilotforge/model.hpp"

namespace pilotforge {

/// Per-user SINR with derived rates and met-flags, all L x K in sorted order.
struct SinrReport {
  Eigen::MatrixXd theta;
  std::optional<int> antennas;  // empty for the M -> infinity limit
  Eigen::MatrixXd rates;        // log2(1 + theta)
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> met;
  /// Users without any pilot contamination (theta reported as +inf).
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> interference_free;
};

/// alpha_lk = sum_ij rho_ijlk^2 xi2_ijl + sigma_z^2 (self term included).
Eigen::MatrixXd compute_alpha(const PilotBook& pilots, const NetworkConfig& config);

/// Downlink powers P = alpha z. GWBE uses gamma_hat; WBE and FOS use gamma.
/// WBE uses one common alpha for everyone: the mean of `alpha`.
PowerAllocation allocate_power(const Eigen::MatrixXd& alpha, const SinrTargets& targets,
                               Scheme scheme);

/// Closed-form SINR with M antennas, MRT precoding and LS estimation.
SinrReport sinr_finite(const PilotBook& pilots, const PowerAllocation& power,
                       const NetworkConfig& config, const SinrTargets& targets, int antennas);

/// M -> infinity limit; users with a nonpositive denominator get +inf.
SinrReport sinr_asymptotic(const PilotBook& pilots, const PowerAllocation& power,
                           const NetworkConfig& config, const SinrTargets& targets);

struct MinAntennaResult {
  Eigen::MatrixXd exact;       // continuous per-user requirement
  Eigen::MatrixXi per_user;    // ceil(exact), at least 1
  int network = 0;             // max over users
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> interference_free;
};

/// Smallest M with theta_M >= mu theta_inf for every user, from the generic
/// Gram-based formula.
MinAntennaResult min_antennas(const PilotBook& pilots, const PowerAllocation& power,
                              const NetworkConfig& config, double mu);

/// Scheme-specific closed forms, kept as cross-checks of min_antennas().
/// WBE uses nominal rho (1/kappa) between distinct pilots and one common alpha.
Eigen::MatrixXd min_antennas_wbe_closed_form(const PowerAllocation& power,
                                             const NetworkConfig& config,
                                             const BaselineMeta& meta, double mu);
Eigen::MatrixXd min_antennas_fos_closed_form(const PowerAllocation& power,
                                             const NetworkConfig& config,
                                             const BaselineMeta& meta, double mu);

/// Pilots, targets (with gamma_hat for GWBE), alpha and power of one scheme.
struct SchemeDesign {
  Scheme scheme = Scheme::kGwbe;
  PilotBook pilots;
  SinrTargets targets;
  std::optional<BaselineMeta> meta;  // WBE and FOS only
  PowerAllocation power;
};

/// Runs pilot design, alpha and power allocation for one scheme.
SchemeDesign design_scheme(Scheme scheme, const SinrTargets& targets,
                           const NetworkConfig& config);

}  // namespace pilotforge
