#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pilotforge/baselines.hpp"
#include "pilotforge/model.hpp"

namespace pilotforge {

/// gamma / (1 + gamma), the share of pilot dimensions a target consumes.
double effective_bandwidth(double gamma);

struct CapacityBound {
  double bound = 0.0;   // sqrt(tau * sum (1 + gamma) / gamma)
  int total_users = 0;
  bool admissible = false;
};

/// Upper bound on the number of simultaneously served users.
CapacityBound user_capacity_bound(std::span<const double> gammas, int tau);
CapacityBound user_capacity_bound(const SinrTargets& targets, int tau);

struct RegionCheck {
  Scheme scheme = Scheme::kGwbe;
  int cell = 1;  // 1-based
  bool satisfied = false;
  double lhs = 0.0;    // per-cell effective-bandwidth sum
  double bound = 0.0;  // scheme-specific right-hand side
  std::vector<UserIndex> cap_violations;
};

/// Per-cell bound of a scheme for one sorted target row.
double region_bound(Scheme scheme, double max_effective_bandwidth, int tau, int num_cells,
                    double kappa);

/// Checks every cell of `targets` against the scheme's per-cell region.
/// `meta` (for kappa) is required for WBE.
std::vector<RegionCheck> region_check(const SinrTargets& targets, int tau, Scheme scheme,
                                      const BaselineMeta* meta = nullptr);

/// Maps a scalar gamma to a (not necessarily sorted) target row.
struct TargetFamily {
  std::string name;
  std::function<Eigen::VectorXd(double)> row;
};

/// Three users at gamma, the remaining K - 3 at gamma / 3.
TargetFamily fig3_family(int users_per_cell);
/// [gamma, gamma, gamma, omega gamma, omega gamma].
TargetFamily fig4_family(double omega);
/// [gamma, gamma, gamma/3, gamma/3, gamma/3].
TargetFamily fig5_family();

struct MaxSinrResult {
  double scale = 0.0;      // solved family parameter gamma
  double gamma_max = 0.0;  // largest entry of the row at `scale`
  double lhs = 0.0;
  double bound = 0.0;
  bool cap_limited = false;  // stopped by the search interval, not the region
};

/// Largest family parameter whose row passes region_check (bisection,
/// absolute tolerance 1e-6 or better). GWBE searches [0, 1/(L-1)];
/// other schemes and L = 1 search [0, 1e3].
MaxSinrResult max_sinr_solve(const TargetFamily& family, Scheme scheme, int tau,
                             int num_cells, int users_per_cell,
                             const BaselineMeta* meta = nullptr);

struct BoundaryPoint {
  double gamma_a = 0.0;
  double gamma_b = 0.0;
  double gamma_c = 0.0;  // NaN where no nonnegative solution exists
};

/// For each (gamma_a, gamma_b) on a grid over [0, max_gamma]^2, solves the
/// region boundary equality for a third target gamma_c with the remaining
/// targets held at `fixed_targets`.
std::vector<BoundaryPoint> boundary_surface(Scheme scheme, int tau, int num_cells,
                                            std::span<const double> fixed_targets,
                                            int grid, double max_gamma, double kappa = 0.0);

/// Solves the boundary for a single (gamma_a, gamma_b) point.
double boundary_gamma_c(Scheme scheme, int tau, int num_cells, double gamma_a, double gamma_b,
                        std::span<const double> fixed_targets, double kappa = 0.0);

/// Hit counts from uniform sampling of the free-target box.
struct RegionSampleCounts {
  std::int64_t samples = 0;
  std::int64_t gwbe = 0;
  std::int64_t wbe = 0;
  std::int64_t fos = 0;
  std::int64_t wbe_outside_gwbe = 0;
  std::int64_t fos_outside_gwbe = 0;

  friend bool operator==(const RegionSampleCounts&, const RegionSampleCounts&) = default;
};

struct RegionSamplingSetup {
  int num_cells = 2;
  int users_per_cell = 4;
  int tau = 3;
  std::vector<double> fixed_tail;  // targets of the last |fixed_tail| users
  std::int64_t samples = 1'000'000;
  std::uint64_t seed = 1;

  int free_dims() const { return users_per_cell - static_cast<int>(fixed_tail.size()); }
  /// Side of the sampling box: 1/(L-1), or 1 when L = 1.
  double box_side() const { return num_cells >= 2 ? 1.0 / (num_cells - 1) : 1.0; }
};

/// Samples are drawn in fixed blocks; block b uses an RNG stream derived from
/// (seed, b), so counts do not depend on the thread count.
inline constexpr std::int64_t kRegionSampleBlock = 4096;

/// OpenMP kernel: evaluates the three per-cell bounds inline in the z-domain.
RegionSampleCounts sample_regions(const RegionSamplingSetup& setup);
/// Serial reference: builds SinrTargets per sample and calls region_check.
RegionSampleCounts sample_regions_serial(const RegionSamplingSetup& setup);

struct VolumeEstimate {
  double volume = 0.0;
  double stderr_ = 0.0;
  std::int64_t samples = 0;
};

/// Monte Carlo volume of the scheme's admissible set inside the sampling box.
VolumeEstimate region_volume(Scheme scheme, const RegionSamplingSetup& setup);
VolumeEstimate volume_from_counts(const RegionSampleCounts& counts, Scheme scheme,
                                  const RegionSamplingSetup& setup);

struct WelchCheck {
  double lhs = 0.0;  // tr(Gram^2)
  double rhs = 0.0;  // K_tot^2 / tau
  bool holds = false;
};

/// Welch trace bound; throws ArgumentError unless columns have unit norm.
WelchCheck welch_trace_bound(const Eigen::MatrixXd& sequences);
WelchCheck welch_trace_bound(const PilotBook& pilots);

}  // namespace pilotforge
