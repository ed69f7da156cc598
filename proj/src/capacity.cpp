#include "pilotforge/capacity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "pilotforge/format.hpp"
#include "pilotforge/parallel.hpp"

namespace pilotforge {
namespace {

constexpr double kBoundSlack = 1e-12;

Eigen::VectorXd sorted_desc(Eigen::VectorXd row) {
  std::sort(row.data(), row.data() + row.size(), std::greater<>());
  return row;
}

SinrTargets replicated(const Eigen::VectorXd& row, int num_cells) {
  Eigen::MatrixXd gamma(num_cells, row.size());
  for (int l = 0; l < num_cells; ++l) gamma.row(l) = row.transpose();
  return SinrTargets(gamma);
}

double kappa_of(const BaselineMeta* meta, Scheme scheme) {
  if (scheme != Scheme::kWbe) return 0.0;
  if (meta == nullptr) throw ArgumentError("WBE region check needs BaselineMeta (kappa)");
  return meta->kappa;
}

}  // namespace

double effective_bandwidth(double gamma) {
  if (gamma < 0.0 || std::isnan(gamma)) {
    throw ArgumentError("effective bandwidth needs gamma >= 0, got " + format_number(gamma, 6));
  }
  if (std::isinf(gamma)) return 1.0;
  return gamma / (1.0 + gamma);
}

CapacityBound user_capacity_bound(std::span<const double> gammas, int tau) {
  if (tau < 1) throw ArgumentError("tau must be >= 1");
  if (gammas.empty()) throw ArgumentError("no users");
  double sum = 0.0;
  for (double g : gammas) {
    if (!(g > 0.0)) {
      throw ArgumentError("user capacity bound is unbounded for a zero SINR target");
    }
    sum += (1.0 + g) / g;
  }
  CapacityBound out;
  out.bound = std::sqrt(tau * sum);
  out.total_users = static_cast<int>(gammas.size());
  out.admissible = out.total_users <= out.bound + kBoundSlack;
  return out;
}

CapacityBound user_capacity_bound(const SinrTargets& targets, int tau) {
  const Eigen::MatrixXd& g = targets.gamma();
  return user_capacity_bound(std::span<const double>(g.data(), static_cast<std::size_t>(g.size())),
                             tau);
}

double region_bound(Scheme scheme, double max_effective_bandwidth, int tau, int num_cells,
                    double kappa) {
  const double region = static_cast<double>(tau) / num_cells;
  switch (scheme) {
    case Scheme::kGwbe:
      return region;
    case Scheme::kWbe:
      return std::min(region, kappa / num_cells + (1.0 - kappa) * max_effective_bandwidth);
    case Scheme::kFos:
      return std::min(region, 1.0 / num_cells);
  }
  return region;
}

std::vector<RegionCheck> region_check(const SinrTargets& targets, int tau, Scheme scheme,
                                      const BaselineMeta* meta) {
  if (tau < 1) throw ArgumentError("tau must be >= 1");
  const double kappa = kappa_of(meta, scheme);
  const int cells = targets.num_cells();
  const double cap = cells >= 2 ? 1.0 / (cells - 1) : std::numeric_limits<double>::infinity();
  std::vector<RegionCheck> out;
  out.reserve(cells);
  for (int l = 0; l < cells; ++l) {
    RegionCheck check;
    check.scheme = scheme;
    check.cell = l + 1;
    double z_max = 0.0;
    for (int k = 0; k < targets.users_per_cell(); ++k) {
      const double g = targets.gamma()(l, k);
      const double z = effective_bandwidth(g);
      check.lhs += z;
      z_max = std::max(z_max, z);
      if (scheme == Scheme::kGwbe && g > cap + kBoundSlack) {
        check.cap_violations.push_back({l + 1, targets.permutation()[l][k] + 1});
      }
    }
    check.bound = region_bound(scheme, z_max, tau, cells, kappa);
    check.satisfied = check.lhs <= check.bound + kBoundSlack && check.cap_violations.empty();
    out.push_back(std::move(check));
  }
  return out;
}

TargetFamily fig3_family(int users_per_cell) {
  if (users_per_cell < 3) throw ArgumentError("fig3 family needs K >= 3");
  return {"fig3", [users_per_cell](double g) {
            Eigen::VectorXd row = Eigen::VectorXd::Constant(users_per_cell, g / 3.0);
            row.head(3).setConstant(g);
            return row;
          }};
}

TargetFamily fig4_family(double omega) {
  if (!(omega > 0.0)) throw ArgumentError("omega must be > 0");
  return {"fig4", [omega](double g) {
            Eigen::VectorXd row(5);
            row << g, g, g, omega * g, omega * g;
            return row;
          }};
}

TargetFamily fig5_family() {
  return {"fig5", [](double g) {
            Eigen::VectorXd row(5);
            row << g, g, g / 3.0, g / 3.0, g / 3.0;
            return row;
          }};
}

MaxSinrResult max_sinr_solve(const TargetFamily& family, Scheme scheme, int tau,
                             int num_cells, int users_per_cell, const BaselineMeta* meta) {
  if (num_cells < 1) throw ArgumentError("L must be >= 1");
  (void)kappa_of(meta, scheme);
  auto evaluate = [&](double g, double& lhs, double& bound) {
    const Eigen::VectorXd row = sorted_desc(family.row(g));
    if (row.size() != users_per_cell) {
      throw ArgumentError("family '" + family.name + "' produced " + std::to_string(row.size()) +
                          " users, expected K = " + std::to_string(users_per_cell));
    }
    const auto checks = region_check(replicated(row, num_cells), tau, scheme, meta);
    lhs = checks.front().lhs;
    bound = checks.front().bound;
    return std::all_of(checks.begin(), checks.end(),
                       [](const RegionCheck& c) { return c.satisfied; });
  };

  MaxSinrResult result;
  double lhs = 0.0;
  double bound = 0.0;
  constexpr double kTiny = 1e-12;
  if (!evaluate(kTiny, lhs, bound)) {
    throw FeasibilityError("family '" + family.name + "' is infeasible for " +
                           std::string(to_string(scheme)) + " even as gamma -> 0");
  }
  double lo = kTiny;
  double hi = (scheme == Scheme::kGwbe && num_cells >= 2) ? 1.0 / (num_cells - 1) : 1e3;
  if (evaluate(hi, lhs, bound)) {
    lo = hi;
    result.cap_limited = true;
  } else {
    while (hi - lo > 1e-12) {
      const double mid = 0.5 * (lo + hi);
      double l2 = 0.0;
      double b2 = 0.0;
      if (evaluate(mid, l2, b2)) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
  }
  evaluate(lo, lhs, bound);
  result.scale = lo;
  result.gamma_max = family.row(lo).maxCoeff();
  result.lhs = lhs;
  result.bound = bound;
  return result;
}

double boundary_gamma_c(Scheme scheme, int tau, int num_cells, double gamma_a, double gamma_b,
                        std::span<const double> fixed_targets, double kappa) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const double region = static_cast<double>(tau) / num_cells;
  double known = effective_bandwidth(gamma_a) + effective_bandwidth(gamma_b);
  double known_max = std::max(effective_bandwidth(gamma_a), effective_bandwidth(gamma_b));
  for (double g : fixed_targets) {
    const double z = effective_bandwidth(g);
    known += z;
    known_max = std::max(known_max, z);
  }

  double z_c = nan;
  switch (scheme) {
    case Scheme::kGwbe:
      z_c = region - known;
      break;
    case Scheme::kFos:
      z_c = std::min(region, 1.0 / num_cells) - known;
      break;
    case Scheme::kWbe: {
      if (!(kappa > 0.0)) throw ArgumentError("WBE boundary needs kappa > 0");
      // gamma_c not the largest target: bound fixed by the known maximum.
      const double below = std::min(region, kappa / num_cells + (1.0 - kappa) * known_max) - known;
      if (below <= known_max) {
        z_c = below;
      } else {
        // gamma_c is the largest: known + z = min(tau/L, kappa/L + (1 - kappa) z).
        z_c = std::min(region - known, 1.0 / num_cells - known / kappa);
      }
      break;
    }
  }
  if (std::isnan(z_c) || z_c < 0.0) return nan;
  if (z_c >= 1.0) return std::numeric_limits<double>::infinity();
  return z_c / (1.0 - z_c);
}

std::vector<BoundaryPoint> boundary_surface(Scheme scheme, int tau, int num_cells,
                                            std::span<const double> fixed_targets, int grid,
                                            double max_gamma, double kappa) {
  if (grid < 2) throw ArgumentError("boundary grid needs at least 2 points per axis");
  if (!(max_gamma > 0.0)) throw ArgumentError("boundary range must be > 0");
  std::vector<BoundaryPoint> out;
  out.reserve(static_cast<std::size_t>(grid) * grid);
  for (int i = 0; i < grid; ++i) {
    const double a = max_gamma * i / (grid - 1);
    for (int j = 0; j < grid; ++j) {
      const double b = max_gamma * j / (grid - 1);
      out.push_back({a, b, boundary_gamma_c(scheme, tau, num_cells, a, b, fixed_targets, kappa)});
    }
  }
  return out;
}

namespace {

void check_setup(const RegionSamplingSetup& setup) {
  if (setup.num_cells < 1 || setup.tau < 1) throw ArgumentError("L and tau must be >= 1");
  if (setup.free_dims() < 0) throw ArgumentError("fixed tail longer than K");
  if (setup.tau >= setup.users_per_cell) {
    throw ShapeError("region sampling compares against WBE, which needs tau < K");
  }
  if (setup.samples < 1) throw ArgumentError("samples must be >= 1");
  for (double g : setup.fixed_tail) {
    if (!(g > 0.0)) throw ArgumentError("fixed targets must be > 0");
  }
}

// Fills `row` (length K) with one sample: free coordinates uniform on
// (0, side], followed by the fixed tail.
template <typename Rng>
void draw_row(Rng& rng, const RegionSamplingSetup& setup, double side, double* row) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int free = setup.free_dims();
  for (int d = 0; d < free; ++d) row[d] = side * (1.0 - unit(rng));
  for (std::size_t t = 0; t < setup.fixed_tail.size(); ++t) row[free + t] = setup.fixed_tail[t];
}

std::int64_t block_count(const RegionSamplingSetup& setup) {
  return (setup.samples + kRegionSampleBlock - 1) / kRegionSampleBlock;
}

std::int64_t block_size(const RegionSamplingSetup& setup, std::int64_t block) {
  return std::min<std::int64_t>(kRegionSampleBlock, setup.samples - block * kRegionSampleBlock);
}

}  // namespace

RegionSampleCounts sample_regions(const RegionSamplingSetup& setup) {
  check_setup(setup);
  const int users = setup.users_per_cell;
  const int cells = setup.num_cells;
  const double side = setup.box_side();
  const double kappa = wbe_kappa(users, setup.tau);
  const double gamma_cap = cells >= 2 ? 1.0 / (cells - 1) : std::numeric_limits<double>::infinity();
  const std::int64_t blocks = block_count(setup);

  std::int64_t gwbe = 0, wbe = 0, fos = 0, wbe_out = 0, fos_out = 0;
#pragma omp parallel for schedule(static) reduction(+ : gwbe, wbe, fos, wbe_out, fos_out)
  for (std::int64_t b = 0; b < blocks; ++b) {
    auto rng = stream_rng(setup.seed, static_cast<std::uint64_t>(b));
    std::vector<double> row(users);
    const std::int64_t n = block_size(setup, b);
    for (std::int64_t s = 0; s < n; ++s) {
      draw_row(rng, setup, side, row.data());
      double lhs = 0.0;
      double z_max = 0.0;
      double g_max = 0.0;
      for (int k = 0; k < users; ++k) {
        const double z = row[k] / (1.0 + row[k]);
        lhs += z;
        z_max = std::max(z_max, z);
        g_max = std::max(g_max, row[k]);
      }
      const bool in_gwbe = lhs <= region_bound(Scheme::kGwbe, z_max, setup.tau, cells, kappa) +
                                      kBoundSlack &&
                           g_max <= gamma_cap + kBoundSlack;
      const bool in_wbe =
          lhs <= region_bound(Scheme::kWbe, z_max, setup.tau, cells, kappa) + kBoundSlack;
      const bool in_fos =
          lhs <= region_bound(Scheme::kFos, z_max, setup.tau, cells, kappa) + kBoundSlack;
      gwbe += in_gwbe;
      wbe += in_wbe;
      fos += in_fos;
      wbe_out += in_wbe && !in_gwbe;
      fos_out += in_fos && !in_gwbe;
    }
  }
  return {setup.samples, gwbe, wbe, fos, wbe_out, fos_out};
}

RegionSampleCounts sample_regions_serial(const RegionSamplingSetup& setup) {
  check_setup(setup);
  const int users = setup.users_per_cell;
  const double side = setup.box_side();
  BaselineMeta meta;
  meta.kappa = wbe_kappa(users, setup.tau);

  RegionSampleCounts counts;
  counts.samples = setup.samples;
  Eigen::VectorXd row(users);
  for (std::int64_t b = 0; b < block_count(setup); ++b) {
    auto rng = stream_rng(setup.seed, static_cast<std::uint64_t>(b));
    const std::int64_t n = block_size(setup, b);
    for (std::int64_t s = 0; s < n; ++s) {
      draw_row(rng, setup, side, row.data());
      const SinrTargets targets = replicated(row, setup.num_cells);
      auto passes = [&](Scheme scheme) {
        const auto checks = region_check(targets, setup.tau, scheme, &meta);
        return std::all_of(checks.begin(), checks.end(),
                           [](const RegionCheck& c) { return c.satisfied; });
      };
      const bool in_gwbe = passes(Scheme::kGwbe);
      const bool in_wbe = passes(Scheme::kWbe);
      const bool in_fos = passes(Scheme::kFos);
      counts.gwbe += in_gwbe;
      counts.wbe += in_wbe;
      counts.fos += in_fos;
      counts.wbe_outside_gwbe += in_wbe && !in_gwbe;
      counts.fos_outside_gwbe += in_fos && !in_gwbe;
    }
  }
  return counts;
}

VolumeEstimate volume_from_counts(const RegionSampleCounts& counts, Scheme scheme,
                                  const RegionSamplingSetup& setup) {
  const std::int64_t hits = scheme == Scheme::kGwbe  ? counts.gwbe
                            : scheme == Scheme::kWbe ? counts.wbe
                                                     : counts.fos;
  const double box = std::pow(setup.box_side(), setup.free_dims());
  const double p = static_cast<double>(hits) / static_cast<double>(counts.samples);
  VolumeEstimate out;
  out.samples = counts.samples;
  out.volume = p * box;
  out.stderr_ = std::sqrt(p * (1.0 - p) / static_cast<double>(counts.samples)) * box;
  return out;
}

VolumeEstimate region_volume(Scheme scheme, const RegionSamplingSetup& setup) {
  if (setup.free_dims() == 0) {
    // Degenerate box: the single fixed point is either admissible or not.
    RegionSamplingSetup one = setup;
    one.samples = 1;
    return volume_from_counts(sample_regions(one), scheme, one);
  }
  if (setup.samples < 100'000) {
    throw ArgumentError("region volume needs at least 1e5 samples");
  }
  return volume_from_counts(sample_regions(setup), scheme, setup);
}

WelchCheck welch_trace_bound(const Eigen::MatrixXd& sequences) {
  if (sequences.cols() < 1 || sequences.rows() < 1) throw ArgumentError("empty pilot matrix");
  for (Eigen::Index c = 0; c < sequences.cols(); ++c) {
    if (std::abs(sequences.col(c).norm() - 1.0) > 1e-9) {
      throw ArgumentError("Welch bound needs unit-norm columns (column " +
                          std::to_string(c + 1) + ")");
    }
  }
  const Eigen::MatrixXd gram = sequences.transpose() * sequences;
  WelchCheck out;
  out.lhs = gram.squaredNorm();
  const double n = static_cast<double>(sequences.cols());
  out.rhs = n * n / static_cast<double>(sequences.rows());
  out.holds = out.lhs >= out.rhs - 1e-9;
  return out;
}

WelchCheck welch_trace_bound(const PilotBook& pilots) {
  return welch_trace_bound(pilots.sequences());
}

}  // namespace pilotforge
