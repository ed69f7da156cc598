#include "pilotforge/link.hpp"

#include "pilotforge/gwbe.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace pilotforge {
namespace {

using BoolMatrix = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;

void check_dimensions(const PilotBook& pilots, const NetworkConfig& config) {
  if (pilots.total_users() != config.total_users() ||
      pilots.pilot_length() != config.pilot_length()) {
    throw ArgumentError("pilot book is " + std::to_string(pilots.pilot_length()) + " x " +
                        std::to_string(pilots.total_users()) + " but the network needs " +
                        std::to_string(config.pilot_length()) + " x " +
                        std::to_string(config.total_users()));
  }
}

void check_power(const PowerAllocation& power, const NetworkConfig& config) {
  if (power.power.rows() != config.num_cells() || power.power.cols() != config.users_per_cell() ||
      power.alpha.rows() != config.num_cells() || power.alpha.cols() != config.users_per_cell()) {
    throw ArgumentError("power allocation shape does not match the network");
  }
}

// sum over (m, n) != (l, k) of rho^2 xi2_lkm beta_lkm P_mn / alpha_mn.
double interference(const PilotBook& pilots, const PowerAllocation& power,
                    const NetworkConfig& config, int l, int k) {
  const int self = config.column(l, k);
  double sum = 0.0;
  for (int m = 0; m < config.num_cells(); ++m) {
    const double gain = config.xi2(l, k, m) * config.beta(l, k, m);
    for (int n = 0; n < config.users_per_cell(); ++n) {
      const int other = config.column(m, n);
      if (other == self) continue;
      const double rho = pilots.correlation(self, other);
      sum += rho * rho * gain * power.power(m, n) / power.alpha(m, n);
    }
  }
  return sum;
}

// P-bar_lk = sum_mn beta_lkm P_mn + sigma_w^2.
double received_power(const PowerAllocation& power, const NetworkConfig& config, int l, int k) {
  double sum = config.sigma_w2();
  for (int m = 0; m < config.num_cells(); ++m) {
    for (int n = 0; n < config.users_per_cell(); ++n) {
      sum += config.beta(l, k, m) * power.power(m, n);
    }
  }
  return sum;
}

SinrReport make_report(Eigen::MatrixXd theta, std::optional<int> antennas,
                       const SinrTargets& targets, BoolMatrix interference_free) {
  SinrReport report;
  report.rates = theta.unaryExpr([](double t) { return std::log2(1.0 + t); });
  report.met = (theta.array() >= targets.gamma().array() - 1e-12).matrix();
  report.theta = std::move(theta);
  report.antennas = antennas;
  report.interference_free = std::move(interference_free);
  return report;
}

void check_mu(double mu) {
  if (!(mu > 0.0 && mu < 1.0)) throw ArgumentError("mu must lie in (0, 1)");
}

}  // namespace

Eigen::MatrixXd compute_alpha(const PilotBook& pilots, const NetworkConfig& config) {
  check_dimensions(pilots, config);
  const int cells = config.num_cells();
  const int users = config.users_per_cell();
  Eigen::MatrixXd alpha(cells, users);
  for (int l = 0; l < cells; ++l) {
    for (int k = 0; k < users; ++k) {
      const int target = config.column(l, k);
      double sum = config.sigma_z2();
      for (int i = 0; i < cells; ++i) {
        for (int j = 0; j < users; ++j) {
          const double rho = pilots.correlation(config.column(i, j), target);
          sum += rho * rho * config.xi2(i, j, l);
        }
      }
      alpha(l, k) = sum;
    }
  }
  return alpha;
}

PowerAllocation allocate_power(const Eigen::MatrixXd& alpha, const SinrTargets& targets,
                               Scheme scheme) {
  if (alpha.rows() != targets.num_cells() || alpha.cols() != targets.users_per_cell()) {
    throw ArgumentError("alpha shape does not match targets");
  }
  Eigen::MatrixXd gamma;
  if (scheme == Scheme::kGwbe) {
    if (!targets.has_gamma_hat()) {
      throw StateError("GWBE power allocation needs gamma_hat; run the design first");
    }
    gamma = *targets.gamma_hat();
  } else {
    gamma = targets.gamma();
  }
  const Eigen::MatrixXd z = (gamma.array() / (1.0 + gamma.array())).matrix();
  PowerAllocation out;
  out.alpha = alpha;
  if (scheme == Scheme::kWbe) {
    out.power = alpha.mean() * z;
  } else {
    out.power = alpha.cwiseProduct(z);
  }
  return out;
}

SinrReport sinr_finite(const PilotBook& pilots, const PowerAllocation& power,
                       const NetworkConfig& config, const SinrTargets& targets, int antennas) {
  if (antennas < 1) throw ArgumentError("number of antennas must be >= 1");
  check_dimensions(pilots, config);
  check_power(power, config);
  const int cells = config.num_cells();
  const int users = config.users_per_cell();
  Eigen::MatrixXd theta(cells, users);
  BoolMatrix free = BoolMatrix::Constant(cells, users, false);
  for (int l = 0; l < cells; ++l) {
    for (int k = 0; k < users; ++k) {
      const double a = power.alpha(l, k);
      const double inter = interference(pilots, power, config, l, k);
      free(l, k) = inter == 0.0;
      const double denom = a * inter + a * received_power(power, config, l, k) / antennas;
      theta(l, k) = config.beta(l, k, l) * power.power(l, k) / denom;
    }
  }
  return make_report(std::move(theta), antennas, targets, std::move(free));
}

SinrReport sinr_asymptotic(const PilotBook& pilots, const PowerAllocation& power,
                           const NetworkConfig& config, const SinrTargets& targets) {
  check_dimensions(pilots, config);
  check_power(power, config);
  const int cells = config.num_cells();
  const int users = config.users_per_cell();
  Eigen::MatrixXd theta(cells, users);
  BoolMatrix free = BoolMatrix::Constant(cells, users, false);
  for (int l = 0; l < cells; ++l) {
    for (int k = 0; k < users; ++k) {
      const int self = config.column(l, k);
      const double signal = config.beta(l, k, l) * power.power(l, k);
      // Full sum including (l, k), then the self term is removed.
      double sum = 0.0;
      for (int m = 0; m < cells; ++m) {
        const double gain = config.xi2(l, k, m) * config.beta(l, k, m);
        for (int n = 0; n < users; ++n) {
          const double rho = pilots.correlation(self, config.column(m, n));
          sum += rho * rho * gain * power.power(m, n) / power.alpha(m, n);
        }
      }
      const double denom = power.alpha(l, k) * sum - signal;
      if (denom <= 1e-12 * std::max(signal, 1e-300)) {
        free(l, k) = true;
        theta(l, k) = std::numeric_limits<double>::infinity();
      } else {
        theta(l, k) = signal / denom;
      }
    }
  }
  return make_report(std::move(theta), std::nullopt, targets, std::move(free));
}

MinAntennaResult min_antennas(const PilotBook& pilots, const PowerAllocation& power,
                              const NetworkConfig& config, double mu) {
  check_mu(mu);
  check_dimensions(pilots, config);
  check_power(power, config);
  const int cells = config.num_cells();
  const int users = config.users_per_cell();
  MinAntennaResult out;
  out.exact.resize(cells, users);
  out.per_user.resize(cells, users);
  out.interference_free = BoolMatrix::Constant(cells, users, false);
  for (int l = 0; l < cells; ++l) {
    for (int k = 0; k < users; ++k) {
      const double inter = interference(pilots, power, config, l, k);
      if (inter <= 0.0) {
        out.interference_free(l, k) = true;
        out.exact(l, k) = 1.0;
        out.per_user(l, k) = 1;
        continue;
      }
      const double m = received_power(power, config, l, k) / ((1.0 - mu) / mu * inter);
      out.exact(l, k) = m;
      out.per_user(l, k) = std::max(1, static_cast<int>(std::ceil(m - 1e-9)));
    }
  }
  out.network = out.per_user.maxCoeff();
  return out;
}

namespace {

std::vector<int> group_of(const BaselineMeta& meta, int total_users) {
  std::vector<int> group(total_users, -1);
  for (std::size_t g = 0; g < meta.reuse_groups.size(); ++g) {
    for (int member : meta.reuse_groups[g]) group.at(member) = static_cast<int>(g);
  }
  return group;
}

}  // namespace

Eigen::MatrixXd min_antennas_wbe_closed_form(const PowerAllocation& power,
                                             const NetworkConfig& config,
                                             const BaselineMeta& meta, double mu) {
  check_mu(mu);
  check_power(power, config);
  if (!(meta.kappa > 0.0)) throw ArgumentError("WBE closed form needs kappa");
  const auto group = group_of(meta, config.total_users());
  const double alpha = power.alpha.mean();
  Eigen::MatrixXd out(config.num_cells(), config.users_per_cell());
  for (int l = 0; l < config.num_cells(); ++l) {
    for (int k = 0; k < config.users_per_cell(); ++k) {
      const int self = config.column(l, k);
      double shared = 0.0;  // same pilot, self included
      double others = 0.0;  // distinct pilots
      for (int m = 0; m < config.num_cells(); ++m) {
        const double gain = config.xi2(l, k, m) * config.beta(l, k, m);
        for (int n = 0; n < config.users_per_cell(); ++n) {
          const double term = gain * power.power(m, n);
          if (group[config.column(m, n)] == group[self]) {
            shared += term;
          } else {
            others += term;
          }
        }
      }
      const double kappa_bar = others / meta.kappa - config.beta(l, k, l) * power.power(l, k);
      out(l, k) = received_power(power, config, l, k) /
                  ((1.0 - mu) / (alpha * mu) * (shared + kappa_bar));
    }
  }
  return out;
}

Eigen::MatrixXd min_antennas_fos_closed_form(const PowerAllocation& power,
                                             const NetworkConfig& config,
                                             const BaselineMeta& meta, double mu) {
  check_mu(mu);
  check_power(power, config);
  const auto group = group_of(meta, config.total_users());
  Eigen::MatrixXd out(config.num_cells(), config.users_per_cell());
  for (int l = 0; l < config.num_cells(); ++l) {
    for (int k = 0; k < config.users_per_cell(); ++k) {
      const int self = config.column(l, k);
      double shared = 0.0;
      for (int i = 0; i < config.num_cells(); ++i) {
        const double gain = config.xi2(l, k, i) * config.beta(l, k, i);
        for (int j = 0; j < config.users_per_cell(); ++j) {
          if (group[config.column(i, j)] != group[self]) continue;
          shared += gain * power.power(i, j) / power.alpha(i, j);
        }
      }
      const double self_term = config.beta(l, k, l) * power.power(l, k) / power.alpha(l, k);
      out(l, k) = received_power(power, config, l, k) / ((1.0 - mu) / mu * (shared - self_term));
    }
  }
  return out;
}

SchemeDesign design_scheme(Scheme scheme, const SinrTargets& targets,
                           const NetworkConfig& config) {
  if (targets.num_cells() != config.num_cells() ||
      targets.users_per_cell() != config.users_per_cell()) {
    throw ArgumentError("targets are " + std::to_string(targets.num_cells()) + " x " +
                        std::to_string(targets.users_per_cell()) + " but the network is " +
                        std::to_string(config.num_cells()) + " x " +
                        std::to_string(config.users_per_cell()));
  }
  const int users = config.users_per_cell();
  const int tau = config.pilot_length();
  const int cells = config.num_cells();
  switch (scheme) {
    case Scheme::kGwbe: {
      auto [pilots, designed] = design_network(targets, config);
      const Eigen::MatrixXd alpha = compute_alpha(pilots, config);
      PowerAllocation power = allocate_power(alpha, designed, scheme);
      return {scheme, std::move(pilots), std::move(designed), std::nullopt, std::move(power)};
    }
    case Scheme::kWbe:
    case Scheme::kFos: {
      auto [pilots, meta] = scheme == Scheme::kWbe ? wbe_pilots(users, tau, cells)
                                                   : fos_pilots(users, tau, cells);
      const Eigen::MatrixXd alpha = compute_alpha(pilots, config);
      PowerAllocation power = allocate_power(alpha, targets, scheme);
      return {scheme, std::move(pilots), targets, std::move(meta), std::move(power)};
    }
  }
  throw InternalError("unhandled scheme");
}

}  // namespace pilotforge
