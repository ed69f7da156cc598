#include "pilotforge/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <string>

#include "pilotforge/parallel.hpp"

namespace pilotforge {
namespace {

using cd = std::complex<double>;

void check_realization(const ChannelRealization& r, const NetworkConfig& config) {
  const int cells = config.num_cells();
  bool ok = r.antennas >= 1 && static_cast<int>(r.h.size()) == cells &&
            static_cast<int>(r.noise.size()) == cells;
  for (int l = 0; ok && l < cells; ++l) {
    ok = r.h[l].rows() == r.antennas && r.h[l].cols() == config.total_users() &&
         r.noise[l].rows() == config.pilot_length() && r.noise[l].cols() == r.antennas;
  }
  if (!ok) throw ArgumentError("channel realization does not match the network dimensions");
}

void check_inputs(const NetworkConfig& config, const PilotBook& pilots,
                  const PowerAllocation& power, int antennas, int realizations) {
  if (antennas < 1) throw ArgumentError("number of antennas must be >= 1");
  if (realizations < 1) throw ArgumentError("realizations must be >= 1");
  if (pilots.total_users() != config.total_users() ||
      pilots.pilot_length() != config.pilot_length()) {
    throw ArgumentError("pilot book shape does not match the network");
  }
  validate(power, config);
}

int target_column(UserIndex target, const NetworkConfig& config) {
  if (target.cell < 1 || target.cell > config.num_cells() || target.user < 1 ||
      target.user > config.users_per_cell()) {
    throw ArgumentError("user index out of range");
  }
  return config.column(target.cell - 1, target.user - 1);
}

// Running sums for one block of realizations.
struct Accumulator {
  int count = 0;
  Eigen::VectorXcd sum_g;
  Eigen::VectorXd sum_abs2_g;
  Eigen::MatrixXd sum_cross;
  Eigen::VectorXd sum_energy;

  explicit Accumulator(int users = 0)
      : sum_g(Eigen::VectorXcd::Zero(users)),
        sum_abs2_g(Eigen::VectorXd::Zero(users)),
        sum_cross(Eigen::MatrixXd::Zero(users, users)),
        sum_energy(Eigen::VectorXd::Zero(users)) {}

  void add(const Eigen::MatrixXcd& gains, const Eigen::VectorXd& energy) {
    ++count;
    sum_g += gains.diagonal();
    sum_abs2_g += gains.diagonal().cwiseAbs2();
    sum_cross += gains.cwiseAbs2();
    sum_energy += energy;
  }

  void merge(const Accumulator& other) {
    count += other.count;
    sum_g += other.sum_g;
    sum_abs2_g += other.sum_abs2_g;
    sum_cross += other.sum_cross;
    sum_energy += other.sum_energy;
  }
};

struct Moments {
  Eigen::VectorXcd mean_g;
  Eigen::VectorXd var_g;
  Eigen::MatrixXd mean_cross;
  Eigen::VectorXd theta;
};

Moments moments(const Accumulator& acc, const NetworkConfig& config,
                const PowerAllocation& power) {
  const int total = config.total_users();
  const int users = config.users_per_cell();
  const double n = acc.count;
  Moments m;
  m.mean_g = acc.sum_g / n;
  m.mean_cross = acc.sum_cross / n;
  m.var_g.resize(total);
  m.theta.resize(total);
  for (int c = 0; c < total; ++c) {
    const double spread = acc.sum_abs2_g(c) - n * std::norm(m.mean_g(c));
    m.var_g(c) = acc.count > 1 ? std::max(0.0, spread) / (n - 1.0) : 0.0;
  }
  for (int c = 0; c < total; ++c) {
    const int l = c / users;
    const int k = c % users;
    const double signal = config.beta(l, k, l) * power.power(l, k);
    double denom = m.var_g(c) * signal + config.sigma_w2();
    for (int s = 0; s < total; ++s) {
      if (s == c) continue;
      const int cell = s / users;
      denom += m.mean_cross(c, s) * config.beta(l, k, cell) * power.power(cell, s % users);
    }
    m.theta(c) = std::norm(m.mean_g(c)) * signal / denom;
  }
  return m;
}

// Realization r belongs to batch floor(r * batches / R).
int batch_count(int realizations) { return std::min(10, realizations); }
int batch_of(int r, int realizations, int batches) {
  return static_cast<int>(static_cast<long long>(r) * batches / realizations);
}

MonteCarloReport finish(const std::vector<Accumulator>& batches, const NetworkConfig& config,
                        const PowerAllocation& power, int antennas, int realizations,
                        std::uint64_t seed) {
  const int total = config.total_users();
  const int cells = config.num_cells();
  const int users = config.users_per_cell();
  Accumulator all(total);
  for (const auto& b : batches) all.merge(b);
  const Moments m = moments(all, config, power);

  Eigen::VectorXd err = Eigen::VectorXd::Constant(total, std::numeric_limits<double>::quiet_NaN());
  const int nb = static_cast<int>(batches.size());
  if (nb >= 2) {
    Eigen::MatrixXd per_batch(total, nb);
    for (int b = 0; b < nb; ++b) per_batch.col(b) = moments(batches[b], config, power).theta;
    for (int c = 0; c < total; ++c) {
      const double mean = per_batch.row(c).mean();
      const double ss = (per_batch.row(c).array() - mean).square().sum();
      err(c) = std::sqrt(ss / (nb - 1.0) / nb);
    }
  }

  MonteCarloReport report;
  report.empirical_theta.resize(cells, users);
  report.stderr_.resize(cells, users);
  report.mean_g.resize(cells, users);
  report.var_g.resize(cells, users);
  report.mean_estimate_energy.resize(cells, users);
  for (int c = 0; c < total; ++c) {
    const int l = c / users;
    const int k = c % users;
    report.empirical_theta(l, k) = m.theta(c);
    report.stderr_(l, k) = err(c);
    report.mean_g(l, k) = m.mean_g(c);
    report.var_g(l, k) = m.var_g(c);
    report.mean_estimate_energy(l, k) = all.sum_energy(c) / all.count;
  }
  report.mean_cross_power = m.mean_cross;
  report.realizations = realizations;
  report.seed = seed;
  report.antennas = antennas;
  return report;
}

// Gram-form evaluation of one realization: every estimate at BS l is
// H_l * D_l + Z_l^T S_l, then g = H_m^H T_m for every BS m.
void evaluate_gram(const ChannelRealization& r, const NetworkConfig& config,
                   const PilotBook& pilots, const PowerAllocation& power,
                   const std::vector<Eigen::MatrixXd>& mix, Eigen::MatrixXcd& gains,
                   Eigen::VectorXd& energy) {
  const int cells = config.num_cells();
  const int users = config.users_per_cell();
  const double m_ant = r.antennas;
  for (int l = 0; l < cells; ++l) {
    const auto s_cell = pilots.sequences().middleCols(l * users, users);
    Eigen::MatrixXcd est = r.h[l] * mix[l];
    est.noalias() += r.noise[l].transpose() * s_cell;
    for (int k = 0; k < users; ++k) {
      energy(l * users + k) = est.col(k).squaredNorm() / m_ant;
      est.col(k) /= std::sqrt(m_ant * power.alpha(l, k));
    }
    gains.middleCols(l * users, users).noalias() = r.h[l].adjoint() * est;
  }
}

}  // namespace

ChannelRealization draw_realization(const NetworkConfig& config, int antennas,
                                    std::mt19937_64& rng) {
  if (antennas < 1) throw ArgumentError("number of antennas must be >= 1");
  std::normal_distribution<double> half(0.0, std::sqrt(0.5));
  const double noise_scale = std::sqrt(config.sigma_z2());
  ChannelRealization r;
  r.antennas = antennas;
  r.h.reserve(config.num_cells());
  r.noise.reserve(config.num_cells());
  for (int l = 0; l < config.num_cells(); ++l) {
    Eigen::MatrixXcd h(antennas, config.total_users());
    for (int c = 0; c < config.total_users(); ++c) {
      for (int m = 0; m < antennas; ++m) {
        const double re = half(rng);
        h(m, c) = cd(re, half(rng));
      }
    }
    r.h.push_back(std::move(h));
  }
  for (int l = 0; l < config.num_cells(); ++l) {
    Eigen::MatrixXcd z(config.pilot_length(), antennas);
    for (int t = 0; t < config.pilot_length(); ++t) {
      for (int m = 0; m < antennas; ++m) {
        const double re = half(rng);
        z(t, m) = noise_scale * cd(re, half(rng));
      }
    }
    r.noise.push_back(std::move(z));
  }
  return r;
}

Eigen::VectorXcd ls_estimate(const ChannelRealization& realization, const PilotBook& pilots,
                             const NetworkConfig& config, UserIndex target) {
  check_realization(realization, config);
  const int self = target_column(target, config);
  const int l = target.cell - 1;
  Eigen::VectorXcd est = realization.channel(self, l);
  for (int i = 0; i < config.num_cells(); ++i) {
    for (int j = 0; j < config.users_per_cell(); ++j) {
      const int c = config.column(i, j);
      if (c == self) continue;
      const double coef = pilots.correlation(c, self) * std::sqrt(config.xi2(i, j, l));
      if (coef != 0.0) est += coef * realization.channel(c, l);
    }
  }
  est += realization.noise[l].transpose() * pilots.sequences().col(self);
  return est;
}

Eigen::VectorXcd ls_estimate_from_received(const ChannelRealization& realization,
                                           const PilotBook& pilots, const NetworkConfig& config,
                                           UserIndex target) {
  check_realization(realization, config);
  const int self = target_column(target, config);
  const int l = target.cell - 1;
  const int tau = config.pilot_length();
  const int antennas = realization.antennas;
  Eigen::MatrixXcd y = realization.noise[l];
  for (int i = 0; i < config.num_cells(); ++i) {
    for (int j = 0; j < config.users_per_cell(); ++j) {
      const int c = config.column(i, j);
      const double xi = std::sqrt(config.xi2(i, j, l));
      for (int m = 0; m < antennas; ++m) {
        const cd h = realization.h[l](m, c);
        for (int t = 0; t < tau; ++t) y(t, m) += xi * pilots.sequences()(t, c) * h;
      }
    }
  }
  Eigen::VectorXcd est = Eigen::VectorXcd::Zero(antennas);
  for (int m = 0; m < antennas; ++m) {
    for (int t = 0; t < tau; ++t) est(m) += y(t, m) * pilots.sequences()(t, self);
  }
  return est;
}

Eigen::VectorXcd mrt_precoder(const Eigen::VectorXcd& estimate, double alpha, int antennas) {
  if (!(alpha > 0.0)) throw ArgumentError("alpha must be positive");
  if (antennas < 1) throw ArgumentError("number of antennas must be >= 1");
  return estimate / std::sqrt(static_cast<double>(antennas) * alpha);
}

MonteCarloReport simulate(const NetworkConfig& config, const PilotBook& pilots,
                          const PowerAllocation& power, int antennas, int realizations,
                          std::uint64_t seed) {
  check_inputs(config, pilots, power, antennas, realizations);
  const int total = config.total_users();
  const int users = config.users_per_cell();
  const int cells = config.num_cells();

  // mix[l](c, k) = rho(c, lk) * Xi_{c,l}: the Gram form of the LS projection.
  std::vector<Eigen::MatrixXd> mix(cells, Eigen::MatrixXd(total, users));
  for (int l = 0; l < cells; ++l) {
    for (int c = 0; c < total; ++c) {
      const double xi = std::sqrt(config.xi2(c / users, c % users, l));
      for (int k = 0; k < users; ++k) {
        mix[l](c, k) = pilots.correlation(c, config.column(l, k)) * xi;
      }
    }
  }

  // Fixed-size chunks that never straddle a batch; the chunk layout depends
  // only on the realization count.
  const int nb = batch_count(realizations);
  constexpr int kChunk = 32;
  std::vector<std::pair<int, int>> chunks;
  for (int b = 0, start = 0; b < nb; ++b) {
    int end = start;
    while (end < realizations && batch_of(end, realizations, nb) == b) ++end;
    for (int s = start; s < end; s += kChunk) chunks.emplace_back(s, std::min(end, s + kChunk));
    start = end;
  }

  std::vector<Accumulator> partial(chunks.size(), Accumulator(total));
#pragma omp parallel
  {
    Eigen::MatrixXcd gains(total, total);
    Eigen::VectorXd energy(total);
#pragma omp for schedule(dynamic)
    for (long long idx = 0; idx < static_cast<long long>(chunks.size()); ++idx) {
      for (int r = chunks[idx].first; r < chunks[idx].second; ++r) {
        auto rng = stream_rng(seed, static_cast<std::uint64_t>(r));
        const ChannelRealization draw = draw_realization(config, antennas, rng);
        evaluate_gram(draw, config, pilots, power, mix, gains, energy);
        partial[idx].add(gains, energy);
      }
    }
  }

  std::vector<Accumulator> batches(nb, Accumulator(total));
  for (std::size_t i = 0; i < chunks.size(); ++i) {
    batches[batch_of(chunks[i].first, realizations, nb)].merge(partial[i]);
  }
  return finish(batches, config, power, antennas, realizations, seed);
}

MonteCarloReport simulate_serial(const NetworkConfig& config, const PilotBook& pilots,
                                 const PowerAllocation& power, int antennas, int realizations,
                                 std::uint64_t seed) {
  check_inputs(config, pilots, power, antennas, realizations);
  const int total = config.total_users();
  const int users = config.users_per_cell();
  const int nb = batch_count(realizations);
  std::vector<Accumulator> batches(nb, Accumulator(total));
  Eigen::MatrixXcd gains(total, total);
  Eigen::VectorXd energy(total);
  std::vector<Eigen::VectorXcd> precoders(total);
  for (int r = 0; r < realizations; ++r) {
    auto rng = stream_rng(seed, static_cast<std::uint64_t>(r));
    const ChannelRealization draw = draw_realization(config, antennas, rng);
    for (int c = 0; c < total; ++c) {
      const UserIndex u{c / users + 1, c % users + 1};
      const Eigen::VectorXcd est = ls_estimate_from_received(draw, pilots, config, u);
      energy(c) = est.squaredNorm() / antennas;
      precoders[c] = mrt_precoder(est, power.alpha(u.cell - 1, u.user - 1), antennas);
    }
    // g^{source}_{victim} = h_{victim, bs(source)}^H t_source
    for (int victim = 0; victim < total; ++victim) {
      for (int source = 0; source < total; ++source) {
        gains(victim, source) = draw.channel(victim, source / users).dot(precoders[source]);
      }
    }
    batches[batch_of(r, realizations, nb)].add(gains, energy);
  }
  return finish(batches, config, power, antennas, realizations, seed);
}

}  // namespace pilotforge
