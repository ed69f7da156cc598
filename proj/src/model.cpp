#include "pilotforge/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "pilotforge/format.hpp"

namespace pilotforge {

std::string_view to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::kGwbe: return "gwbe";
    case Scheme::kWbe: return "wbe";
    case Scheme::kFos: return "fos";
  }
  return "?";
}

Scheme parse_scheme(std::string_view name) {
  if (name == "gwbe" || name == "GWBE") return Scheme::kGwbe;
  if (name == "wbe" || name == "WBE") return Scheme::kWbe;
  if (name == "fos" || name == "FOS") return Scheme::kFos;
  throw ArgumentError("unknown scheme '" + std::string(name) + "' (expected gwbe, wbe or fos)");
}

NetworkConfig NetworkConfig::uniform(int num_cells, int users_per_cell, int pilot_length,
                                     double sigma_z2, double sigma_w2, double xi2_cross,
                                     double beta_cross) {
  if (num_cells < 1 || users_per_cell < 1) {
    throw ArgumentError("cells and users_per_cell must be >= 1");
  }
  const std::size_t n = static_cast<std::size_t>(num_cells) * users_per_cell * num_cells;
  std::vector<double> xi2(n), beta(n);
  for (int i = 0; i < num_cells; ++i) {
    for (int j = 0; j < users_per_cell; ++j) {
      for (int l = 0; l < num_cells; ++l) {
        const std::size_t at = (static_cast<std::size_t>(i) * users_per_cell + j) * num_cells + l;
        xi2[at] = i == l ? 1.0 : xi2_cross;
        beta[at] = i == l ? 1.0 : beta_cross;
      }
    }
  }
  return NetworkConfig(num_cells, users_per_cell, pilot_length, sigma_z2, sigma_w2,
                       std::move(xi2), std::move(beta));
}

NetworkConfig::NetworkConfig(int num_cells, int users_per_cell, int pilot_length,
                             double sigma_z2, double sigma_w2, std::vector<double> xi2,
                             std::vector<double> beta)
    : num_cells_(num_cells),
      users_per_cell_(users_per_cell),
      pilot_length_(pilot_length),
      sigma_z2_(sigma_z2),
      sigma_w2_(sigma_w2),
      xi2_(std::move(xi2)),
      beta_(std::move(beta)) {
  if (num_cells_ < 1) throw ArgumentError("cells must be >= 1");
  if (users_per_cell_ < 1) throw ArgumentError("users_per_cell must be >= 1");
  if (pilot_length_ < 1) throw ArgumentError("pilot_length must be >= 1");
  if (!(sigma_z2_ > 0.0)) throw ArgumentError("sigma_z2 must be > 0");
  if (!(sigma_w2_ > 0.0)) throw ArgumentError("sigma_w2 must be > 0");
  const std::size_t n = static_cast<std::size_t>(num_cells_) * users_per_cell_ * num_cells_;
  if (xi2_.size() != n || beta_.size() != n) {
    throw ArgumentError("xi2/beta tensors must have L*K*L = " + std::to_string(n) + " entries");
  }
  for (int i = 0; i < num_cells_; ++i) {
    for (int j = 0; j < users_per_cell_; ++j) {
      for (int l = 0; l < num_cells_; ++l) {
        const double x = xi2_[offset(i, j, l)];
        const double b = beta_[offset(i, j, l)];
        const std::string where = "(" + std::to_string(i + 1) + "," + std::to_string(j + 1) +
                                  "," + std::to_string(l + 1) + ")";
        if (i == l && std::abs(x - 1.0) > 1e-12) {
          throw ArgumentError("uplink power control requires xi2" + where + " = 1, got " +
                              format_number(x, 6));
        }
        if (!(x > 0.0) || x > 1.0 + 1e-12) {
          throw ArgumentError("xi2" + where + " must lie in (0, 1], got " + format_number(x, 6));
        }
        if (!(b > 0.0)) {
          throw ArgumentError("beta" + where + " must be > 0, got " + format_number(b, 6));
        }
      }
    }
  }
}

NetworkConfig NetworkConfig::with_noise(double sigma_z2, double sigma_w2) const {
  return NetworkConfig(num_cells_, users_per_cell_, pilot_length_, sigma_z2, sigma_w2, xi2_,
                       beta_);
}

int flat_index(UserIndex u, const NetworkConfig& config) {
  if (u.cell < 1 || u.cell > config.num_cells() || u.user < 1 ||
      u.user > config.users_per_cell()) {
    throw ArgumentError("user index (" + std::to_string(u.cell) + "," + std::to_string(u.user) +
                        ") out of range");
  }
  return (u.cell - 1) * config.users_per_cell() + u.user;
}

UserIndex unflatten(int flat, const NetworkConfig& config) {
  if (flat < 1 || flat > config.total_users()) {
    throw ArgumentError("flat index " + std::to_string(flat) + " out of range");
  }
  const int k = config.users_per_cell();
  return {(flat - 1) / k + 1, (flat - 1) % k + 1};
}

SinrTargets::SinrTargets(const Eigen::MatrixXd& gamma) {
  if (gamma.rows() < 1 || gamma.cols() < 1) throw ArgumentError("targets matrix is empty");
  if (!gamma.allFinite()) throw ArgumentError("targets must be finite");
  if ((gamma.array() <= 0.0).any()) throw ArgumentError("every SINR target must be > 0");
  gamma_.resize(gamma.rows(), gamma.cols());
  permutation_.resize(gamma.rows());
  for (Eigen::Index l = 0; l < gamma.rows(); ++l) {
    auto& perm = permutation_[l];
    perm.resize(gamma.cols());
    std::iota(perm.begin(), perm.end(), 0);
    std::stable_sort(perm.begin(), perm.end(),
                     [&](int a, int b) { return gamma(l, a) > gamma(l, b); });
    for (Eigen::Index k = 0; k < gamma.cols(); ++k) gamma_(l, k) = gamma(l, perm[k]);
  }
}

Eigen::MatrixXd SinrTargets::gamma_input_order() const { return to_input_order(gamma_); }

Eigen::MatrixXd SinrTargets::to_input_order(const Eigen::MatrixXd& sorted) const {
  if (sorted.rows() != gamma_.rows() || sorted.cols() != gamma_.cols()) {
    throw ArgumentError("matrix shape does not match targets");
  }
  Eigen::MatrixXd out(sorted.rows(), sorted.cols());
  for (Eigen::Index l = 0; l < sorted.rows(); ++l) {
    for (Eigen::Index k = 0; k < sorted.cols(); ++k) out(l, permutation_[l][k]) = sorted(l, k);
  }
  return out;
}

SinrTargets SinrTargets::with_gamma_hat(const Eigen::MatrixXd& gamma_hat_input_order) const {
  if (gamma_hat_input_order.rows() != gamma_.rows() ||
      gamma_hat_input_order.cols() != gamma_.cols()) {
    throw ArgumentError("gamma_hat shape does not match targets");
  }
  Eigen::MatrixXd sorted(gamma_.rows(), gamma_.cols());
  for (Eigen::Index l = 0; l < gamma_.rows(); ++l) {
    for (Eigen::Index k = 0; k < gamma_.cols(); ++k) {
      sorted(l, k) = gamma_hat_input_order(l, permutation_[l][k]);
    }
  }
  return with_sorted_gamma_hat(sorted);
}

SinrTargets SinrTargets::with_sorted_gamma_hat(const Eigen::MatrixXd& gamma_hat) const {
  if (gamma_hat.rows() != gamma_.rows() || gamma_hat.cols() != gamma_.cols()) {
    throw ArgumentError("gamma_hat shape does not match targets");
  }
  const Eigen::Index cells = gamma_.rows();
  const double cap = cells >= 2 ? 1.0 / static_cast<double>(cells - 1) : 0.0;
  for (Eigen::Index l = 0; l < cells; ++l) {
    for (Eigen::Index k = 0; k < gamma_.cols(); ++k) {
      const std::string who = "U_" + std::to_string(l + 1) + std::to_string(k + 1);
      const double g = gamma_hat(l, k);
      if (!std::isfinite(g)) throw ArgumentError("gamma_hat for " + who + " is not finite");
      if (g < gamma_(l, k) - 1e-12) {
        throw FeasibilityError("gamma_hat " + format_number(g, 6) + " below target " +
                               format_number(gamma_(l, k), 6) + " for " + who);
      }
      if (k > 0 && g > gamma_hat(l, k - 1) + 1e-12) {
        throw FeasibilityError("gamma_hat row " + std::to_string(l + 1) +
                               " is not nonincreasing");
      }
      if (cells >= 2 && g > cap + 1e-12) {
        throw FeasibilityError("gamma_hat " + format_number(g, 6) + " for " + who +
                               " exceeds the per-user cap 1/(L-1) = " + format_number(cap, 6));
      }
    }
  }
  SinrTargets out = *this;
  out.gamma_hat_ = gamma_hat;
  return out;
}

PilotBook::PilotBook(Eigen::MatrixXd sequences) : sequences_(std::move(sequences)) {
  if (sequences_.cols() < 1 || sequences_.rows() < 1) throw ArgumentError("empty pilot book");
  if (!sequences_.allFinite()) throw ArgumentError("pilot entries must be finite");
  for (Eigen::Index c = 0; c < sequences_.cols(); ++c) {
    const double norm = sequences_.col(c).norm();
    if (std::abs(norm - 1.0) > 1e-9) {
      throw ArgumentError("pilot column " + std::to_string(c + 1) +
                          " does not have unit norm (" + format_number(norm, 12) + ")");
    }
  }
  gram_ = sequences_.transpose() * sequences_;
}

void validate(const PowerAllocation& allocation, const NetworkConfig& config) {
  const auto& p = allocation.power;
  const auto& a = allocation.alpha;
  if (p.rows() != config.num_cells() || p.cols() != config.users_per_cell() ||
      a.rows() != p.rows() || a.cols() != p.cols()) {
    throw ArgumentError("power allocation shape does not match the network");
  }
  for (Eigen::Index l = 0; l < p.rows(); ++l) {
    for (Eigen::Index k = 0; k < p.cols(); ++k) {
      if (a(l, k) < config.sigma_z2() + 1.0 - 1e-9) {
        throw ArgumentError("alpha below sigma_z2 + 1 for a user");
      }
      if (p(l, k) < 0.0 || p(l, k) >= a(l, k)) {
        throw ArgumentError("power must satisfy 0 <= P < alpha");
      }
    }
  }
}

}  // namespace pilotforge
