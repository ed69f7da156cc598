#pragma once

#include <Eigen/Dense>

#include "pilotforge/model.hpp"

namespace fixtures {

inline pilotforge::NetworkConfig table1_config() {
  return pilotforge::NetworkConfig::uniform(2, 4, 3);
}

inline Eigen::MatrixXd table1_gamma() {
  Eigen::MatrixXd g(2, 4);
  g << 0.91, 0.74, 0.64, 0.23, 0.94, 0.82, 0.45, 0.20;
  return g;
}

inline Eigen::MatrixXd table1_gamma_hat() {
  Eigen::MatrixXd g(2, 4);
  g << 0.92, 0.75, 0.65, 0.24, 0.95, 0.85, 0.50, 0.29;
  return g;
}

inline pilotforge::SinrTargets table1_targets() {
  return pilotforge::SinrTargets(table1_gamma()).with_gamma_hat(table1_gamma_hat());
}

// Reference GWBE pilots, 4 decimals.
inline Eigen::MatrixXd table1_gwbe_s1() {
  Eigen::MatrixXd s(3, 4);
  s << 1, -0.0845, -0.1075, 0.2574,
       0, 0.9964, -0.2202, 0.5274,
       0, 0, 0.9695, 0.8097;
  return s;
}

inline Eigen::MatrixXd table1_gwbe_s2() {
  Eigen::MatrixXd s(3, 4);
  s << 1, -0.0500, -0.1182, 0.1867,
       0, 0.9988, -0.2186, 0.3453,
       0, 0, 0.9686, 0.9197;
  return s;
}

// Largest entrywise gap after flipping each column of `a` to best match `b`.
inline double aligned_gap(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  double worst = 0.0;
  for (Eigen::Index c = 0; c < a.cols(); ++c) {
    const double plus = (a.col(c) - b.col(c)).cwiseAbs().maxCoeff();
    const double minus = (a.col(c) + b.col(c)).cwiseAbs().maxCoeff();
    worst = std::max(worst, std::min(plus, minus));
  }
  return worst;
}

}  // namespace fixtures
