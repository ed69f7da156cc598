#include "pilotforge/majorize.hpp"

#include <cmath>
#include <string>

#include "pilotforge/error.hpp"
#include "pilotforge/format.hpp"

namespace pilotforge {
namespace {

constexpr double kCompareTol = 1e-12;
constexpr double kSumTol = 1e-9;
constexpr double kDoneTol = 1e-11;
constexpr double kPivotTol = 1e-14;

void require_nonincreasing(const Eigen::VectorXd& v, const char* name) {
  for (Eigen::Index i = 1; i < v.size(); ++i) {
    if (v[i] > v[i - 1] + kCompareTol) {
      throw ArgumentError(std::string(name) + " is not sorted nonincreasing at position " +
                          std::to_string(i + 1));
    }
  }
}

}  // namespace

bool majorizes(const Eigen::VectorXd& x, const Eigen::VectorXd& z) {
  if (x.size() != z.size()) throw ArgumentError("majorization needs vectors of equal length");
  require_nonincreasing(x, "x");
  require_nonincreasing(z, "z");
  double px = 0.0;
  double pz = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    px += x[i];
    pz += z[i];
    if (i + 1 < x.size() && px < pz - kCompareTol) return false;
  }
  return std::abs(px - pz) <= kSumTol;
}

Eigen::VectorXd uniform_majorant(const Eigen::VectorXd& z, int tau) {
  if (tau < 1) throw ArgumentError("tau must be >= 1");
  if (tau > z.size()) {
    throw ArgumentError("tau = " + std::to_string(tau) + " exceeds vector length " +
                        std::to_string(z.size()));
  }
  const double total = z.sum();
  if (!(total > 0.0)) throw ArgumentError("uniform majorant needs a positive total");
  Eigen::VectorXd x = Eigen::VectorXd::Zero(z.size());
  x.head(tau).setConstant(total / tau);
  return x;
}

Eigen::MatrixXd t_matrix(const TransformStep& step, int size) {
  Eigen::MatrixXd t = Eigen::MatrixXd::Identity(size, size);
  t(step.k_min, step.k_min) = 1.0 - step.xi;
  t(step.k_max, step.k_max) = 1.0 - step.xi;
  t(step.k_min, step.k_max) = step.xi;
  t(step.k_max, step.k_min) = step.xi;
  return t;
}

Eigen::MatrixXd w_factor(const TransformStep& step, int size) {
  const Eigen::MatrixXd t = t_matrix(step, size);
  Eigen::MatrixXd w(size, size);
  for (int m = 0; m < size; ++m) {
    for (int n = 0; n < size; ++n) {
      const double root = std::sqrt(t(m, n));
      w(m, n) = m <= n ? root : -root;
    }
  }
  return w;
}

TransformChain t_transform_chain(const Eigen::VectorXd& x, const Eigen::VectorXd& z) {
  if (!majorizes(x, z)) {
    throw PreconditionError("T-transform chain requires x to majorize z");
  }
  const int size = static_cast<int>(x.size());
  TransformChain chain;
  chain.w_matrix = Eigen::MatrixXd::Identity(size, size);
  Eigen::VectorXd work = x;

  for (int i = 0; i + 1 < size; ++i) {
    if ((work - z).cwiseAbs().maxCoeff() <= kDoneTol) break;

    int k_min = -1;
    int k_max = -1;
    for (int k = 0; k < size; ++k) {
      if (k_min < 0 && z[k] < work[k] - kCompareTol) k_min = k;
      if (z[k] > work[k] + kCompareTol) k_max = k;
    }
    if (k_min < 0 || k_max < 0) break;  // residual below comparison tolerance

    const double denom = work[k_min] - work[k_max];
    if (std::abs(denom) < kPivotTol) {
      throw InternalError("degenerate T-transform pivot: x[" + std::to_string(k_min + 1) +
                          "] = x[" + std::to_string(k_max + 1) +
                          "] = " + format_number(work[k_min]));
    }
    const double xi =
        std::min(work[k_min] - z[k_min], z[k_max] - work[k_max]) / denom;
    const TransformStep step{k_min, k_max, xi};

    // T only touches two coordinates.
    const double a = work[k_min];
    const double b = work[k_max];
    work[k_min] = (1.0 - xi) * a + xi * b;
    work[k_max] = xi * a + (1.0 - xi) * b;

    chain.w_matrix = chain.w_matrix * w_factor(step, size);
    chain.steps.push_back(step);
  }

  chain.t_product_applied = work;
  return chain;
}

}  // namespace pilotforge
