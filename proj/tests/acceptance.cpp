// Acceptance run: one line per criterion, nonzero exit if any hard check fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "random_scenarios.hpp"
#include "pilotforge/baselines.hpp"
#include "pilotforge/capacity.hpp"
#include "pilotforge/format.hpp"
#include "pilotforge/gwbe.hpp"
#include "pilotforge/link.hpp"
#include "pilotforge/majorize.hpp"
#include "pilotforge/montecarlo.hpp"

using namespace pilotforge;

namespace {

enum class Verdict { kPass, kFail, kSoft };

struct Outcome {
  Verdict verdict = Verdict::kPass;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double budget_seconds;
  std::function<Outcome()> check;
};

std::string fmt(double v, int digits = 6) { return format_number(v, digits); }

SchemeDesign reference(Scheme s) {
  return design_scheme(s, fixtures::table1_targets(), fixtures::table1_config());
}

Outcome alpha_reproduction() {
  Outcome o;
  const Eigen::MatrixXd fos = reference(Scheme::kFos).power.alpha;
  const double fos_expected[4] = {4.80, 2.90, 2.90, 4.80};
  double fos_gap = 0.0;
  for (int l = 0; l < 2; ++l)
    for (int k = 0; k < 4; ++k) fos_gap = std::max(fos_gap, std::abs(fos(l, k) - fos_expected[k]));

  const Eigen::MatrixXd wbe = reference(Scheme::kWbe).power.alpha;
  const double wbe_gap = (wbe.array() - 3.5333).abs().maxCoeff();

  Eigen::MatrixXd gwbe_expected(2, 4);
  gwbe_expected << 3.03, 3.35, 3.99, 4.25, 3.03, 3.34, 4.01, 4.33;
  const Eigen::MatrixXd gwbe = reference(Scheme::kGwbe).power.alpha;
  const double gwbe_gap = (gwbe - gwbe_expected).cwiseAbs().maxCoeff();

  const bool ok = fos_gap <= 1e-9 && wbe_gap <= 0.01 && gwbe_gap <= 0.05;
  o.verdict = ok ? Verdict::kPass : Verdict::kFail;
  o.detail = "fos gap " + fmt(fos_gap, 3) + ", wbe gap " + fmt(wbe_gap, 3) + ", gwbe gap " +
             fmt(gwbe_gap, 3);
  return o;
}

Outcome min_antenna_reproduction() {
  const auto config = fixtures::table1_config();
  const int expected[3] = {234, 278, 253};
  const Scheme schemes[3] = {Scheme::kGwbe, Scheme::kWbe, Scheme::kFos};
  bool ok = true;
  std::string detail;
  for (int i = 0; i < 3; ++i) {
    const SchemeDesign d = reference(schemes[i]);
    const MinAntennaResult m = min_antennas(d.pilots, d.power, config, 0.9);
    ok = ok && std::abs(m.network - expected[i]) <= 2;
    double closed_gap = 0.0;
    if (schemes[i] == Scheme::kWbe) {
      closed_gap = (min_antennas_wbe_closed_form(d.power, config, *d.meta, 0.9) - m.exact)
                       .cwiseAbs()
                       .maxCoeff();
    } else if (schemes[i] == Scheme::kFos) {
      closed_gap = (min_antennas_fos_closed_form(d.power, config, *d.meta, 0.9) - m.exact)
                       .cwiseAbs()
                       .maxCoeff();
    }
    ok = ok && closed_gap <= 1.0;
    detail += std::string(to_string(schemes[i])) + " " + std::to_string(m.network) + " (want " +
              std::to_string(expected[i]) + ", closed-form gap " + fmt(closed_gap, 3) + ")";
    if (i < 2) detail += "; ";
  }
  return {ok ? Verdict::kPass : Verdict::kFail, detail};
}

Outcome max_sinr_anchors() {
  const double k4 = max_sinr_solve(fig3_family(4), Scheme::kGwbe, 3, 2, 4).gamma_max;
  const double k14 = max_sinr_solve(fig3_family(14), Scheme::kGwbe, 3, 2, 14).gamma_max;
  const double l2 = max_sinr_solve(fig5_family(), Scheme::kGwbe, 3, 2, 5).gamma_max;
  const double l10 = max_sinr_solve(fig5_family(), Scheme::kGwbe, 3, 10, 5).gamma_max;
  const bool ok = std::abs(k4 - 0.76) <= 0.01 && std::abs(k14 - 0.26) <= 0.01 &&
                  std::abs(l2 - 0.78) <= 0.01 && std::abs(l10 - 0.11) <= 0.01;
  return {ok ? Verdict::kPass : Verdict::kFail,
          "K=4 " + fmt(k4, 4) + ", K=14 " + fmt(k14, 4) + ", L=2 " + fmt(l2, 4) + ", L=10 " +
              fmt(l10, 4)};
}

Outcome asymptotic_guarantee() {
  std::mt19937_64 rng(20170101);
  int violations = 0;
  double worst = std::numeric_limits<double>::infinity();
  constexpr int kScenarios = 250;
  for (int trial = 0; trial < kScenarios; ++trial) {
    const fixtures::RandomScenario s = fixtures::random_scenario(rng);
    const SchemeDesign d = design_scheme(Scheme::kGwbe, SinrTargets(s.gamma), s.config);
    const SinrReport inf = sinr_asymptotic(d.pilots, d.power, s.config, d.targets);
    const double margin = (inf.theta.array() - d.targets.gamma().array()).minCoeff();
    worst = std::min(worst, margin);
    if (margin < -1e-9) ++violations;
  }
  return {violations == 0 ? Verdict::kPass : Verdict::kFail,
          std::to_string(kScenarios) + " scenarios, " + std::to_string(violations) +
              " violations, smallest margin " + fmt(worst, 4)};
}

Outcome frame_and_chain_invariants() {
  std::mt19937_64 rng(5);
  double frame_gap = 0.0, orth_gap = 0.0, recon_gap = 0.0;
  int long_chains = 0;
  constexpr int kInstances = 10'000;
  for (int trial = 0; trial < kInstances; ++trial) {
    const int users = std::uniform_int_distribution<int>(2, 16)(rng);
    const int tau = std::uniform_int_distribution<int>(1, users - 1)(rng);
    const int cells = std::uniform_int_distribution<int>(2, 6)(rng);
    Eigen::VectorXd row = fixtures::feasible_row(rng, users, tau, cells);
    std::sort(row.data(), row.data() + users, std::greater<>());
    const Eigen::VectorXd hat = gamma_hat(row, tau, cells);
    const CellDesign cell = design_cell(hat, tau, cells);
    const Eigen::MatrixXd frame = cell.pilots * cell.z_vector.asDiagonal() * cell.pilots.transpose();
    frame_gap = std::max(
        frame_gap,
        (frame - cell.b_scale * Eigen::MatrixXd::Identity(tau, tau)).cwiseAbs().maxCoeff());

    const TransformChain chain = t_transform_chain(uniform_majorant(cell.z_vector, tau), cell.z_vector);
    if (static_cast<int>(chain.steps.size()) > users - 1) ++long_chains;
    const Eigen::MatrixXd& w = chain.w_matrix;
    orth_gap = std::max(orth_gap, (w * w.transpose() - Eigen::MatrixXd::Identity(users, users))
                                      .cwiseAbs()
                                      .maxCoeff());
    recon_gap = std::max(recon_gap, (chain.t_product_applied - cell.z_vector).cwiseAbs().maxCoeff());
  }
  // The reference cells as well.
  const auto [pilots, targets] = design_network(fixtures::table1_targets(), fixtures::table1_config());
  for (int l = 0; l < 2; ++l) {
    const Eigen::MatrixXd s = pilots.sequences().middleCols(4 * l, 4);
    const Eigen::VectorXd h = targets.gamma_hat()->row(l).transpose();
    const Eigen::VectorXd z = h.array() / (1.0 + h.array());
    frame_gap = std::max(frame_gap, (s * z.asDiagonal() * s.transpose() -
                                     z.sum() / 3 * Eigen::MatrixXd::Identity(3, 3))
                                        .cwiseAbs()
                                        .maxCoeff());
  }
  const bool ok = frame_gap <= 1e-8 && long_chains == 0 && orth_gap <= 1e-10 && recon_gap <= 1e-9;
  return {ok ? Verdict::kPass : Verdict::kFail,
          std::to_string(kInstances) + " instances; frame " + fmt(frame_gap, 3) + ", W " +
              fmt(orth_gap, 3) + ", reconstruction " + fmt(recon_gap, 3) + ", long chains " +
              std::to_string(long_chains)};
}

Outcome welch_bound() {
  std::mt19937_64 rng(6);
  std::normal_distribution<double> n(0.0, 1.0);
  int bound_failures = 0;
  for (int trial = 0; trial < 10'000; ++trial) {
    const int tau = std::uniform_int_distribution<int>(1, 6)(rng);
    const int total = std::uniform_int_distribution<int>(1, 20)(rng);
    Eigen::MatrixXd s(tau, total);
    for (int c = 0; c < total; ++c) {
      for (int i = 0; i < tau; ++i) s(i, c) = n(rng);
      s.col(c).normalize();
    }
    const WelchCheck w = welch_trace_bound(s);
    if (w.lhs < w.rhs - 1e-9) ++bound_failures;
  }

  // Equality on per-cell frames: WBE for a sweep of shapes, GWBE for the
  // reference cells and random designed cells.
  double wbe_gap = 0.0;
  for (int tau = 1; tau <= 5; ++tau) {
    for (int users = tau + 1; users <= 12; ++users) {
      const WelchCheck w = welch_trace_bound(wbe_pilots(users, tau, 1).first);
      wbe_gap = std::max(wbe_gap, std::abs(w.lhs - w.rhs));
    }
  }
  double gwbe_gap = 0.0;
  double gwbe_weighted_gap = 0.0;
  const auto gwbe_cell = [&](const CellDesign& c) {
    const WelchCheck w = welch_trace_bound(c.pilots);
    gwbe_gap = std::max(gwbe_gap, std::abs(w.lhs - w.rhs));
    // Weighted form: tr((Z^1/2 G Z^1/2)^2) against (sum z)^2 / tau.
    const Eigen::VectorXd root = c.z_vector.cwiseSqrt();
    const Eigen::MatrixXd g = root.asDiagonal() * (c.pilots.transpose() * c.pilots) * root.asDiagonal();
    const double tau = static_cast<double>(c.pilots.rows());
    gwbe_weighted_gap = std::max(
        gwbe_weighted_gap, std::abs((g * g).trace() - c.z_vector.sum() * c.z_vector.sum() / tau));
  };
  gwbe_cell(design_cell(fixtures::table1_gamma_hat().row(0).transpose(), 3, 2));
  gwbe_cell(design_cell(fixtures::table1_gamma_hat().row(1).transpose(), 3, 2));
  std::mt19937_64 cells_rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const int users = std::uniform_int_distribution<int>(3, 10)(cells_rng);
    const int tau = std::uniform_int_distribution<int>(1, users - 1)(cells_rng);
    const int cells = std::uniform_int_distribution<int>(2, 4)(cells_rng);
    Eigen::VectorXd row = fixtures::feasible_row(cells_rng, users, tau, cells);
    std::sort(row.data(), row.data() + users, std::greater<>());
    gwbe_cell(design_cell(gamma_hat(row, tau, cells), tau, cells));
  }

  const bool ok = bound_failures == 0 && wbe_gap <= 1e-8 && gwbe_gap <= 1e-8;
  return {ok ? Verdict::kPass : Verdict::kFail,
          "bound failures " + std::to_string(bound_failures) + "; equality gap wbe " +
              fmt(wbe_gap, 3) + ", gwbe " + fmt(gwbe_gap, 4) + " (z-weighted gwbe " +
              fmt(gwbe_weighted_gap, 3) + ")"};
}

Outcome monte_carlo_agreement() {
  const auto config = fixtures::table1_config();
  double worst = 0.0;
  bool gwbe_all_met = false;
  bool wbe_unmet = false;
  bool fos_unmet = false;
  for (Scheme s : {Scheme::kGwbe, Scheme::kWbe, Scheme::kFos}) {
    const SchemeDesign d = reference(s);
    for (int m : {100, 200, 300}) {
      const MonteCarloReport r = simulate(config, d.pilots, d.power, m, 1000, 20170101);
      const SinrReport a = sinr_finite(d.pilots, d.power, config, d.targets, m);
      worst = std::max(worst, ((r.empirical_theta - a.theta).array().abs() / a.theta.array()).maxCoeff());
      if (s == Scheme::kGwbe && m == 300) gwbe_all_met = a.met.all();
    }
    const SinrReport inf = sinr_asymptotic(d.pilots, d.power, config, d.targets);
    if (s == Scheme::kWbe) wbe_unmet = !inf.met.all();
    if (s == Scheme::kFos) fos_unmet = !inf.met.all();
  }
  const bool ok = worst <= 0.05 && gwbe_all_met && wbe_unmet && fos_unmet;
  return {ok ? Verdict::kPass : Verdict::kFail,
          "worst relative error " + fmt(100 * worst, 3) + "%, gwbe all met at M=300: " +
              (gwbe_all_met ? "yes" : "no") + ", wbe/fos leave users unmet: " +
              (wbe_unmet && fos_unmet ? "yes" : "no")};
}

Outcome region_containment() {
  RegionSamplingSetup setup;
  setup.num_cells = 4;
  setup.users_per_cell = 4;
  setup.tau = 3;
  setup.fixed_tail = {0.20};
  setup.samples = 1'000'000;
  setup.seed = 20170101;
  const RegionSampleCounts counts = sample_regions(setup);
  const double g = volume_from_counts(counts, Scheme::kGwbe, setup).volume;
  const double w = volume_from_counts(counts, Scheme::kWbe, setup).volume;
  const double f = volume_from_counts(counts, Scheme::kFos, setup).volume;
  const double over_wbe = 100.0 * (g / w - 1.0);
  const double over_fos = 100.0 * (g / f - 1.0);
  const bool contained = counts.wbe_outside_gwbe == 0 && counts.fos_outside_gwbe == 0;
  const bool volumes_match = std::abs(over_wbe - 19.2) <= 5.0 && std::abs(over_fos - 97.4) <= 5.0;
  Outcome o;
  o.verdict = !contained ? Verdict::kFail : (volumes_match ? Verdict::kPass : Verdict::kSoft);
  o.detail = "containment violations " + std::to_string(counts.wbe_outside_gwbe) + "/" +
             std::to_string(counts.fos_outside_gwbe) + " over " + std::to_string(counts.samples) +
             " samples; volume excess over wbe " + fmt(over_wbe, 4) + "% (want 19.2), over fos " +
             fmt(over_fos, 4) + "% (want 97.4)";
  return o;
}

Outcome capacity_anchor() {
  const std::vector<double> six(6, 1.0);
  const std::vector<double> seven(7, 1.0);
  const CapacityBound a = user_capacity_bound(six, 3);
  const CapacityBound b = user_capacity_bound(seven, 3);
  const bool ok = std::abs(a.bound - 6.0) <= 1e-12 && a.admissible && !b.admissible;
  return {ok ? Verdict::kPass : Verdict::kFail,
          "bound " + fmt(a.bound, 12) + ", K_tot=6 " + (a.admissible ? "admissible" : "rejected") +
              ", K_tot=7 " + (b.admissible ? "admissible" : "rejected")};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "alpha reproduction", 1.0, alpha_reproduction},
      {2, "minimum antennas at mu = 0.9", 1.0, min_antenna_reproduction},
      {3, "max-SINR anchors", 1.0, max_sinr_anchors},
      {4, "asymptotic SINR guarantee", 30.0, asymptotic_guarantee},
      {5, "tight-frame and majorization invariants", 30.0, frame_and_chain_invariants},
      {6, "Welch trace bound", 10.0, welch_bound},
      {7, "Monte Carlo vs closed form", 120.0, monte_carlo_agreement},
      {8, "region containment and volume", 60.0, region_containment},
      {9, "user-capacity anchor", 1.0, capacity_anchor},
  };

  int hard_failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o = {Verdict::kFail, std::string("exception: ") + e.what()};
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (seconds > c.budget_seconds && o.verdict != Verdict::kFail) {
      o.verdict = Verdict::kFail;
      o.detail += "; over time budget";
    }
    const char* tag = o.verdict == Verdict::kPass ? "PASS" : o.verdict == Verdict::kSoft ? "SOFT" : "FAIL";
    if (o.verdict == Verdict::kFail) ++hard_failures;
    std::printf("criterion %d %s: %s (%s; %.2f s)\n", c.id, tag, c.name.c_str(), o.detail.c_str(),
                seconds);
    std::fflush(stdout);
  }
  return hard_failures == 0 ? 0 : 1;
}
