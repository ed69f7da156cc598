#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pilotforge/capacity.hpp"
#include "pilotforge/link.hpp"
#include "pilotforge/model.hpp"
#include "pilotforge/montecarlo.hpp"

namespace pilotforge {

/// Flat scenario description. Matrices are L x K in the caller's user order.
struct Scenario {
  int cells = 0;
  int users_per_cell = 0;
  int pilot_length = 0;
  double sigma_z2 = 1.0;
  double sigma_w2 = 1.0;
  double xi2_cross = 0.9;
  double beta_cross = 0.9;
  Eigen::MatrixXd targets;
  std::optional<Eigen::MatrixXd> gamma_hat;
  /// Optional full L x K x L tensors (cell, user, bs); override the scalars.
  std::optional<std::vector<double>> xi2;
  std::optional<std::vector<double>> beta;
  std::string scheme = "all";  // gwbe | wbe | fos | all
  std::vector<int> antennas{100, 200, 300};
  double mu = 0.9;
  int realizations = 1000;
  std::uint64_t seed = 1;

  NetworkConfig network() const;
  /// Targets with the gamma_hat override applied when present.
  SinrTargets sinr_targets() const;
  std::vector<Scheme> schemes() const;
  /// Throws the model-layer error that names the violated invariant.
  void validate() const;
};

/// The two-cell, four-user reference scenario bundled as data/table1.scenario.
Scenario table1_scenario();

/// Parses the JSON scenario format. `origin` prefixes diagnostics.
Scenario parse_scenario(std::string_view text, std::string_view origin = "<scenario>");
Scenario load_scenario(const std::filesystem::path& path);

/// Canonical JSON text (round-trips through parse_scenario).
std::string dump_scenario(const Scenario& scenario);
void save_scenario(const Scenario& scenario, const std::filesystem::path& path);

/// Field-wise equality within `tol`.
bool equivalent(const Scenario& a, const Scenario& b, double tol = 1e-12);

/// 64-bit FNV-1a of the canonical dump.
std::uint64_t scenario_hash(const Scenario& scenario);
std::uint64_t fnv1a(std::string_view bytes);

/// A CSV table; every cell is already formatted text.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add(std::vector<std::string> row);
};

std::string to_csv(const Table& table);
void write_csv(const std::filesystem::path& path, const Table& table);
void write_text(const std::filesystem::path& path, std::string_view text);

/// Table builders. Users are listed in the caller's input order, 1-based.
Table pilots_table(const SchemeDesign& design, const NetworkConfig& config);
Table alpha_table(const std::vector<SchemeDesign>& designs);
Table power_table(const std::vector<SchemeDesign>& designs);

struct SinrRow {
  Scheme scheme;
  SinrReport finite;
  SinrReport asymptotic;
  const SinrTargets* targets;
};
Table sinr_table(const std::vector<SinrRow>& rows);

struct MonteCarloRow {
  Scheme scheme;
  MonteCarloReport report;
  Eigen::MatrixXd analytic;
  const SinrTargets* targets;
};
Table mc_table(const std::vector<MonteCarloRow>& rows);

struct MinAntennaRow {
  Scheme scheme;
  double mu;
  MinAntennaResult result;
  const SinrTargets* targets;
};
Table minant_table(const std::vector<MinAntennaRow>& rows);

Table boundary_table(Scheme scheme, const std::vector<BoundaryPoint>& points,
                     Table table = {});
Table region_table();
void add_region_row(Table& table, Scheme scheme, const VolumeEstimate& volume,
                    std::uint64_t seed);

/// Contents of run.manifest: JSON with the effective scenario, its hash, the
/// command line and the written files.
std::string manifest_text(const Scenario& scenario, std::string_view command,
                          const std::vector<std::string>& files);

std::string_view tool_version();

}  // namespace pilotforge
