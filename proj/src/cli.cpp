#include "pilotforge/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pilotforge/capacity.hpp"
#include "pilotforge/format.hpp"
#include "pilotforge/io.hpp"
#include "pilotforge/link.hpp"
#include "pilotforge/montecarlo.hpp"
#include "pilotforge/parallel.hpp"

namespace pilotforge::cli {
namespace {

namespace fs = std::filesystem;

struct Options {
  std::string scenario;
  std::string scheme;
  std::vector<int> antennas;
  double mu = 0.0;
  int realizations = 0;
  std::uint64_t seed = 0;
  std::string out = ".";
  int figure = 0;
  std::string family = "fig3";
  int grid = 41;
  std::string k_range = "4..14";
  std::string l_range = "2..10";
  std::int64_t samples = 1'000'000;

  bool has_scheme = false;
  bool has_antennas = false;
  bool has_mu = false;
  bool has_realizations = false;
  bool has_seed = false;
};

// Accumulates written files and emits the manifest last.
class Output {
 public:
  Output(fs::path dir, std::ostream& log) : dir_(std::move(dir)), log_(log) {}

  void csv(const std::string& name, const Table& table) {
    write_csv(dir_ / name, table);
    files_.push_back(name);
    log_ << "wrote " << (dir_ / name).string() << "\n";
  }

  void manifest(const Scenario& scenario, const std::string& command) {
    write_text(dir_ / "run.manifest", manifest_text(scenario, command, files_));
  }

 private:
  fs::path dir_;
  std::ostream& log_;
  std::vector<std::string> files_;
};

std::pair<int, int> parse_range(const std::string& text, const std::string& flag) {
  const auto dots = text.find("..");
  try {
    if (dots == std::string::npos) {
      const int v = std::stoi(text);
      return {v, v};
    }
    const int lo = std::stoi(text.substr(0, dots));
    const int hi = std::stoi(text.substr(dots + 2));
    if (lo > hi) throw ArgumentError(flag + " range " + text + " is empty");
    return {lo, hi};
  } catch (const std::logic_error&) {
    throw ArgumentError(flag + " expects N or A..B, got '" + text + "'");
  }
}

Scenario resolve_scenario(const Options& o, bool fallback_to_table1) {
  Scenario s;
  if (!o.scenario.empty()) {
    s = load_scenario(o.scenario);
  } else if (fallback_to_table1) {
    s = table1_scenario();
  } else {
    throw ArgumentError("--scenario is required for this command");
  }
  if (o.has_scheme) s.scheme = o.scheme;
  if (o.has_antennas) s.antennas = o.antennas;
  if (o.has_mu) s.mu = o.mu;
  if (o.has_realizations) s.realizations = o.realizations;
  if (o.has_seed) s.seed = o.seed;
  s.validate();
  return s;
}

std::vector<SchemeDesign> designs_for(const Scenario& s) {
  const NetworkConfig config = s.network();
  const SinrTargets targets = s.sinr_targets();
  std::vector<SchemeDesign> out;
  for (Scheme scheme : s.schemes()) out.push_back(design_scheme(scheme, targets, config));
  return out;
}

std::string pilots_name(const Scenario& s, Scheme scheme) {
  return s.scheme == "all" ? "pilots_" + std::string(to_string(scheme)) + ".csv" : "pilots.csv";
}

void cmd_design(const Scenario& s, Output& out) {
  const NetworkConfig config = s.network();
  const auto designs = designs_for(s);
  for (const auto& d : designs) out.csv(pilots_name(s, d.scheme), pilots_table(d, config));
  out.csv("alpha.csv", alpha_table(designs));
  out.csv("power.csv", power_table(designs));
}

void cmd_capacity(const Scenario& s, Output& out, std::ostream& log) {
  const SinrTargets targets = s.sinr_targets();
  const CapacityBound cap = user_capacity_bound(targets, s.pilot_length);
  Table bound;
  bound.header = {"tau", "total_users", "bound", "admissible"};
  bound.add({std::to_string(s.pilot_length), std::to_string(cap.total_users),
             format_number(cap.bound), cap.admissible ? "true" : "false"});
  out.csv("user_capacity.csv", bound);
  log << "user capacity bound " << format_number(cap.bound, 6) << " for K_tot = "
      << cap.total_users << (cap.admissible ? " (admissible)" : " (not admissible)") << "\n";

  Table region;
  region.header = {"scheme", "cell", "effective_bandwidth", "bound", "satisfied",
                   "cap_violations"};
  for (Scheme scheme : s.schemes()) {
    std::optional<BaselineMeta> meta;
    if (scheme == Scheme::kWbe) meta = wbe_pilots(s.users_per_cell, s.pilot_length, s.cells).second;
    for (const auto& c : region_check(targets, s.pilot_length, scheme, meta ? &*meta : nullptr)) {
      region.add({std::string(to_string(scheme)), std::to_string(c.cell),
                  format_number(c.lhs), format_number(c.bound), c.satisfied ? "true" : "false",
                  std::to_string(c.cap_violations.size())});
      if (!c.satisfied) {
        log << to_string(scheme) << " cell " << c.cell << ": per-cell effective bandwidth "
            << format_number(c.lhs, 6) << " > bound " << format_number(c.bound, 6) << "\n";
      }
    }
  }
  out.csv("capacity.csv", region);
}

void cmd_sinr(const Scenario& s, Output& out) {
  const NetworkConfig config = s.network();
  const auto designs = designs_for(s);
  std::vector<SinrRow> rows;
  for (const auto& d : designs) {
    const SinrReport asym = sinr_asymptotic(d.pilots, d.power, config, d.targets);
    for (int m : s.antennas) {
      rows.push_back({d.scheme, sinr_finite(d.pilots, d.power, config, d.targets, m), asym,
                      &d.targets});
    }
  }
  out.csv("sinr.csv", sinr_table(rows));
}

void cmd_min_antennas(const Scenario& s, Output& out, std::ostream& log) {
  const NetworkConfig config = s.network();
  const auto designs = designs_for(s);
  std::vector<MinAntennaRow> rows;
  for (const auto& d : designs) {
    rows.push_back({d.scheme, s.mu, min_antennas(d.pilots, d.power, config, s.mu), &d.targets});
    log << to_string(d.scheme) << ": " << rows.back().result.network
        << " antennas at mu = " << format_number(s.mu, 6) << "\n";
  }
  out.csv("minant.csv", minant_table(rows));
}

void cmd_montecarlo(const Scenario& s, Output& out) {
  const NetworkConfig config = s.network();
  const auto designs = designs_for(s);
  std::vector<MonteCarloRow> rows;
  for (const auto& d : designs) {
    for (int m : s.antennas) {
      MonteCarloReport report = simulate(config, d.pilots, d.power, m, s.realizations, s.seed);
      rows.push_back({d.scheme, std::move(report),
                      sinr_finite(d.pilots, d.power, config, d.targets, m).theta, &d.targets});
    }
  }
  out.csv("mc.csv", mc_table(rows));
}

std::optional<BaselineMeta> meta_for(Scheme scheme, int users, int tau) {
  if (scheme != Scheme::kWbe) return std::nullopt;
  BaselineMeta meta;
  meta.kappa = wbe_kappa(users, tau);
  meta.nominal_rho = wbe_nominal_rho(users, tau);
  return meta;
}

void max_sinr_row(Table& t, const std::string& family, double parameter, const TargetFamily& f,
                  int tau, int cells, int users) {
  for (Scheme scheme : {Scheme::kGwbe, Scheme::kWbe, Scheme::kFos}) {
    std::string gamma = "nan";
    std::string capped = "false";
    if (scheme == Scheme::kFos || users > tau) {
      const auto meta = meta_for(scheme, users, tau);
      const MaxSinrResult r =
          max_sinr_solve(f, scheme, tau, cells, users, meta ? &*meta : nullptr);
      gamma = format_number(r.gamma_max);
      capped = r.cap_limited ? "true" : "false";
    }
    t.add({family, format_number(parameter), std::string(to_string(scheme)), gamma, capped});
  }
}

Table max_sinr_table(const std::string& family, const Options& o, int tau, int cells) {
  Table t;
  t.header = {"family", "parameter", "scheme", "gamma_max", "cap_limited"};
  if (family == "fig3") {
    const auto [lo, hi] = parse_range(o.k_range, "--K");
    if (lo < 3) throw ArgumentError("--K must start at 3 or more for the fig3 family");
    for (int k = lo; k <= hi; ++k) max_sinr_row(t, family, k, fig3_family(k), tau, cells, k);
  } else if (family == "fig4") {
    if (o.grid < 2) throw ArgumentError("--grid must be >= 2");
    for (int i = 0; i < o.grid; ++i) {
      const double omega = std::pow(10.0, -2.0 + 3.0 * i / (o.grid - 1));
      max_sinr_row(t, family, omega, fig4_family(omega), tau, cells, 5);
    }
  } else if (family == "fig5") {
    const auto [lo, hi] = parse_range(o.l_range, "--L");
    if (lo < 1) throw ArgumentError("--L must start at 1 or more");
    for (int l = lo; l <= hi; ++l) max_sinr_row(t, family, l, fig5_family(), tau, l, 5);
  } else {
    throw ArgumentError("unknown family '" + family + "' (expected fig3, fig4 or fig5)");
  }
  return t;
}

// Free slots are the first two users, the third is solved for and the rest
// stay at the scenario's first-row targets.
std::vector<double> fixed_tail_of(const Scenario& s, int first_fixed) {
  std::vector<double> tail;
  for (int k = first_fixed; k < s.users_per_cell; ++k) tail.push_back(s.targets(0, k));
  return tail;
}

Table boundary_for(int tau, int cells, const std::vector<double>& fixed, int grid,
                   int users) {
  if (grid < 2) throw ArgumentError("--grid must be >= 2");
  const double side = cells >= 2 ? 1.0 / (cells - 1) : 1.0;
  Table t;
  for (Scheme scheme : {Scheme::kGwbe, Scheme::kWbe, Scheme::kFos}) {
    const double kappa = scheme == Scheme::kWbe ? wbe_kappa(users, tau) : 0.0;
    t = boundary_table(scheme, boundary_surface(scheme, tau, cells, fixed, grid, side, kappa),
                       std::move(t));
  }
  return t;
}

Table volumes_for(const RegionSamplingSetup& setup, std::ostream& log) {
  const RegionSampleCounts counts = sample_regions(setup);
  Table t = region_table();
  std::map<Scheme, double> volume;
  for (Scheme scheme : {Scheme::kGwbe, Scheme::kWbe, Scheme::kFos}) {
    const VolumeEstimate v = volume_from_counts(counts, scheme, setup);
    volume[scheme] = v.volume;
    add_region_row(t, scheme, v, setup.seed);
  }
  log << "containment violations: wbe " << counts.wbe_outside_gwbe << ", fos "
      << counts.fos_outside_gwbe << "\n";
  if (volume[Scheme::kWbe] > 0 && volume[Scheme::kFos] > 0) {
    log << "gwbe volume excess over wbe "
        << format_number(100.0 * (volume[Scheme::kGwbe] / volume[Scheme::kWbe] - 1.0), 4)
        << "%, over fos "
        << format_number(100.0 * (volume[Scheme::kGwbe] / volume[Scheme::kFos] - 1.0), 4)
        << "%\n";
  }
  return t;
}

void cmd_boundary(const Scenario& s, const Options& o, Output& out) {
  if (s.users_per_cell < 3) throw ShapeError("boundary needs at least 3 users per cell");
  out.csv("boundary.csv",
          boundary_for(s.pilot_length, s.cells, fixed_tail_of(s, 3), o.grid, s.users_per_cell));
}

void cmd_region_volume(const Scenario& s, const Options& o, Output& out, std::ostream& log) {
  RegionSamplingSetup setup;
  setup.num_cells = s.cells;
  setup.users_per_cell = s.users_per_cell;
  setup.tau = s.pilot_length;
  setup.fixed_tail = fixed_tail_of(s, std::min(3, s.users_per_cell));
  setup.samples = o.samples;
  setup.seed = s.seed;
  out.csv("region.csv", volumes_for(setup, log));
}

void cmd_repro(const Options& o, Output& out, std::ostream& log, Scenario& used) {
  switch (o.figure) {
    case 2: {
      // Upper boundary surfaces and region volumes with gamma_4 = 0.2.
      const std::vector<double> tail{0.20};
      out.csv("boundary_L2.csv", boundary_for(3, 2, tail, o.grid, 4));
      out.csv("boundary_L4.csv", boundary_for(3, 4, tail, o.grid, 4));
      RegionSamplingSetup setup;
      setup.num_cells = 4;
      setup.users_per_cell = 4;
      setup.tau = 3;
      setup.fixed_tail = tail;
      setup.samples = o.samples;
      setup.seed = used.seed;
      out.csv("region.csv", volumes_for(setup, log));
      return;
    }
    case 3:
      out.csv("maxsinr.csv", max_sinr_table("fig3", o, 3, 2));
      return;
    case 4:
      out.csv("maxsinr.csv", max_sinr_table("fig4", o, 3, 2));
      return;
    case 5:
      out.csv("maxsinr.csv", max_sinr_table("fig5", o, 3, 2));
      cmd_sinr(used, out);
      cmd_montecarlo(used, out);
      return;
    case 6: {
      cmd_min_antennas(used, out, log);
      const NetworkConfig config = used.network();
      const auto designs = designs_for(used);
      Table sweep;
      sweep.header = {"scheme", "mu", "m_min_network"};
      for (const auto& d : designs) {
        for (int i = 50; i <= 95; ++i) {
          const double mu = i / 100.0;
          sweep.add({std::string(to_string(d.scheme)), format_number(mu),
                     std::to_string(min_antennas(d.pilots, d.power, config, mu).network)});
        }
      }
      out.csv("minant_sweep.csv", sweep);
      return;
    }
    default:
      throw ArgumentError("--figure must be 2, 3, 4, 5 or 6");
  }
}

void add_common(CLI::App* app, Options& o, bool scenario_required) {
  auto* sc = app->add_option("--scenario", o.scenario, "Scenario file (JSON)");
  if (scenario_required) sc->required();
  app->add_option("--out", o.out, "Output directory");
  app->add_option("--scheme", o.scheme, "gwbe | wbe | fos | all")
      ->check(CLI::IsMember({"gwbe", "wbe", "fos", "all"}))
      ->each([&o](const std::string&) { o.has_scheme = true; });
  app->add_option("--antennas", o.antennas, "Antenna counts, comma separated")
      ->delimiter(',')
      ->each([&o](const std::string&) { o.has_antennas = true; });
  app->add_option("--mu", o.mu, "Performance satisfaction index in (0, 1)")
      ->each([&o](const std::string&) { o.has_mu = true; });
  app->add_option("--realizations", o.realizations, "Monte Carlo realizations")
      ->each([&o](const std::string&) { o.has_realizations = true; });
  app->add_option("--seed", o.seed, "RNG seed")
      ->each([&o](const std::string&) { o.has_seed = true; });
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  apply_thread_limit();
  Options o;
  CLI::App app{"Pilot design, SINR and capacity analysis for multi-cell massive MIMO",
               "pilotforge"};
  app.require_subcommand(1, 1);
  app.set_version_flag("--version", std::string(tool_version()));

  std::map<std::string, CLI::App*> sub;
  const auto add = [&](const std::string& name, const std::string& help, bool needs_scenario) {
    CLI::App* s = app.add_subcommand(name, help);
    add_common(s, o, needs_scenario);
    sub[name] = s;
    return s;
  };
  add("design", "Design pilots and allocate power", true);
  add("capacity", "User-capacity bound and per-cell region checks", true);
  add("sinr", "Closed-form finite-M and asymptotic SINR", true);
  add("min-antennas", "Minimum antennas for a satisfaction index", true);
  add("montecarlo", "Monte Carlo SINR against the closed form", true);
  auto* max_sinr = add("max-sinr", "Maximum permitted SINR sweeps", false);
  max_sinr->add_option("--family", o.family, "fig3 | fig4 | fig5")
      ->check(CLI::IsMember({"fig3", "fig4", "fig5"}));
  max_sinr->add_option("--K", o.k_range, "Per-cell user range for fig3, e.g. 4..14");
  max_sinr->add_option("--L", o.l_range, "Cell-count range for fig5, e.g. 2..10");
  max_sinr->add_option("--grid", o.grid, "Number of omega points for fig4");
  auto* boundary = add("boundary", "Upper boundary surface of the per-cell regions", false);
  boundary->add_option("--grid", o.grid, "Grid points per axis");
  auto* volume = add("region-volume", "Monte Carlo volume of the per-cell regions", false);
  volume->add_option("--samples", o.samples, "Number of samples (>= 100000)");
  auto* repro = add("repro", "Reproduce a figure preset", false);
  repro->add_option("--figure", o.figure, "2 | 3 | 4 | 5 | 6")->required();
  repro->add_option("--grid", o.grid, "Grid resolution");
  repro->add_option("--samples", o.samples, "Region samples for figure 2");
  repro->add_option("--K", o.k_range, "Per-cell user range for figure 3");
  repro->add_option("--L", o.l_range, "Cell-count range for figure 5");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  std::string command;
  for (int i = 1; i < argc; ++i) command += (i > 1 ? " " : "") + std::string(argv[i]);

  try {
    Output files(o.out, out);
    const bool explicit_scenario = !o.scenario.empty();
    if (sub["design"]->parsed()) {
      const Scenario s = resolve_scenario(o, false);
      cmd_design(s, files);
      files.manifest(s, command);
    } else if (sub["capacity"]->parsed()) {
      const Scenario s = resolve_scenario(o, false);
      cmd_capacity(s, files, out);
      files.manifest(s, command);
    } else if (sub["sinr"]->parsed()) {
      const Scenario s = resolve_scenario(o, false);
      cmd_sinr(s, files);
      files.manifest(s, command);
    } else if (sub["min-antennas"]->parsed()) {
      const Scenario s = resolve_scenario(o, false);
      cmd_min_antennas(s, files, out);
      files.manifest(s, command);
    } else if (sub["montecarlo"]->parsed()) {
      const Scenario s = resolve_scenario(o, false);
      cmd_montecarlo(s, files);
      files.manifest(s, command);
    } else if (sub["max-sinr"]->parsed()) {
      const Scenario s = resolve_scenario(o, true);
      const int tau = explicit_scenario ? s.pilot_length : 3;
      const int cells = explicit_scenario ? s.cells : 2;
      files.csv("maxsinr.csv", max_sinr_table(o.family, o, tau, cells));
      files.manifest(s, command);
    } else if (sub["boundary"]->parsed()) {
      const Scenario s = resolve_scenario(o, true);
      cmd_boundary(s, o, files);
      files.manifest(s, command);
    } else if (sub["region-volume"]->parsed()) {
      const Scenario s = resolve_scenario(o, true);
      cmd_region_volume(s, o, files, out);
      files.manifest(s, command);
    } else if (sub["repro"]->parsed()) {
      Scenario s = resolve_scenario(o, true);
      cmd_repro(o, files, out, s);
      files.manifest(s, command);
    }
  } catch (const InternalError& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitOk;
}

}  // namespace pilotforge::cli
