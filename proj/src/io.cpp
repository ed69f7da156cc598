#include "pilotforge/io.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "pilotforge/format.hpp"

namespace pilotforge {
namespace {

using Json = nlohmann::ordered_json;

constexpr std::string_view kVersion = "1.0.0";

int line_of_offset(std::string_view text, std::size_t offset) {
  offset = std::min(offset, text.size());
  int line = 1;
  for (std::size_t i = 0; i < offset; ++i) line += text[i] == '\n';
  return line;
}

// Where a field is written; 0 when it does not appear.
int line_of_key(std::string_view text, std::string_view key) {
  const std::string quoted = "\"" + std::string(key) + "\"";
  std::size_t pos = 0;
  while ((pos = text.find(quoted, pos)) != std::string_view::npos) {
    std::size_t after = pos + quoted.size();
    while (after < text.size() && std::isspace(static_cast<unsigned char>(text[after]))) ++after;
    if (after < text.size() && text[after] == ':') return line_of_offset(text, pos);
    pos = after;
  }
  return 0;
}

class FieldReader {
 public:
  FieldReader(const Json& root, std::string_view text, std::string_view origin)
      : root_(root), text_(text), origin_(origin) {}

  [[noreturn]] void fail(std::string_view key, const std::string& what) const {
    const int line = line_of_key(text_, key);
    std::string where(origin_);
    if (line > 0) where += ":" + std::to_string(line);
    throw ParseError(where + ": field '" + std::string(key) + "': " + what);
  }

  bool has(std::string_view key) const { return root_.contains(std::string(key)); }
  const Json& at(std::string_view key) const { return root_.at(std::string(key)); }

  const Json& required(std::string_view key) const {
    if (!has(key)) {
      throw ParseError(std::string(origin_) + ": missing required field '" + std::string(key) +
                       "'");
    }
    return at(key);
  }

  int integer(std::string_view key, const Json& v) const {
    if (!v.is_number_integer()) fail(key, "expected an integer");
    const auto value = v.get<std::int64_t>();
    if (value < INT32_MIN || value > INT32_MAX) fail(key, "integer out of range");
    return static_cast<int>(value);
  }

  double real(std::string_view key, const Json& v) const {
    if (!v.is_number()) fail(key, "expected a number");
    return v.get<double>();
  }

  Eigen::MatrixXd matrix(std::string_view key, const Json& v) const {
    if (!v.is_array() || v.empty()) fail(key, "expected a non-empty array of rows");
    const std::size_t cols = v.front().is_array() ? v.front().size() : 0;
    if (cols == 0) fail(key, "expected a non-empty array of rows");
    Eigen::MatrixXd m(v.size(), cols);
    for (std::size_t r = 0; r < v.size(); ++r) {
      if (!v[r].is_array() || v[r].size() != cols) {
        fail(key, "row " + std::to_string(r + 1) + " has a different length than row 1");
      }
      for (std::size_t c = 0; c < cols; ++c) {
        if (!v[r][c].is_number()) {
          fail(key, "entry (" + std::to_string(r + 1) + "," + std::to_string(c + 1) +
                        ") is not a number");
        }
        m(r, c) = v[r][c].get<double>();
      }
    }
    return m;
  }

  // [cell][user][bs] nested arrays flattened in the NetworkConfig layout.
  std::vector<double> tensor(std::string_view key, const Json& v, int cells, int users) const {
    const auto shape_error = [&] {
      fail(key, "expected a " + std::to_string(cells) + " x " + std::to_string(users) + " x " +
                    std::to_string(cells) + " nested array");
    };
    if (!v.is_array() || static_cast<int>(v.size()) != cells) shape_error();
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(cells) * users * cells);
    for (const auto& cell : v) {
      if (!cell.is_array() || static_cast<int>(cell.size()) != users) shape_error();
      for (const auto& user : cell) {
        if (!user.is_array() || static_cast<int>(user.size()) != cells) shape_error();
        for (const auto& x : user) {
          if (!x.is_number()) fail(key, "tensor entries must be numbers");
          out.push_back(x.get<double>());
        }
      }
    }
    return out;
  }

 private:
  const Json& root_;
  std::string_view text_;
  std::string_view origin_;
};

const std::set<std::string, std::less<>> kKnownFields = {
    "cells", "users_per_cell", "pilot_length", "sigma_z2", "sigma_w2", "targets",
    "gamma_hat", "xi2_cross", "beta_cross", "xi2", "beta", "scheme", "antennas", "mu",
    "realizations", "seed", "description"};

Json matrix_json(const Eigen::MatrixXd& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json tensor_json(const std::vector<double>& t, int cells, int users) {
  Json out = Json::array();
  std::size_t i = 0;
  for (int c = 0; c < cells; ++c) {
    Json cell = Json::array();
    for (int u = 0; u < users; ++u) {
      Json user = Json::array();
      for (int b = 0; b < cells; ++b) user.push_back(t[i++]);
      cell.push_back(std::move(user));
    }
    out.push_back(std::move(cell));
  }
  return out;
}

Json scenario_json(const Scenario& s) {
  Json j;
  j["cells"] = s.cells;
  j["users_per_cell"] = s.users_per_cell;
  j["pilot_length"] = s.pilot_length;
  j["sigma_z2"] = s.sigma_z2;
  j["sigma_w2"] = s.sigma_w2;
  j["xi2_cross"] = s.xi2_cross;
  j["beta_cross"] = s.beta_cross;
  j["targets"] = matrix_json(s.targets);
  if (s.gamma_hat) j["gamma_hat"] = matrix_json(*s.gamma_hat);
  if (s.xi2) j["xi2"] = tensor_json(*s.xi2, s.cells, s.users_per_cell);
  if (s.beta) j["beta"] = tensor_json(*s.beta, s.cells, s.users_per_cell);
  j["scheme"] = s.scheme;
  j["antennas"] = s.antennas;
  j["mu"] = s.mu;
  j["realizations"] = s.realizations;
  j["seed"] = s.seed;
  return j;
}

std::vector<double> uniform_tensor(int cells, int users, double same, double cross) {
  std::vector<double> t;
  t.reserve(static_cast<std::size_t>(cells) * users * cells);
  for (int c = 0; c < cells; ++c) {
    for (int u = 0; u < users; ++u) {
      for (int b = 0; b < cells; ++b) t.push_back(b == c ? same : cross);
    }
  }
  return t;
}

bool close(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

bool close(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double tol) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (!close(a.data()[i], b.data()[i], tol)) return false;
  }
  return true;
}

bool close(const std::optional<std::vector<double>>& a,
           const std::optional<std::vector<double>>& b, double tol) {
  if (a.has_value() != b.has_value()) return false;
  if (!a) return true;
  if (a->size() != b->size()) return false;
  for (std::size_t i = 0; i < a->size(); ++i) {
    if (!close((*a)[i], (*b)[i], tol)) return false;
  }
  return true;
}

std::string num(double v) { return format_number(v); }
std::string num(int v) { return std::to_string(v); }
std::string flag(bool v) { return v ? "true" : "false"; }

// sorted slot of each input-order user, per cell.
std::vector<std::vector<int>> slots(const SinrTargets& targets) {
  const auto& perm = targets.permutation();
  std::vector<std::vector<int>> inverse(perm.size());
  for (std::size_t l = 0; l < perm.size(); ++l) {
    inverse[l].resize(perm[l].size());
    for (std::size_t k = 0; k < perm[l].size(); ++k) inverse[l][perm[l][k]] = static_cast<int>(k);
  }
  return inverse;
}

std::string utc_timestamp() {
  std::time_t t = 0;
  const char* epoch = std::getenv("SOURCE_DATE_EPOCH");
  if (epoch != nullptr && *epoch != '\0') {
    t = static_cast<std::time_t>(std::strtoll(epoch, nullptr, 10));
  } else {
    t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  }
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

NetworkConfig Scenario::network() const {
  std::vector<double> x = xi2 ? *xi2 : uniform_tensor(cells, users_per_cell, 1.0, xi2_cross);
  std::vector<double> b = beta ? *beta : uniform_tensor(cells, users_per_cell, 1.0, beta_cross);
  return NetworkConfig(cells, users_per_cell, pilot_length, sigma_z2, sigma_w2, std::move(x),
                       std::move(b));
}

SinrTargets Scenario::sinr_targets() const {
  if (targets.rows() != cells || targets.cols() != users_per_cell) {
    throw ShapeError("targets must be " + std::to_string(cells) + " x " +
                     std::to_string(users_per_cell) + ", got " + std::to_string(targets.rows()) +
                     " x " + std::to_string(targets.cols()));
  }
  SinrTargets t(targets);
  if (gamma_hat) {
    if (gamma_hat->rows() != cells || gamma_hat->cols() != users_per_cell) {
      throw ShapeError("gamma_hat must have the same shape as targets");
    }
    t = t.with_gamma_hat(*gamma_hat);
  }
  return t;
}

std::vector<Scheme> Scenario::schemes() const {
  if (scheme == "all") return {Scheme::kGwbe, Scheme::kWbe, Scheme::kFos};
  return {parse_scheme(scheme)};
}

void Scenario::validate() const {
  const NetworkConfig config = network();
  const SinrTargets t = sinr_targets();
  for (Scheme s : schemes()) {
    if (s != Scheme::kFos && pilot_length >= users_per_cell) {
      throw ShapeError("pilot length tau = " + std::to_string(pilot_length) +
                       " must be smaller than users_per_cell K = " +
                       std::to_string(users_per_cell) + " for " + std::string(to_string(s)));
    }
  }
  if (antennas.empty()) throw ArgumentError("antennas list is empty");
  for (int m : antennas) {
    if (m < 1) throw ArgumentError("antenna counts must be >= 1, got " + std::to_string(m));
  }
  if (!(mu > 0.0 && mu < 1.0)) throw ArgumentError("mu must lie in (0, 1), got " + num(mu));
  if (realizations < 1) throw ArgumentError("realizations must be >= 1");
}

Scenario table1_scenario() {
  Scenario s;
  s.cells = 2;
  s.users_per_cell = 4;
  s.pilot_length = 3;
  s.targets.resize(2, 4);
  s.targets << 0.91, 0.74, 0.64, 0.23, 0.94, 0.82, 0.45, 0.20;
  Eigen::MatrixXd hat(2, 4);
  hat << 0.92, 0.75, 0.65, 0.24, 0.95, 0.85, 0.50, 0.29;
  s.gamma_hat = hat;
  s.seed = 20170101;
  return s;
}

Scenario parse_scenario(std::string_view text, std::string_view origin) {
  Json root;
  try {
    root = Json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string(origin) + ":" +
                     std::to_string(line_of_offset(text, e.byte == 0 ? 0 : e.byte - 1)) +
                     ": malformed scenario: " + e.what());
  }
  if (!root.is_object()) throw ParseError(std::string(origin) + ": scenario must be an object");
  for (const auto& [key, value] : root.items()) {
    if (!kKnownFields.contains(key)) {
      throw ParseError(std::string(origin) + ":" + std::to_string(line_of_key(text, key)) +
                       ": unknown field '" + key + "'");
    }
  }

  const FieldReader in(root, text, origin);
  Scenario s;
  s.cells = in.integer("cells", in.required("cells"));
  s.users_per_cell = in.integer("users_per_cell", in.required("users_per_cell"));
  s.pilot_length = in.integer("pilot_length", in.required("pilot_length"));
  s.targets = in.matrix("targets", in.required("targets"));
  if (s.cells < 1) in.fail("cells", "must be >= 1");
  if (s.users_per_cell < 1) in.fail("users_per_cell", "must be >= 1");
  if (s.pilot_length < 1) in.fail("pilot_length", "must be >= 1");
  if (s.targets.rows() != s.cells || s.targets.cols() != s.users_per_cell) {
    in.fail("targets", "expected " + std::to_string(s.cells) + " rows of " +
                           std::to_string(s.users_per_cell) + " values");
  }
  if (in.has("gamma_hat")) {
    s.gamma_hat = in.matrix("gamma_hat", in.at("gamma_hat"));
    if (s.gamma_hat->rows() != s.cells || s.gamma_hat->cols() != s.users_per_cell) {
      in.fail("gamma_hat", "must have the same shape as targets");
    }
  }
  if (in.has("sigma_z2")) s.sigma_z2 = in.real("sigma_z2", in.at("sigma_z2"));
  if (in.has("sigma_w2")) s.sigma_w2 = in.real("sigma_w2", in.at("sigma_w2"));
  if (in.has("xi2_cross")) s.xi2_cross = in.real("xi2_cross", in.at("xi2_cross"));
  if (in.has("beta_cross")) s.beta_cross = in.real("beta_cross", in.at("beta_cross"));
  if (in.has("xi2")) s.xi2 = in.tensor("xi2", in.at("xi2"), s.cells, s.users_per_cell);
  if (in.has("beta")) s.beta = in.tensor("beta", in.at("beta"), s.cells, s.users_per_cell);
  if (in.has("scheme")) {
    const Json& v = in.at("scheme");
    if (!v.is_string()) in.fail("scheme", "expected a string");
    s.scheme = v.get<std::string>();
    if (s.scheme != "all" && s.scheme != "gwbe" && s.scheme != "wbe" && s.scheme != "fos") {
      in.fail("scheme", "expected gwbe, wbe, fos or all");
    }
  }
  if (in.has("antennas")) {
    const Json& v = in.at("antennas");
    s.antennas.clear();
    if (v.is_array()) {
      for (const auto& m : v) s.antennas.push_back(in.integer("antennas", m));
    } else {
      s.antennas.push_back(in.integer("antennas", v));
    }
  }
  if (in.has("mu")) s.mu = in.real("mu", in.at("mu"));
  if (in.has("realizations")) s.realizations = in.integer("realizations", in.at("realizations"));
  if (in.has("seed")) {
    const Json& v = in.at("seed");
    if (!v.is_number_unsigned()) in.fail("seed", "expected a non-negative integer");
    s.seed = v.get<std::uint64_t>();
  }

  s.validate();
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot open scenario file " + path.string());
  std::ostringstream buffer;
  buffer << file.rdbuf();
  return parse_scenario(buffer.str(), path.string());
}

std::string dump_scenario(const Scenario& scenario) { return scenario_json(scenario).dump(2) + "\n"; }

void save_scenario(const Scenario& scenario, const std::filesystem::path& path) {
  write_text(path, dump_scenario(scenario));
}

bool equivalent(const Scenario& a, const Scenario& b, double tol) {
  if (a.cells != b.cells || a.users_per_cell != b.users_per_cell ||
      a.pilot_length != b.pilot_length || a.scheme != b.scheme || a.antennas != b.antennas ||
      a.realizations != b.realizations || a.seed != b.seed) {
    return false;
  }
  if (!close(a.sigma_z2, b.sigma_z2, tol) || !close(a.sigma_w2, b.sigma_w2, tol) ||
      !close(a.xi2_cross, b.xi2_cross, tol) || !close(a.beta_cross, b.beta_cross, tol) ||
      !close(a.mu, b.mu, tol) || !close(a.targets, b.targets, tol)) {
    return false;
  }
  if (a.gamma_hat.has_value() != b.gamma_hat.has_value()) return false;
  if (a.gamma_hat && !close(*a.gamma_hat, *b.gamma_hat, tol)) return false;
  return close(a.xi2, b.xi2, tol) && close(a.beta, b.beta, tol);
}

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t scenario_hash(const Scenario& scenario) {
  return fnv1a(scenario_json(scenario).dump());
}

void Table::add(std::vector<std::string> row) {
  if (row.size() != header.size()) throw InternalError("CSV row width does not match header");
  rows.push_back(std::move(row));
}

std::string to_csv(const Table& table) {
  std::string out;
  const auto line = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    out += '\n';
  };
  line(table.header);
  for (const auto& row : table.rows) line(row);
  return out;
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError("cannot write " + path.string());
  file.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!file) throw IoError("failed writing " + path.string());
}

void write_csv(const std::filesystem::path& path, const Table& table) {
  write_text(path, to_csv(table));
}

Table pilots_table(const SchemeDesign& design, const NetworkConfig& config) {
  Table t;
  t.header = {"cell", "user"};
  for (int i = 1; i <= config.pilot_length(); ++i) t.header.push_back("component_" + num(i));
  const auto slot = slots(design.targets);
  for (int l = 0; l < config.num_cells(); ++l) {
    for (int u = 0; u < config.users_per_cell(); ++u) {
      std::vector<std::string> row{num(l + 1), num(u + 1)};
      const auto col = design.pilots.sequences().col(config.column(l, slot[l][u]));
      for (int i = 0; i < config.pilot_length(); ++i) row.push_back(num(col(i)));
      t.add(std::move(row));
    }
  }
  return t;
}

Table alpha_table(const std::vector<SchemeDesign>& designs) {
  Table t;
  t.header = {"scheme", "cell", "user", "alpha"};
  for (const auto& d : designs) {
    const Eigen::MatrixXd alpha = d.targets.to_input_order(d.power.alpha);
    for (Eigen::Index l = 0; l < alpha.rows(); ++l) {
      for (Eigen::Index k = 0; k < alpha.cols(); ++k) {
        t.add({std::string(to_string(d.scheme)), num(int(l + 1)), num(int(k + 1)), num(alpha(l, k))});
      }
    }
  }
  return t;
}

Table power_table(const std::vector<SchemeDesign>& designs) {
  Table t;
  t.header = {"scheme", "cell", "user", "gamma", "gamma_hat", "power"};
  for (const auto& d : designs) {
    const Eigen::MatrixXd gamma = d.targets.gamma_input_order();
    const Eigen::MatrixXd used = d.scheme == Scheme::kGwbe
                                     ? d.targets.to_input_order(*d.targets.gamma_hat())
                                     : gamma;
    const Eigen::MatrixXd power = d.targets.to_input_order(d.power.power);
    for (Eigen::Index l = 0; l < gamma.rows(); ++l) {
      for (Eigen::Index k = 0; k < gamma.cols(); ++k) {
        t.add({std::string(to_string(d.scheme)), num(int(l + 1)), num(int(k + 1)),
               num(gamma(l, k)), num(used(l, k)), num(power(l, k))});
      }
    }
  }
  return t;
}

Table sinr_table(const std::vector<SinrRow>& rows) {
  Table t;
  t.header = {"scheme", "antennas", "cell", "user", "theta_analytic", "theta_asymptotic",
              "target", "met"};
  for (const auto& r : rows) {
    const SinrTargets& targets = *r.targets;
    const Eigen::MatrixXd finite = targets.to_input_order(r.finite.theta);
    const Eigen::MatrixXd asym = targets.to_input_order(r.asymptotic.theta);
    const Eigen::MatrixXd gamma = targets.gamma_input_order();
    for (Eigen::Index l = 0; l < gamma.rows(); ++l) {
      for (Eigen::Index k = 0; k < gamma.cols(); ++k) {
        t.add({std::string(to_string(r.scheme)), num(r.finite.antennas.value_or(0)),
               num(int(l + 1)), num(int(k + 1)), num(finite(l, k)), num(asym(l, k)),
               num(gamma(l, k)), flag(finite(l, k) >= gamma(l, k) - 1e-12)});
      }
    }
  }
  return t;
}

Table mc_table(const std::vector<MonteCarloRow>& rows) {
  Table t;
  t.header = {"scheme", "antennas", "realizations", "seed", "cell", "user", "theta_empirical",
              "stderr", "theta_analytic", "rel_error"};
  for (const auto& r : rows) {
    const SinrTargets& targets = *r.targets;
    const Eigen::MatrixXd emp = targets.to_input_order(r.report.empirical_theta);
    const Eigen::MatrixXd err = targets.to_input_order(r.report.stderr_);
    const Eigen::MatrixXd ana = targets.to_input_order(r.analytic);
    for (Eigen::Index l = 0; l < emp.rows(); ++l) {
      for (Eigen::Index k = 0; k < emp.cols(); ++k) {
        t.add({std::string(to_string(r.scheme)), num(r.report.antennas),
               num(r.report.realizations), std::to_string(r.report.seed), num(int(l + 1)),
               num(int(k + 1)), num(emp(l, k)), num(err(l, k)), num(ana(l, k)),
               num(std::abs(emp(l, k) - ana(l, k)) / ana(l, k))});
      }
    }
  }
  return t;
}

Table minant_table(const std::vector<MinAntennaRow>& rows) {
  Table t;
  t.header = {"scheme", "mu", "cell", "user", "m_min_user", "m_min_network"};
  for (const auto& r : rows) {
    const Eigen::MatrixXd per_user =
        r.targets->to_input_order(r.result.per_user.cast<double>());
    for (Eigen::Index l = 0; l < per_user.rows(); ++l) {
      for (Eigen::Index k = 0; k < per_user.cols(); ++k) {
        t.add({std::string(to_string(r.scheme)), num(r.mu), num(int(l + 1)), num(int(k + 1)),
               num(static_cast<int>(per_user(l, k))), num(r.result.network)});
      }
    }
  }
  return t;
}

Table boundary_table(Scheme scheme, const std::vector<BoundaryPoint>& points, Table table) {
  if (table.header.empty()) table.header = {"scheme", "gamma_a", "gamma_b", "gamma_c"};
  for (const auto& p : points) {
    table.add({std::string(to_string(scheme)), num(p.gamma_a), num(p.gamma_b), num(p.gamma_c)});
  }
  return table;
}

Table region_table() {
  Table t;
  t.header = {"scheme", "samples", "seed", "volume", "stderr"};
  return t;
}

void add_region_row(Table& table, Scheme scheme, const VolumeEstimate& volume,
                    std::uint64_t seed) {
  table.add({std::string(to_string(scheme)), std::to_string(volume.samples),
             std::to_string(seed), num(volume.volume), num(volume.stderr_)});
}

std::string manifest_text(const Scenario& scenario, std::string_view command,
                          const std::vector<std::string>& files) {
  char hash[17];
  std::snprintf(hash, sizeof(hash), "%016llx",
                static_cast<unsigned long long>(scenario_hash(scenario)));
  Json j;
  j["tool"] = "pilotforge";
  j["version"] = kVersion;
  j["command"] = command;
  j["timestamp"] = utc_timestamp();
  j["seed"] = scenario.seed;
  j["scenario_hash"] = hash;
  j["scenario"] = scenario_json(scenario);
  j["files"] = files;
  return j.dump(2) + "\n";
}

std::string_view tool_version() { return kVersion; }

}  // namespace pilotforge
