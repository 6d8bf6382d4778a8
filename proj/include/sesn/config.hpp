#ifndef SESN_CONFIG_HPP
#define SESN_CONFIG_HPP

#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "sesn/cross_validation.hpp"
#include "sesn/errors.hpp"
#include "sesn/esn.hpp"
#include "sesn/harmonics.hpp"

namespace sesn {

namespace detail {

inline std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

}  // namespace detail

/// Flat key/value configuration with sections. Keys are stored as
/// "section.key"; serialization is sorted, so a round trip is independent
/// of the original key order.
class Config {
 public:
  Config() = default;

  static Config parse_string(const std::string& text) {
    Config cfg;
    std::istringstream is(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(is, line)) {
      ++lineno;
      const auto hash = line.find_first_of("#;");
      if (hash != std::string::npos) line = line.substr(0, hash);
      line = detail::trim(line);
      if (line.empty()) continue;
      if (line.front() == '[') {
        if (line.back() != ']')
          throw configuration_error("config line " + std::to_string(lineno) +
                                    ": unterminated section header");
        section = detail::trim(line.substr(1, line.size() - 2));
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string::npos)
        throw configuration_error("config line " + std::to_string(lineno) +
                                  ": expected key = value");
      const std::string key = detail::trim(line.substr(0, eq));
      const std::string value = detail::trim(line.substr(eq + 1));
      if (key.empty())
        throw configuration_error("config line " + std::to_string(lineno) + ": empty key");
      cfg.values_[section.empty() ? key : section + "." + key] = value;
    }
    return cfg;
  }

  static Config parse_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw io_error("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << is.rdbuf();
    return parse_string(ss.str());
  }

  std::string serialize() const {
    std::ostringstream os;
    std::string section;
    bool first = true;
    for (const auto& [full_key, value] : values_) {
      const auto dot = full_key.find('.');
      const std::string sec = dot == std::string::npos ? "" : full_key.substr(0, dot);
      const std::string key = dot == std::string::npos ? full_key : full_key.substr(dot + 1);
      if (sec != section || first) {
        if (!first) os << "\n";
        if (!sec.empty()) os << "[" << sec << "]\n";
        section = sec;
        first = false;
      }
      os << key << " = " << value << "\n";
    }
    return os.str();
  }

  bool has(const std::string& key) const { return values_.count(key) > 0; }

  void set(const std::string& key, const std::string& value) { values_[key] = value; }

  std::string get(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) throw configuration_error("missing config key '" + key + "'");
    return it->second;
  }

  std::string get(const std::string& key, const std::string& fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
  }

  double get_double(const std::string& key, double fallback) const {
    return has(key) ? to_double(key) : fallback;
  }

  std::int64_t get_int(const std::string& key, std::int64_t fallback) const {
    return has(key) ? to_int(key) : fallback;
  }

  std::int64_t require_int(const std::string& key) const {
    get(key);
    return to_int(key);
  }

  std::vector<double> get_list(const std::string& key, std::vector<double> fallback) const {
    if (!has(key)) return fallback;
    std::vector<double> out;
    std::istringstream ss(get(key));
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      cell = detail::trim(cell);
      if (cell.empty()) continue;
      out.push_back(parse_double(key, cell));
    }
    if (out.empty()) throw configuration_error("config key '" + key + "' lists no values");
    return out;
  }

  const std::map<std::string, std::string>& entries() const { return values_; }

  bool operator==(const Config& other) const { return values_ == other.values_; }

 private:
  double to_double(const std::string& key) const { return parse_double(key, get(key)); }

  static double parse_double(const std::string& key, const std::string& v) {
    try {
      std::size_t pos = 0;
      const double x = std::stod(v, &pos);
      if (pos != v.size()) throw std::invalid_argument("trailing characters");
      return x;
    } catch (const std::exception&) {
      throw configuration_error("config key '" + key + "': '" + v + "' is not a number");
    }
  }

  std::int64_t to_int(const std::string& key) const {
    const std::string v = get(key);
    try {
      std::size_t pos = 0;
      const long long x = std::stoll(v, &pos);
      if (pos != v.size()) throw std::invalid_argument("trailing characters");
      return x;
    } catch (const std::exception&) {
      throw configuration_error("config key '" + key + "': '" + v + "' is not an integer");
    }
  }

  std::map<std::string, std::string> values_;
};

/// Typed view of an experiment configuration file.
struct ExperimentConfig {
  std::string wind_path;
  std::string outdir = "out";

  std::int64_t train_end = 0;  // first index past the training split
  std::int64_t calib_end = 0;  // first index past the calibration split

  std::vector<double> periods;

  double knot_grid_step = 0.25;
  double knot_speed_threshold = 6.0;
  double knot_min_sep = 0.005;

  double cov_center_step = 3.0;  // spacing of the local-fit center grid
  double cov_radius = 3.0;
  double cov_bandwidth = 3.0;
  int cov_restarts = 3;

  EsnSpec esn;
  int esn_burn = 100;
  EsnGrid grid;
  int cv_members = 2;
  std::size_t cv_budget = 0;

  int ensemble = 100;
  int horizons = 3;
  std::vector<double> levels = {0.6, 0.8, 0.95};

  std::uint64_t seed = 1;

  static ExperimentConfig from(const Config& cfg) {
    ExperimentConfig ec;
    ec.wind_path = cfg.get("data.wind", "");
    ec.outdir = cfg.get("data.outdir", "out");
    ec.train_end = cfg.require_int("splits.train_end");
    ec.calib_end = cfg.require_int("splits.calib_end");

    ec.periods = cfg.get_list("harmonics.periods", default_periods());

    ec.knot_grid_step = cfg.get_double("knots.grid_step", 0.25);
    ec.knot_speed_threshold = cfg.get_double("knots.speed_threshold", 6.0);
    ec.knot_min_sep = cfg.get_double("knots.min_sep", 0.005);

    ec.cov_center_step = cfg.get_double("covariance.center_step", 3.0);
    ec.cov_radius = cfg.get_double("covariance.radius", 3.0);
    ec.cov_bandwidth = cfg.get_double("covariance.bandwidth", 3.0);
    ec.cov_restarts = static_cast<int>(cfg.get_int("covariance.restarts", 3));

    ec.esn.n_h = static_cast<int>(cfg.get_int("esn.n_h", 2500));
    ec.esn.m = static_cast<int>(cfg.get_int("esn.m", 1));
    ec.esn.phi = cfg.get_double("esn.phi", 1.0);
    ec.esn.delta = cfg.get_double("esn.delta", 0.9);
    ec.esn.lambda = cfg.get_double("esn.lambda", 0.15);
    ec.esn.a_w = cfg.get_double("esn.a_w", 0.05);
    ec.esn.a_u = cfg.get_double("esn.a_u", 0.01);
    ec.esn.pi_w = cfg.get_double("esn.pi_w", 0.1);
    ec.esn.pi_u = cfg.get_double("esn.pi_u", 0.01);
    ec.esn_burn = static_cast<int>(cfg.get_int("esn.burn", 100));

    auto grid_ints = [&](const std::string& key, std::vector<int> fallback) {
      if (!cfg.has(key)) return fallback;
      std::vector<int> out;
      for (double v : cfg.get_list(key, {})) out.push_back(static_cast<int>(v));
      return out;
    };
    ec.grid.n_h = grid_ints("cv.n_h", {ec.esn.n_h});
    ec.grid.m = grid_ints("cv.m", {ec.esn.m});
    ec.grid.phi = cfg.get_list("cv.phi", {ec.esn.phi});
    ec.grid.delta = cfg.get_list("cv.delta", {ec.esn.delta});
    ec.grid.lambda = cfg.get_list("cv.lambda", {ec.esn.lambda});
    ec.grid.a_w = cfg.get_list("cv.a_w", {ec.esn.a_w});
    ec.grid.a_u = cfg.get_list("cv.a_u", {ec.esn.a_u});
    ec.grid.pi_w = cfg.get_list("cv.pi_w", {ec.esn.pi_w});
    ec.grid.pi_u = cfg.get_list("cv.pi_u", {ec.esn.pi_u});
    ec.cv_members = static_cast<int>(cfg.get_int("cv.ensemble", 2));
    ec.cv_budget = static_cast<std::size_t>(cfg.get_int("cv.budget", 0));

    ec.ensemble = static_cast<int>(cfg.get_int("forecast.ensemble", 100));
    ec.horizons = static_cast<int>(cfg.get_int("forecast.horizons", 3));
    ec.levels = cfg.get_list("calibration.levels", {0.6, 0.8, 0.95});

    ec.seed = static_cast<std::uint64_t>(cfg.get_int("run.seed", 1));
    ec.esn.seed = ec.seed;

    if (ec.train_end <= 0 || ec.calib_end <= ec.train_end)
      throw configuration_error("splits must satisfy 0 < train_end < calib_end");
    return ec;
  }

  /// Probability levels needed to form central intervals at the
  /// configured coverage levels: (1 +- alpha) / 2 for each alpha.
  std::vector<double> quantile_levels() const {
    std::vector<double> probs;
    for (double alpha : levels) {
      probs.push_back((1.0 - alpha) / 2.0);
      probs.push_back((1.0 + alpha) / 2.0);
    }
    return probs;
  }
};

}  // namespace sesn

#endif  // SESN_CONFIG_HPP
