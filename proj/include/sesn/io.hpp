#ifndef SESN_IO_HPP
#define SESN_IO_HPP

#include <array>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "sesn/covariance.hpp"
#include "sesn/errors.hpp"
#include "sesn/forecast.hpp"
#include "sesn/harmonics.hpp"
#include "sesn/knots.hpp"
#include "sesn/power.hpp"
#include "sesn/space_time_field.hpp"

// File formats:
//   .stf   binary space-time field: "STF1", uint32 little-endian JSON
//          header length, JSON header, row-major float64 payload
//   .csv   text space-time field: metadata rows (stf/start/step/missing),
//          one id/x/y row per coordinate, "data" sentinel, one row per time
//   .esnm  trained ensemble: "ESNM", JSON header with the spec and member
//          count, then one dense readout matrix per member (weights are
//          regenerated from the member seeds)
//   covariance model and quantiles are line-oriented text tables

namespace sesn {

namespace detail {

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline void write_u32(std::ostream& os, std::uint32_t v) {
  std::array<unsigned char, 4> b{static_cast<unsigned char>(v & 0xff),
                                 static_cast<unsigned char>((v >> 8) & 0xff),
                                 static_cast<unsigned char>((v >> 16) & 0xff),
                                 static_cast<unsigned char>((v >> 24) & 0xff)};
  os.write(reinterpret_cast<const char*>(b.data()), 4);
}

inline std::uint32_t read_u32(std::istream& is) {
  std::array<unsigned char, 4> b{};
  is.read(reinterpret_cast<char*>(b.data()), 4);
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

inline std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// space-time field

inline void write_space_time_binary(const std::string& path, const SpaceTimeField& field) {
  field.validate();
  if (!field.all_finite())
    throw invalid_data_error("cannot write '" + path + "': non-finite values (missing-value "
                             "sentinels are a read-side feature)");
  std::ofstream os(path, std::ios::binary);
  if (!os) throw io_error("cannot open '" + path + "' for writing");

  nlohmann::json header;
  header["version"] = 1;
  header["start"] = field.start;
  header["step_hours"] = 1;
  header["n_times"] = field.n_times();
  auto& locs = header["locations"] = nlohmann::json::array();
  for (const auto& l : field.locations) locs.push_back({{"id", l.id}, {"x", l.x}, {"y", l.y}});
  const std::string hs = header.dump();

  os.write("STF1", 4);
  detail::write_u32(os, static_cast<std::uint32_t>(hs.size()));
  os.write(hs.data(), static_cast<std::streamsize>(hs.size()));
  // row-major payload
  for (Eigen::Index t = 0; t < field.n_times(); ++t)
    for (Eigen::Index j = 0; j < field.n_locations(); ++j) {
      const double v = field.values(t, j);
      os.write(reinterpret_cast<const char*>(&v), sizeof(double));
    }
  if (!os) throw io_error("write failed for '" + path + "'");
}

inline void write_space_time_csv(const std::string& path, const SpaceTimeField& field) {
  field.validate();
  if (!field.all_finite())
    throw invalid_data_error("cannot write '" + path + "': non-finite values");
  std::ofstream os(path);
  if (!os) throw io_error("cannot open '" + path + "' for writing");
  os << "stf,1,csv\n";
  os << "start," << field.start << "\n";
  os << "step,1\n";
  os << "id";
  for (const auto& l : field.locations) {
    if (l.id.find(',') != std::string::npos)
      throw io_error("location id '" + l.id + "' contains a comma");
    os << "," << l.id;
  }
  os << "\nx";
  for (const auto& l : field.locations) os << "," << detail::format_double(l.x);
  os << "\ny";
  for (const auto& l : field.locations) os << "," << detail::format_double(l.y);
  os << "\ndata\n";
  for (Eigen::Index t = 0; t < field.n_times(); ++t) {
    for (Eigen::Index j = 0; j < field.n_locations(); ++j) {
      if (j) os << ",";
      os << detail::format_double(field.values(t, j));
    }
    os << "\n";
  }
  if (!os) throw io_error("write failed for '" + path + "'");
}

/// Writes binary for a ".stf" suffix, CSV otherwise.
inline void write_space_time_file(const std::string& path, const SpaceTimeField& field) {
  if (path.size() >= 4 && path.substr(path.size() - 4) == ".stf")
    write_space_time_binary(path, field);
  else
    write_space_time_csv(path, field);
}

inline SpaceTimeField read_space_time_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw io_error("cannot open '" + path + "'");
  char magic[4] = {};
  is.read(magic, 4);
  if (!is) throw io_error("'" + path + "' is truncated");

  SpaceTimeField field;
  if (std::memcmp(magic, "STF1", 4) == 0) {
    const std::uint32_t hlen = detail::read_u32(is);
    std::string hs(hlen, '\0');
    is.read(hs.data(), hlen);
    nlohmann::json header;
    try {
      header = nlohmann::json::parse(hs);
    } catch (const nlohmann::json::exception& e) {
      throw io_error("'" + path + "': bad header: " + e.what());
    }
    field.start = header.at("start").get<std::int64_t>();
    const auto n_times = header.at("n_times").get<Eigen::Index>();
    for (const auto& l : header.at("locations"))
      field.locations.push_back(
          {l.at("id").get<std::string>(), l.at("x").get<double>(), l.at("y").get<double>()});
    const bool has_missing = header.contains("missing") && !header["missing"].is_null();
    const double missing = has_missing ? header["missing"].get<double>() : 0.0;

    const Eigen::Index n_loc = static_cast<Eigen::Index>(field.locations.size());
    field.values.resize(n_times, n_loc);
    for (Eigen::Index t = 0; t < n_times; ++t)
      for (Eigen::Index j = 0; j < n_loc; ++j) {
        double v;
        is.read(reinterpret_cast<char*>(&v), sizeof(double));
        if (!is) throw io_error("'" + path + "': payload shorter than the header declares");
        if (has_missing && v == missing) v = std::numeric_limits<double>::quiet_NaN();
        else if (!has_missing && std::isnan(v))
          throw invalid_data_error("'" + path + "': NaN without a declared missing sentinel");
        field.values(t, j) = v;
      }
  } else {
    is.close();
    std::ifstream ts(path);
    std::string line;
    std::getline(ts, line);
    auto head = detail::split_csv(line);
    if (head.size() < 3 || head[0] != "stf")
      throw io_error("'" + path + "' is neither an STF1 binary nor an stf CSV file");
    bool has_missing = false;
    double missing = 0.0;
    std::vector<std::string> ids;
    std::vector<double> xs, ys;
    while (std::getline(ts, line)) {
      auto cells = detail::split_csv(line);
      if (cells.empty()) continue;
      if (cells[0] == "start") field.start = std::stoll(cells.at(1));
      else if (cells[0] == "step") {
        if (std::stod(cells.at(1)) != 1.0)
          throw io_error("'" + path + "': only a 1 hour step is supported");
      } else if (cells[0] == "missing") {
        has_missing = true;
        missing = std::stod(cells.at(1));
      } else if (cells[0] == "id") ids.assign(cells.begin() + 1, cells.end());
      else if (cells[0] == "x")
        for (std::size_t i = 1; i < cells.size(); ++i) xs.push_back(std::stod(cells[i]));
      else if (cells[0] == "y")
        for (std::size_t i = 1; i < cells.size(); ++i) ys.push_back(std::stod(cells[i]));
      else if (cells[0] == "data")
        break;
      else
        throw io_error("'" + path + "': unknown metadata row '" + cells[0] + "'");
    }
    if (ids.empty() || ids.size() != xs.size() || ids.size() != ys.size())
      throw io_error("'" + path + "': inconsistent id/x/y rows");
    for (std::size_t i = 0; i < ids.size(); ++i) field.locations.push_back({ids[i], xs[i], ys[i]});

    std::vector<std::vector<double>> rows;
    while (std::getline(ts, line)) {
      if (line.empty()) continue;
      auto cells = detail::split_csv(line);
      if (cells.size() != ids.size())
        throw io_error("'" + path + "': data row with " + std::to_string(cells.size()) +
                       " cells, expected " + std::to_string(ids.size()));
      std::vector<double> row;
      row.reserve(cells.size());
      for (const auto& c : cells) {
        double v = std::stod(c);
        if (has_missing && v == missing) v = std::numeric_limits<double>::quiet_NaN();
        else if (!has_missing && std::isnan(v))
          throw invalid_data_error("'" + path + "': NaN without a declared missing sentinel");
        row.push_back(v);
      }
      rows.push_back(std::move(row));
    }
    field.values.resize(static_cast<Eigen::Index>(rows.size()),
                        static_cast<Eigen::Index>(ids.size()));
    for (std::size_t t = 0; t < rows.size(); ++t)
      for (std::size_t j = 0; j < ids.size(); ++j)
        field.values(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(j)) = rows[t][j];
  }
  field.validate();
  return field;
}

// ---------------------------------------------------------------------------
// knots

inline void write_knots_file(const std::string& path, const KnotSet& knots,
                             const SpaceTimeField& field) {
  nlohmann::json j;
  j["version"] = 1;
  auto& arr = j["knots"] = nlohmann::json::array();
  for (std::size_t i = 0; i < knots.indices.size(); ++i) {
    const auto& loc = field.locations[static_cast<std::size_t>(knots.indices[i])];
    arr.push_back({{"index", knots.indices[i]},
                   {"id", loc.id},
                   {"x", loc.x},
                   {"y", loc.y},
                   {"tag", knots.tags[i] == KnotTag::Grid ? "grid" : "high-wind"}});
  }
  std::ofstream os(path);
  if (!os) throw io_error("cannot open '" + path + "' for writing");
  os << j.dump(1) << "\n";
}

inline KnotSet read_knots_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw io_error("cannot open '" + path + "'");
  nlohmann::json j;
  try {
    is >> j;
  } catch (const nlohmann::json::exception& e) {
    throw io_error("'" + path + "': " + e.what());
  }
  KnotSet knots;
  for (const auto& k : j.at("knots")) {
    knots.indices.push_back(k.at("index").get<Eigen::Index>());
    knots.tags.push_back(k.at("tag").get<std::string>() == "grid" ? KnotTag::Grid
                                                                  : KnotTag::HighWind);
  }
  return knots;
}

// ---------------------------------------------------------------------------
// covariance model

inline void write_covariance_file(const std::string& path, const CovarianceModel& model) {
  std::ofstream os(path);
  if (!os) throw io_error("cannot open '" + path + "' for writing");
  os << "# sesn covariance model v1\n";
  os << "bandwidth " << detail::format_double(model.bandwidth) << "\n";
  os << "# component: cx cy sill smoothness s11 s12 s22 nugget converged\n";
  for (const auto& c : model.components) {
    os << "component " << detail::format_double(c.cx) << " " << detail::format_double(c.cy)
       << " " << detail::format_double(c.sill) << " " << detail::format_double(c.smoothness)
       << " " << detail::format_double(c.kernel(0, 0)) << " "
       << detail::format_double(c.kernel(0, 1)) << " " << detail::format_double(c.kernel(1, 1))
       << " " << detail::format_double(c.nugget) << " " << (c.converged ? 1 : 0) << "\n";
  }
}

inline CovarianceModel read_covariance_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw io_error("cannot open '" + path + "'");
  CovarianceModel model;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    std::string tag;
    ss >> tag;
    if (tag == "bandwidth") {
      ss >> model.bandwidth;
    } else if (tag == "component") {
      CovarianceComponent c;
      double s01;
      int conv;
      ss >> c.cx >> c.cy >> c.sill >> c.smoothness >> c.kernel(0, 0) >> s01 >> c.kernel(1, 1) >>
          c.nugget >> conv;
      if (!ss) throw io_error("'" + path + "': malformed component row");
      c.kernel(0, 1) = s01;
      c.kernel(1, 0) = s01;
      c.converged = conv != 0;
      model.components.push_back(c);
    } else {
      throw io_error("'" + path + "': unknown row '" + tag + "'");
    }
  }
  model.validate();
  return model;
}

// ---------------------------------------------------------------------------
// trained ensemble

struct EnsembleModelFile {
  EsnSpec spec;                       // member i uses seed spec.seed + i
  int burn = 100;
  Eigen::Index n_star = 0;
  std::vector<Eigen::MatrixXd> readouts;  // one B per member
};

inline void write_ensemble_file(const std::string& path, const EnsembleModelFile& m) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw io_error("cannot open '" + path + "' for writing");
  nlohmann::json h;
  h["version"] = 1;
  h["members"] = m.readouts.size();
  h["burn"] = m.burn;
  h["n_star"] = m.n_star;
  h["spec"] = {{"n_h", m.spec.n_h},     {"m", m.spec.m},       {"phi", m.spec.phi},
               {"delta", m.spec.delta}, {"a_w", m.spec.a_w},   {"a_u", m.spec.a_u},
               {"pi_w", m.spec.pi_w},   {"pi_u", m.spec.pi_u}, {"lambda", m.spec.lambda},
               {"seed", m.spec.seed}};
  const std::string hs = h.dump();
  os.write("ESNM", 4);
  detail::write_u32(os, static_cast<std::uint32_t>(hs.size()));
  os.write(hs.data(), static_cast<std::streamsize>(hs.size()));
  for (const auto& B : m.readouts) {
    if (B.rows() != 2 * m.spec.n_h || B.cols() != m.n_star)
      throw schema_error("ensemble file: readout dimensions do not match the spec");
    for (Eigen::Index r = 0; r < B.rows(); ++r)
      for (Eigen::Index c = 0; c < B.cols(); ++c) {
        const double v = B(r, c);
        os.write(reinterpret_cast<const char*>(&v), sizeof(double));
      }
  }
  if (!os) throw io_error("write failed for '" + path + "'");
}

inline EnsembleModelFile read_ensemble_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw io_error("cannot open '" + path + "'");
  char magic[4] = {};
  is.read(magic, 4);
  if (std::memcmp(magic, "ESNM", 4) != 0)
    throw io_error("'" + path + "' is not an ensemble model file");
  const std::uint32_t hlen = detail::read_u32(is);
  std::string hs(hlen, '\0');
  is.read(hs.data(), hlen);
  nlohmann::json h;
  try {
    h = nlohmann::json::parse(hs);
  } catch (const nlohmann::json::exception& e) {
    throw io_error("'" + path + "': bad header: " + e.what());
  }

  EnsembleModelFile m;
  const auto& s = h.at("spec");
  m.spec.n_h = s.at("n_h").get<int>();
  m.spec.m = s.at("m").get<int>();
  m.spec.phi = s.at("phi").get<double>();
  m.spec.delta = s.at("delta").get<double>();
  m.spec.a_w = s.at("a_w").get<double>();
  m.spec.a_u = s.at("a_u").get<double>();
  m.spec.pi_w = s.at("pi_w").get<double>();
  m.spec.pi_u = s.at("pi_u").get<double>();
  m.spec.lambda = s.at("lambda").get<double>();
  m.spec.seed = s.at("seed").get<std::uint64_t>();
  m.burn = h.at("burn").get<int>();
  m.n_star = h.at("n_star").get<Eigen::Index>();
  const auto members = h.at("members").get<std::size_t>();
  m.readouts.resize(members);
  for (auto& B : m.readouts) {
    B.resize(2 * m.spec.n_h, m.n_star);
    for (Eigen::Index r = 0; r < B.rows(); ++r)
      for (Eigen::Index c = 0; c < B.cols(); ++c) {
        double v;
        is.read(reinterpret_cast<char*>(&v), sizeof(double));
        if (!is) throw io_error("'" + path + "': truncated readout payload");
        B(r, c) = v;
      }
  }
  return m;
}

// ---------------------------------------------------------------------------
// calibration quantiles

inline void write_quantiles_file(const std::string& path, const CalibrationQuantiles& cal,
                                 const std::vector<Location>& locations) {
  std::ofstream os(path);
  if (!os) throw io_error("cannot open '" + path + "' for writing");
  os << "location,horizon,level,quantile\n";
  for (int h = 1; h <= cal.horizons(); ++h)
    for (std::size_t l = 0; l < cal.levels.size(); ++l)
      for (Eigen::Index j = 0; j < cal.q[static_cast<std::size_t>(h - 1)].cols(); ++j)
        os << locations[static_cast<std::size_t>(j)].id << "," << h << ","
           << detail::format_double(cal.levels[l]) << ","
           << detail::format_double(cal.q[static_cast<std::size_t>(h - 1)](
                  static_cast<Eigen::Index>(l), j))
           << "\n";
}

inline CalibrationQuantiles read_quantiles_file(const std::string& path,
                                                const std::vector<Location>& locations,
                                                int horizons) {
  std::ifstream is(path);
  if (!is) throw io_error("cannot open '" + path + "'");
  std::string line;
  std::getline(is, line);  // header
  std::map<std::string, Eigen::Index> loc_index;
  for (std::size_t j = 0; j < locations.size(); ++j)
    loc_index[locations[j].id] = static_cast<Eigen::Index>(j);

  std::vector<double> levels;
  std::vector<std::tuple<Eigen::Index, int, double, double>> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    auto cells = detail::split_csv(line);
    if (cells.size() != 4) throw io_error("'" + path + "': malformed quantile row");
    auto it = loc_index.find(cells[0]);
    if (it == loc_index.end())
      throw schema_error("'" + path + "': unknown location '" + cells[0] + "'");
    const int h = std::stoi(cells[1]);
    const double level = std::stod(cells[2]);
    const double value = std::stod(cells[3]);
    bool known = false;
    for (double l : levels) known |= (std::abs(l - level) < 1e-12);
    if (!known) levels.push_back(level);
    rows.emplace_back(it->second, h, level, value);
  }
  std::sort(levels.begin(), levels.end());

  CalibrationQuantiles cal;
  cal.levels = levels;
  cal.q.assign(static_cast<std::size_t>(horizons),
               Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(levels.size()),
                                     static_cast<Eigen::Index>(locations.size())));
  for (const auto& [j, h, level, value] : rows) {
    if (h < 1 || h > horizons) throw schema_error("'" + path + "': horizon out of range");
    cal.q[static_cast<std::size_t>(h - 1)](cal.level_index(level), j) = value;
  }
  return cal;
}

// ---------------------------------------------------------------------------
// harmonic model

inline void write_harmonics_file(const std::string& path, const HarmonicModel& model) {
  std::ofstream os(path);
  if (!os) throw io_error("cannot open '" + path + "' for writing");
  os << "# sesn harmonic model v1\n";
  os << "periods";
  for (double p : model.periods) os << "," << detail::format_double(p);
  os << "\nlocation,x,y,gamma,b0";
  for (std::size_t k = 1; k <= model.periods.size(); ++k)
    os << ",b" << k << "c,b" << k << "s";
  os << "\n";
  for (Eigen::Index j = 0; j < model.n_locations(); ++j) {
    const auto& loc = model.locations[static_cast<std::size_t>(j)];
    os << loc.id << "," << detail::format_double(loc.x) << "," << detail::format_double(loc.y)
       << "," << detail::format_double(model.scale(j));
    for (Eigen::Index r = 0; r < model.coefficients.rows(); ++r)
      os << "," << detail::format_double(model.coefficients(r, j));
    os << "\n";
  }
}

inline HarmonicModel read_harmonics_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw io_error("cannot open '" + path + "'");
  HarmonicModel model;
  std::string line;
  std::vector<std::vector<double>> cols;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    auto cells = detail::split_csv(line);
    if (cells[0] == "periods") {
      for (std::size_t i = 1; i < cells.size(); ++i) model.periods.push_back(std::stod(cells[i]));
    } else if (cells[0] == "location") {
      continue;  // column header
    } else {
      const std::size_t expect = 4 + 1 + 2 * model.periods.size();
      if (cells.size() != expect)
        throw io_error("'" + path + "': row for '" + cells[0] + "' has " +
                       std::to_string(cells.size()) + " cells, expected " +
                       std::to_string(expect));
      model.locations.push_back({cells[0], std::stod(cells[1]), std::stod(cells[2])});
      std::vector<double> col;
      col.push_back(std::stod(cells[3]));  // gamma first
      for (std::size_t i = 4; i < cells.size(); ++i) col.push_back(std::stod(cells[i]));
      cols.push_back(std::move(col));
    }
  }
  if (cols.empty()) throw io_error("'" + path + "': no location rows");
  const Eigen::Index p = 1 + 2 * static_cast<Eigen::Index>(model.periods.size());
  model.coefficients.resize(p, static_cast<Eigen::Index>(cols.size()));
  model.scale.resize(static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) {
    model.scale(static_cast<Eigen::Index>(j)) = cols[j][0];
    for (Eigen::Index r = 0; r < p; ++r)
      model.coefficients(r, static_cast<Eigen::Index>(j)) =
          cols[j][static_cast<std::size_t>(r) + 1];
  }
  return model;
}

// ---------------------------------------------------------------------------
// power curve and turbine registry

inline void write_power_curve_file(const std::string& path, const PowerCurve& curve) {
  curve.validate();
  std::ofstream os(path);
  if (!os) throw io_error("cannot open '" + path + "' for writing");
  os << "# sesn power curve v1\n";
  os << "cut_in," << detail::format_double(curve.cut_in) << "\n";
  os << "rated_speed," << detail::format_double(curve.rated_speed) << "\n";
  os << "cut_out," << detail::format_double(curve.cut_out) << "\n";
  os << "rated_power," << detail::format_double(curve.rated_power) << "\n";
  os << "speed,power\n";
  for (const auto& [s, p] : curve.points)
    os << detail::format_double(s) << "," << detail::format_double(p) << "\n";
}

inline PowerCurve read_power_curve_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw io_error("cannot open '" + path + "'");
  PowerCurve curve;
  curve.points.clear();
  std::string line;
  bool in_points = false;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    auto cells = detail::split_csv(line);
    if (cells[0] == "speed") {
      in_points = true;
    } else if (!in_points) {
      if (cells.size() != 2) throw io_error("'" + path + "': malformed header row");
      const double v = std::stod(cells[1]);
      if (cells[0] == "cut_in") curve.cut_in = v;
      else if (cells[0] == "rated_speed") curve.rated_speed = v;
      else if (cells[0] == "cut_out") curve.cut_out = v;
      else if (cells[0] == "rated_power") curve.rated_power = v;
      else throw io_error("'" + path + "': unknown header '" + cells[0] + "'");
    } else {
      if (cells.size() != 2) throw io_error("'" + path + "': malformed point row");
      curve.points.emplace_back(std::stod(cells[0]), std::stod(cells[1]));
    }
  }
  curve.validate();
  return curve;
}

/// Registry rows: location_id, hub_height, alpha, curve_file (path
/// relative to the registry file).
inline std::vector<TurbineSite> read_turbine_registry(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw io_error("cannot open '" + path + "'");
  const std::filesystem::path base = std::filesystem::path(path).parent_path();
  std::vector<TurbineSite> sites;
  std::string line;
  std::getline(is, line);  // header
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    auto cells = detail::split_csv(line);
    if (cells.size() != 4) throw io_error("'" + path + "': malformed registry row");
    TurbineSite site;
    site.location_id = cells[0];
    site.hub_height = std::stod(cells[1]);
    site.alpha = std::stod(cells[2]);
    site.curve = read_power_curve_file((base / cells[3]).string());
    site.validate();
    sites.push_back(std::move(site));
  }
  if (sites.empty()) throw io_error("'" + path + "': no turbine rows");
  return sites;
}

// ---------------------------------------------------------------------------
// run manifest

/// FNV-1a hash of a string; keys run manifests and weight caches.
inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

inline void write_manifest(const std::string& outdir, const std::string& command,
                           std::uint64_t config_hash, std::uint64_t seed,
                           const std::vector<std::string>& inputs,
                           const std::vector<std::string>& outputs,
                           const std::string& version) {
  nlohmann::json j;
  j["command"] = command;
  j["version"] = version;
  j["config_hash"] = config_hash;
  j["seed"] = seed;
  j["inputs"] = inputs;
  j["outputs"] = outputs;
  std::filesystem::create_directories(outdir);
  const std::string path = outdir + "/manifest-" + command + ".json";
  std::ofstream os(path);
  if (!os) throw io_error("cannot open '" + path + "' for writing");
  os << j.dump(1) << "\n";
}

}  // namespace sesn

#endif  // SESN_IO_HPP
