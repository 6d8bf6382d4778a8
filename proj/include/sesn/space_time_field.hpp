#ifndef SESN_SPACE_TIME_FIELD_HPP
#define SESN_SPACE_TIME_FIELD_HPP

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "sesn/errors.hpp"

namespace sesn {

struct Location {
  std::string id;
  double x = 0.0;  // longitude, degrees
  double y = 0.0;  // latitude, degrees
};

inline bool same_coords(const Location& a, const Location& b) {
  return a.x == b.x && a.y == b.y;
}

/// Rectangular array of values over (location list, hourly time index).
/// Rows are times t = start, start+1, ..., columns follow the location list.
struct SpaceTimeField {
  std::vector<Location> locations;
  std::int64_t start = 0;           // time index of the first row, hours
  Eigen::MatrixXd values;           // n_times x n_locations

  SpaceTimeField() = default;
  SpaceTimeField(std::vector<Location> locs, std::int64_t t0, Eigen::MatrixXd vals)
      : locations(std::move(locs)), start(t0), values(std::move(vals)) {
    validate();
  }

  Eigen::Index n_times() const { return values.rows(); }
  Eigen::Index n_locations() const { return values.cols(); }

  /// Time index of row r.
  std::int64_t time_at(Eigen::Index r) const { return start + r; }

  /// Row holding time index t, or -1 when out of range.
  Eigen::Index row_of(std::int64_t t) const {
    const std::int64_t r = t - start;
    return (r >= 0 && r < n_times()) ? static_cast<Eigen::Index>(r) : -1;
  }

  void validate() const {
    if (values.cols() != static_cast<Eigen::Index>(locations.size()))
      throw schema_error("value matrix has " + std::to_string(values.cols()) +
                         " columns but " + std::to_string(locations.size()) +
                         " locations are declared");
    std::unordered_set<std::string> seen;
    for (const auto& loc : locations)
      if (!seen.insert(loc.id).second)
        throw schema_error("duplicate location id '" + loc.id + "'");
  }

  /// Rows for time indices [t_lo, t_hi), same locations.
  SpaceTimeField slice_times(std::int64_t t_lo, std::int64_t t_hi) const {
    const Eigen::Index r0 = row_of(t_lo);
    if (r0 < 0 || t_hi < t_lo || t_hi - start > n_times())
      throw schema_error("time slice [" + std::to_string(t_lo) + ", " +
                         std::to_string(t_hi) + ") outside record [" +
                         std::to_string(start) + ", " +
                         std::to_string(start + n_times()) + ")");
    SpaceTimeField out;
    out.locations = locations;
    out.start = t_lo;
    out.values = values.middleRows(r0, static_cast<Eigen::Index>(t_hi - t_lo));
    return out;
  }

  /// Columns for the given location indices.
  SpaceTimeField select_locations(const std::vector<Eigen::Index>& idx) const {
    SpaceTimeField out;
    out.start = start;
    out.locations.reserve(idx.size());
    out.values.resize(n_times(), static_cast<Eigen::Index>(idx.size()));
    for (std::size_t j = 0; j < idx.size(); ++j) {
      if (idx[j] < 0 || idx[j] >= n_locations())
        throw schema_error("location index out of range: " + std::to_string(idx[j]));
      out.locations.push_back(locations[static_cast<std::size_t>(idx[j])]);
      out.values.col(static_cast<Eigen::Index>(j)) = values.col(idx[j]);
    }
    return out;
  }

  bool all_finite() const { return values.allFinite(); }
};

/// True when both fields declare the same locations in the same order.
inline bool locations_match(const SpaceTimeField& a, const SpaceTimeField& b) {
  if (a.locations.size() != b.locations.size()) return false;
  for (std::size_t i = 0; i < a.locations.size(); ++i)
    if (a.locations[i].id != b.locations[i].id) return false;
  return true;
}

}  // namespace sesn

#endif  // SESN_SPACE_TIME_FIELD_HPP
