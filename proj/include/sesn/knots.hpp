#ifndef SESN_KNOTS_HPP
#define SESN_KNOTS_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "sesn/errors.hpp"
#include "sesn/space_time_field.hpp"

namespace sesn {

enum class KnotTag : std::uint8_t { Grid, HighWind };

struct KnotSet {
  std::vector<Eigen::Index> indices;  // into the field's location list
  std::vector<KnotTag> tags;

  std::size_t size() const { return indices.size(); }

  std::vector<Location> locations(const SpaceTimeField& field) const {
    std::vector<Location> out;
    out.reserve(indices.size());
    for (auto i : indices) out.push_back(field.locations[static_cast<std::size_t>(i)]);
    return out;
  }
};

/// Knot selection: (a) for each cell of a regular grid over the bounding
/// box, the data location nearest to the cell center; (b) locations whose
/// training-mean speed exceeds `speed_threshold`, scanned windiest-first
/// and thinned so every kept pair differs by at least `min_sep` in
/// longitude or latitude. High-wind membership wins on overlap.
inline KnotSet select_knots(const SpaceTimeField& field, double grid_step,
                            double speed_threshold, double min_sep) {
  if (field.n_locations() == 0 || field.n_times() == 0)
    throw configuration_error("select_knots: field is empty");
  if (!(grid_step > 0.0) || !(speed_threshold > 0.0) || !(min_sep > 0.0))
    throw configuration_error("select_knots: parameters must be positive");

  const auto& locs = field.locations;
  const Eigen::Index n = field.n_locations();

  double xmin = locs[0].x, xmax = locs[0].x, ymin = locs[0].y, ymax = locs[0].y;
  for (const auto& l : locs) {
    xmin = std::min(xmin, l.x);
    xmax = std::max(xmax, l.x);
    ymin = std::min(ymin, l.y);
    ymax = std::max(ymax, l.y);
  }

  std::unordered_map<Eigen::Index, KnotTag> chosen;

  const int nx = std::max(1, static_cast<int>(std::ceil((xmax - xmin) / grid_step)));
  const int ny = std::max(1, static_cast<int>(std::ceil((ymax - ymin) / grid_step)));
  for (int ix = 0; ix < nx; ++ix) {
    for (int iy = 0; iy < ny; ++iy) {
      const double cx = xmin + (ix + 0.5) * grid_step;
      const double cy = ymin + (iy + 0.5) * grid_step;
      Eigen::Index best = 0;
      double best_d2 = std::numeric_limits<double>::infinity();
      for (Eigen::Index j = 0; j < n; ++j) {
        const double dx = locs[static_cast<std::size_t>(j)].x - cx;
        const double dy = locs[static_cast<std::size_t>(j)].y - cy;
        const double d2 = dx * dx + dy * dy;
        if (d2 < best_d2) {  // ties keep the lowest index, i.e. first in id order
          best_d2 = d2;
          best = j;
        }
      }
      chosen.emplace(best, KnotTag::Grid);
    }
  }

  // high-wind pass, windiest first
  const Eigen::VectorXd means = field.values.colwise().mean();
  std::vector<Eigen::Index> windy;
  for (Eigen::Index j = 0; j < n; ++j)
    if (means(j) > speed_threshold) windy.push_back(j);
  std::sort(windy.begin(), windy.end(),
            [&](Eigen::Index a, Eigen::Index b) { return means(a) > means(b); });

  std::vector<Eigen::Index> kept_windy;
  for (Eigen::Index j : windy) {
    const auto& lj = locs[static_cast<std::size_t>(j)];
    bool ok = true;
    for (Eigen::Index k : kept_windy) {
      const auto& lk = locs[static_cast<std::size_t>(k)];
      if (std::abs(lj.x - lk.x) < min_sep && std::abs(lj.y - lk.y) < min_sep) {
        ok = false;
        break;
      }
    }
    if (ok) {
      kept_windy.push_back(j);
      chosen[j] = KnotTag::HighWind;  // overrides a grid tag
    }
  }

  KnotSet out;
  out.indices.reserve(chosen.size());
  for (const auto& [idx, tag] : chosen) out.indices.push_back(idx);
  std::sort(out.indices.begin(), out.indices.end());
  out.tags.reserve(out.indices.size());
  for (auto idx : out.indices) out.tags.push_back(chosen.at(idx));

  if (out.indices.empty()) throw configuration_error("select_knots: selection is empty");
  return out;
}

}  // namespace sesn

#endif  // SESN_KNOTS_HPP
