#pragma once

// Shared generators and independent oracles. Oracles here re-derive values
// from first principles and never call the library routine they check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "experiment.hpp"
#include "learner.hpp"
#include "world.hpp"

namespace support {

using namespace corrlearn;

inline std::string source_path(const std::string& rel) {
  return std::string(CORRLEARN_SOURCE_DIR) + "/" + rel;
}

struct Gen {
  std::mt19937_64 rng;
  explicit Gen(std::uint64_t seed) : rng(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
  std::size_t index(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); }
  bool coin() { return index(2) == 1; }

  FeatureVector features(double scale = 5.0) {
    FeatureVector f;
    for (double& v : f) v = uniform(-scale, scale);
    return f;
  }
  Weights weights(double scale = 3.0) {
    Weights w;
    for (double& v : w.values) v = uniform(-scale, scale);
    return w;
  }
  std::vector<FeatureVector> feature_set(std::size_t k, double scale = 5.0) {
    std::vector<FeatureVector> out(k);
    for (auto& f : out) f = features(scale);
    return out;
  }
  std::vector<double> losses(std::size_t k, double scale = 10.0) {
    std::vector<double> out(k);
    for (double& v : out) v = uniform(0.0, scale);
    out[index(k)] = 0.0;
    return out;
  }
};

inline MapData map_data(std::vector<std::string> grid, double res, std::vector<Point> path,
                        Pose start) {
  MapData d;
  d.resolution = res;
  d.grid = std::move(grid);
  d.path = std::move(path);
  d.start = start;
  return d;
}

// rows x cols grid of '.' with the given cells set to '#'.
inline std::vector<std::string> blank_grid(int rows, int cols) {
  return std::vector<std::string>(rows, std::string(cols, '.'));
}

inline double euclid(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

inline double oracle_nearest(const std::vector<Point>& objects, Point p) {
  double best = std::numeric_limits<double>::infinity();
  for (Point o : objects) best = std::min(best, euclid(o, p));
  return best;
}

// Point-in-cell test straight from the grid strings.
inline bool oracle_occupied(const std::vector<std::string>& grid, double res, Point p) {
  const double cx = std::floor(p.x / res);
  const double cy = std::floor(p.y / res);
  if (cx < 0 || cy < 0 || cy >= static_cast<double>(grid.size()) ||
      cx >= static_cast<double>(grid[0].size()))
    return true;
  return grid[static_cast<std::size_t>(cy)][static_cast<std::size_t>(cx)] == '#';
}

// Brute force over every occupied cell center.
inline double oracle_obstacle_distance(const std::vector<std::string>& grid, double res,
                                       Point p) {
  const double cx = std::floor(p.x / res);
  const double cy = std::floor(p.y / res);
  if (cx < 0 || cy < 0 || cy >= static_cast<double>(grid.size()) ||
      cx >= static_cast<double>(grid[0].size()))
    return 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < grid.size(); ++r)
    for (std::size_t c = 0; c < grid[r].size(); ++c)
      if (grid[r][c] == '#')
        best = std::min(best, res * std::hypot(static_cast<double>(c) - cx,
                                               static_cast<double>(r) - cy));
  return best;
}

// Constant-curvature arc from the origin heading along +x.
inline Pose oracle_arc(double kappa, double s) {
  if (kappa == 0.0) return {s, 0.0, 0.0};
  return {std::sin(kappa * s) / kappa, (1.0 - std::cos(kappa * s)) / kappa, kappa * s};
}

inline Pose oracle_arc_from(const Pose& origin, double kappa, double s) {
  const Pose local = oracle_arc(kappa, s);
  const double c = std::cos(origin.heading), sn = std::sin(origin.heading);
  return {origin.x + c * local.x - sn * local.y, origin.y + sn * local.x + c * local.y,
          normalize_angle(origin.heading + local.heading)};
}

inline double oracle_dot(const FeatureVector& a, const FeatureVector& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline std::size_t oracle_argmax(const Weights& w, const std::vector<FeatureVector>& phi,
                                 const std::vector<std::size_t>& selectable) {
  std::size_t best = selectable.front();
  double best_score = -std::numeric_limits<double>::infinity();
  for (std::size_t i : selectable) {
    const double s = oracle_dot(w.values, phi[i]);
    if (s > best_score) {
      best_score = s;
      best = i;
    }
  }
  return best;
}

inline std::vector<std::size_t> all_indices(std::size_t k) {
  std::vector<std::size_t> out(k);
  for (std::size_t i = 0; i < k; ++i) out[i] = i;
  return out;
}

// max_i [delta_i + w.phi_i] - w.phi_best, straight from the definition.
inline double oracle_hinge(const Weights& w, const std::vector<FeatureVector>& phi,
                           const std::vector<double>& delta, std::size_t best) {
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < phi.size(); ++i)
    m = std::max(m, delta[i] + oracle_dot(w.values, phi[i]));
  return m - oracle_dot(w.values, phi[best]);
}

inline double oracle_norm(const FeatureVector& a, const FeatureVector& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

inline ExperimentConfig quick_config(const std::string& name = "configs/quick.json") {
  return load_config(source_path(name));
}

}  // namespace support
