#include "world.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "error.hpp"

namespace corrlearn {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kProjectionWindow = 3.0;  // meters of path searched ahead
constexpr double kLapTolerance = 0.5;

[[noreturn]] void parse_error(const std::string& field, const std::string& why) {
  throw Error(ErrorKind::kParse, "map: field '" + field + "' " + why);
}

[[noreturn]] void validation_error(const std::string& why) {
  throw Error(ErrorKind::kValidation, "map: " + why);
}

// Felzenszwalb & Huttenlocher 1D squared distance transform.
void distance_transform_1d(std::span<const double> f, std::span<double> out) {
  const int n = static_cast<int>(f.size());
  std::vector<int> v(n);
  std::vector<double> z(n + 1);
  int k = 0;
  v[0] = 0;
  z[0] = -kInf;
  z[1] = kInf;
  for (int q = 1; q < n; ++q) {
    auto intersect = [&](int p) {
      return ((f[q] + q * q) - (f[p] + p * p)) / (2.0 * q - 2.0 * p);
    };
    double s = intersect(v[k]);
    while (s <= z[k]) {
      --k;
      s = intersect(v[k]);
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = kInf;
  }
  k = 0;
  for (int q = 0; q < n; ++q) {
    while (z[k + 1] < q) ++k;
    const double d = q - v[k];
    out[q] = d * d + f[v[k]];
  }
}

double dist(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

Point point_at(const Map& map, double s, std::size_t* segment) {
  const auto& path = map.path();
  const auto& arc = map.path_arclength();
  s = std::clamp(s, 0.0, arc.back());
  std::size_t i = 0;
  while (i + 2 < path.size() && arc[i + 1] < s) ++i;
  *segment = i;
  const double seg_len = arc[i + 1] - arc[i];
  const double t = seg_len > 0.0 ? (s - arc[i]) / seg_len : 0.0;
  return {path[i].x + t * (path[i + 1].x - path[i].x),
          path[i].y + t * (path[i + 1].y - path[i].y)};
}

double nearest_object(std::span<const Point> objects, Point p) {
  double best = kInf;
  for (const Point& o : objects) best = std::min(best, dist(o, p));
  return best;
}

Point point_from_json(const nlohmann::json& j, const std::string& field) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    parse_error(field, "must contain [x, y] number pairs");
  return {j[0].get<double>(), j[1].get<double>()};
}

std::vector<Point> points_from_json(const nlohmann::json& doc,
                                    const std::string& field, bool required) {
  std::vector<Point> out;
  if (!doc.contains(field)) {
    if (required) parse_error(field, "is missing");
    return out;
  }
  const auto& arr = doc.at(field);
  if (!arr.is_array()) parse_error(field, "must be an array");
  for (const auto& p : arr) out.push_back(point_from_json(p, field));
  return out;
}

nlohmann::json points_to_json(const std::vector<Point>& points) {
  auto arr = nlohmann::json::array();
  for (const Point& p : points) arr.push_back({p.x, p.y});
  return arr;
}

constexpr std::array<const char*, kSemanticChannels> kChannelFields = {
    "doors", "stairs", "chairs"};

}  // namespace

double normalize_angle(double angle) {
  double a = std::remainder(angle, 2.0 * std::numbers::pi);
  if (a <= -std::numbers::pi) a += 2.0 * std::numbers::pi;
  return a;
}

Map::Map(MapData data) : data_(std::move(data)) {
  if (!(data_.resolution > 0.0) || !std::isfinite(data_.resolution))
    validation_error("resolution must be a positive number");
  if (data_.grid.empty() || data_.grid.front().empty())
    validation_error("grid must be non-empty");
  rows_ = static_cast<int>(data_.grid.size());
  cols_ = static_cast<int>(data_.grid.front().size());
  occupancy_.resize(static_cast<std::size_t>(rows_) * cols_);
  for (int r = 0; r < rows_; ++r) {
    const std::string& row = data_.grid[r];
    if (static_cast<int>(row.size()) != cols_)
      validation_error("grid rows must all have the same width");
    for (int c = 0; c < cols_; ++c) {
      if (row[c] != '.' && row[c] != '#')
        validation_error("grid may only contain '.' and '#'");
      occupancy_[static_cast<std::size_t>(r) * cols_ + c] = row[c] == '#';
    }
  }

  const double width = cols_ * data_.resolution;
  const double height = rows_ * data_.resolution;
  auto inside = [&](Point p) {
    return p.x >= 0.0 && p.y >= 0.0 && p.x < width && p.y < height;
  };
  for (std::size_t ch = 0; ch < kSemanticChannels; ++ch)
    for (const Point& p : data_.semantic[ch])
      if (!inside(p))
        validation_error(std::string(kChannelFields[ch]) +
                         " point lies outside the grid");

  if (data_.path.size() < 2) validation_error("path needs at least 2 waypoints");
  arclength_.assign(1, 0.0);
  for (std::size_t i = 1; i < data_.path.size(); ++i) {
    const double len = dist(data_.path[i - 1], data_.path[i]);
    if (!(len > 0.0)) validation_error("path has repeated consecutive waypoints");
    arclength_.push_back(arclength_.back() + len);
  }

  if (!std::isfinite(data_.start.x) || !std::isfinite(data_.start.y) ||
      !std::isfinite(data_.start.heading))
    validation_error("start pose must be finite");
  data_.start.heading = normalize_angle(data_.start.heading);
  if (occupied({data_.start.x, data_.start.y}))
    validation_error("start pose lies in an occupied cell");

  // Exact Euclidean distance transform over cell centers: columns, then rows.
  const double big = 1e20;
  std::vector<double> sq(occupancy_.size());
  bool any = false;
  for (std::size_t i = 0; i < occupancy_.size(); ++i) {
    sq[i] = occupancy_[i] ? 0.0 : big;
    any = any || occupancy_[i];
  }
  obstacle_distance_.assign(occupancy_.size(), kInf);
  if (!any) return;
  std::vector<double> f(rows_), out(rows_);
  for (int c = 0; c < cols_; ++c) {
    for (int r = 0; r < rows_; ++r) f[r] = sq[static_cast<std::size_t>(r) * cols_ + c];
    distance_transform_1d(f, out);
    for (int r = 0; r < rows_; ++r) sq[static_cast<std::size_t>(r) * cols_ + c] = out[r];
  }
  f.resize(cols_);
  out.resize(cols_);
  for (int r = 0; r < rows_; ++r) {
    std::copy_n(sq.begin() + static_cast<std::ptrdiff_t>(r) * cols_, cols_, f.begin());
    distance_transform_1d(f, out);
    for (int c = 0; c < cols_; ++c)
      obstacle_distance_[static_cast<std::size_t>(r) * cols_ + c] =
          std::sqrt(out[c]) * data_.resolution;
  }
}

bool Map::cell_occupied(int row, int col) const {
  if (row < 0 || col < 0 || row >= rows_ || col >= cols_) return true;
  return occupancy_[static_cast<std::size_t>(row) * cols_ + col] != 0;
}

bool Map::occupied(Point p) const {
  return cell_occupied(static_cast<int>(std::floor(p.y / data_.resolution)),
                       static_cast<int>(std::floor(p.x / data_.resolution)));
}

double Map::obstacle_distance(Point p) const {
  const int row = static_cast<int>(std::floor(p.y / data_.resolution));
  const int col = static_cast<int>(std::floor(p.x / data_.resolution));
  if (row < 0 || col < 0 || row >= rows_ || col >= cols_) return 0.0;
  return obstacle_distance_[static_cast<std::size_t>(row) * cols_ + col];
}

Map parse_map(const nlohmann::json& doc) {
  if (!doc.is_object()) parse_error("<root>", "must be a JSON object");
  MapData data;
  if (!doc.contains("resolution")) parse_error("resolution", "is missing");
  if (!doc["resolution"].is_number()) parse_error("resolution", "must be a number");
  data.resolution = doc["resolution"].get<double>();

  if (!doc.contains("grid")) parse_error("grid", "is missing");
  if (!doc["grid"].is_array()) parse_error("grid", "must be an array of strings");
  for (const auto& row : doc["grid"]) {
    if (!row.is_string()) parse_error("grid", "must be an array of strings");
    data.grid.push_back(row.get<std::string>());
  }
  for (std::size_t ch = 0; ch < kSemanticChannels; ++ch)
    data.semantic[ch] = points_from_json(doc, kChannelFields[ch], false);
  data.path = points_from_json(doc, "path", true);

  if (!doc.contains("start")) parse_error("start", "is missing");
  const auto& s = doc["start"];
  if (!s.is_array() || s.size() != 3 ||
      !std::all_of(s.begin(), s.end(), [](const auto& v) { return v.is_number(); }))
    parse_error("start", "must be [x, y, heading]");
  data.start = {s[0].get<double>(), s[1].get<double>(), s[2].get<double>()};
  return Map(std::move(data));
}

Map load_map(std::string_view document) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(document);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::kParse, std::string("map: invalid JSON: ") + e.what());
  }
  return parse_map(doc);
}

Map load_map_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open map file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return load_map(buffer.str());
}

nlohmann::json map_to_json(const Map& map) {
  const MapData& d = map.data();
  nlohmann::json doc;
  doc["resolution"] = d.resolution;
  doc["grid"] = d.grid;
  for (std::size_t ch = 0; ch < kSemanticChannels; ++ch)
    doc[kChannelFields[ch]] = points_to_json(d.semantic[ch]);
  doc["path"] = points_to_json(d.path);
  doc["start"] = {d.start.x, d.start.y, d.start.heading};
  return doc;
}

Pose arc_pose(const Pose& origin, double curvature, double s) {
  double forward = s;
  double left = 0.0;
  if (curvature != 0.0) {
    const double half = 0.5 * curvature * s;
    forward = std::sin(curvature * s) / curvature;
    left = 2.0 * std::sin(half) * std::sin(half) / curvature;
  }
  const double c = std::cos(origin.heading);
  const double sn = std::sin(origin.heading);
  return {origin.x + c * forward - sn * left, origin.y + sn * forward + c * left,
          normalize_angle(origin.heading + curvature * s)};
}

Trajectory make_trajectory(const Pose& origin, double curvature,
                           std::size_t index, std::size_t samples, double length) {
  require(samples >= 1, "trajectory needs at least one sample");
  Trajectory traj;
  traj.index = index;
  traj.curvature = curvature;
  traj.length = length;
  traj.origin = origin;
  traj.samples.reserve(samples);
  for (std::size_t i = 1; i <= samples; ++i)
    traj.samples.push_back(arc_pose(origin, curvature,
                                    length * static_cast<double>(i) / samples));
  traj.endpoint = traj.samples.back();
  return traj;
}

std::vector<Point> Trajectory::polyline(std::size_t segments) const {
  std::vector<Point> pts;
  pts.reserve(segments + 1);
  for (std::size_t i = 0; i <= segments; ++i) {
    const Pose p = arc_pose(origin, curvature, length * static_cast<double>(i) / segments);
    pts.push_back({p.x, p.y});
  }
  return pts;
}

std::vector<Trajectory> generate_action_set(const Pose& pose, std::size_t k,
                                            double kappa_max, std::size_t samples) {
  require(k >= 2, "action set needs k >= 2");
  require(kappa_max > 0.0, "kappa_max must be positive");
  std::vector<Trajectory> actions;
  actions.reserve(k);
  const double spacing = 2.0 * kappa_max / static_cast<double>(k - 1);
  for (std::size_t i = 0; i < k; ++i) {
    // Symmetric construction so index i and k-1-i are exact mirrors.
    const std::size_t mirror = k - 1 - i;
    double kappa = i <= mirror ? -kappa_max + spacing * static_cast<double>(i)
                               : kappa_max - spacing * static_cast<double>(mirror);
    if (2 * i == k - 1) kappa = 0.0;
    actions.push_back(make_trajectory(pose, kappa, i, samples));
  }
  return actions;
}

std::vector<Trajectory> generate_action_set(const Pose& pose, const ActionSpec& spec) {
  return generate_action_set(pose, spec.k, spec.kappa_max, spec.samples);
}

WorldState initial_state(const Map& map) {
  WorldState s;
  s.pose = map.start_pose();
  return s;
}

PathProjection project_onto_path(const Map& map, Point p, std::size_t cursor) {
  const auto& path = map.path();
  const auto& arc = map.path_arclength();
  const std::size_t last_segment = path.size() - 2;
  cursor = std::min(cursor, path.size() - 1);
  const std::size_t first = std::min(cursor > 0 ? cursor - 1 : 0, last_segment);
  const double horizon = arc[cursor] + kProjectionWindow;

  PathProjection best;
  best.distance = kInf;
  for (std::size_t i = first; i <= last_segment; ++i) {
    if (i > first && arc[i] > horizon) break;
    const Point a = path[i];
    const Point b = path[i + 1];
    const double len = arc[i + 1] - arc[i];
    double t = ((p.x - a.x) * (b.x - a.x) + (p.y - a.y) * (b.y - a.y)) / (len * len);
    t = std::clamp(t, 0.0, 1.0);
    const Point q{a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)};
    const double d = dist(p, q);
    if (d < best.distance) best = {i, arc[i] + t * len, d};
  }
  return best;
}

PathReference path_reference(const Map& map, const WorldState& state, double lookahead) {
  const PathProjection proj =
      project_onto_path(map, {state.pose.x, state.pose.y}, state.path_cursor);
  std::size_t segment = 0;
  const Point ref = point_at(map, proj.progress + lookahead, &segment);
  const Point a = map.path()[segment];
  const Point b = map.path()[segment + 1];
  const double len = dist(a, b);
  return {ref, {(b.x - a.x) / len, (b.y - a.y) / len}};
}

namespace {

FeatureVector features_with_reference(const Map& map, const PathReference& ref,
                                      const Trajectory& traj, double clip) {
  FeatureVector phi{};
  for (const Pose& s : traj.samples) {
    const Point p{s.x, s.y};
    phi[kObstacleDist] += std::min(clip, map.obstacle_distance(p));
    phi[kDoorDist] += std::min(clip, nearest_object(map.objects(SemanticChannel::kDoors), p));
    phi[kStairDist] += std::min(clip, nearest_object(map.objects(SemanticChannel::kStairs), p));
    phi[kChairDist] += std::min(clip, nearest_object(map.objects(SemanticChannel::kChairs), p));
    const double dx = p.x - ref.point.x;
    const double dy = p.y - ref.point.y;
    phi[kAlongTrack] += std::abs(dx * ref.tangent.x + dy * ref.tangent.y);
    phi[kCrossTrack] += std::abs(ref.tangent.x * dy - ref.tangent.y * dx);
  }
  // Endpoint offset in the robot frame is (forward, left); right is positive.
  if (traj.curvature != 0.0) {
    const double half = 0.5 * traj.curvature * traj.length;
    phi[kLateralDisp] = -2.0 * std::sin(half) * std::sin(half) / traj.curvature;
  }
  return phi;
}

}  // namespace

FeatureVector features(const Map& map, const WorldState& state,
                       const Trajectory& traj, double clip) {
  require(clip > 0.0, "feature clip must be positive");
  return features_with_reference(map, path_reference(map, state), traj, clip);
}

std::vector<FeatureVector> features(const Map& map, const WorldState& state,
                                    std::span<const Trajectory> actions, double clip) {
  require(clip > 0.0, "feature clip must be positive");
  const PathReference ref = path_reference(map, state);
  std::vector<FeatureVector> out;
  out.reserve(actions.size());
  for (const Trajectory& t : actions) out.push_back(features_with_reference(map, ref, t, clip));
  return out;
}

std::vector<std::size_t> mask_colliding(const Map& map, std::span<const Trajectory> actions) {
  require(!actions.empty(), "mask_colliding needs at least one action");
  std::vector<std::size_t> free;
  for (std::size_t i = 0; i < actions.size(); ++i) {
    const auto& samples = actions[i].samples;
    const bool clear = std::none_of(samples.begin(), samples.end(), [&](const Pose& s) {
      return map.occupied({s.x, s.y});
    });
    if (clear) free.push_back(i);
  }
  return free;
}

WorldState step(const Map& map, const WorldState& world, const Trajectory& traj,
                const ActionSpec& spec) {
  WorldState next = world;
  next.pose = traj.endpoint;
  next.step_count += 1;

  const PathProjection proj =
      project_onto_path(map, {next.pose.x, next.pose.y}, world.path_cursor);
  const auto& arc = map.path_arclength();
  std::size_t ahead = arc.size() - 1;
  for (std::size_t j = 1; j < arc.size(); ++j) {
    if (arc[j] > proj.progress) {
      ahead = j;
      break;
    }
  }
  next.path_cursor = std::max(world.path_cursor, ahead);

  auto back_to_start = [&] {
    next.pose = map.start_pose();
    next.path_cursor = 0;
  };
  if (map.path_length() - proj.progress < kLapTolerance) {
    back_to_start();
    next.lap_count += 1;
    return next;
  }
  const auto actions = generate_action_set(next.pose, spec);
  if (mask_colliding(map, actions).empty()) {
    back_to_start();
    next.reset_count += 1;
  }
  return next;
}

}  // namespace corrlearn
