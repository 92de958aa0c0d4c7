#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace corrlearn {

inline constexpr std::size_t kFeatureDim = 7;

enum FeatureIndex : std::size_t {
  kObstacleDist = 0,
  kDoorDist = 1,
  kStairDist = 2,
  kChairDist = 3,
  kCrossTrack = 4,
  kAlongTrack = 5,
  kLateralDisp = 6,
};

using FeatureVector = std::array<double, kFeatureDim>;

struct Point {
  double x = 0.0;
  double y = 0.0;
};

struct Pose {
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;  // (-pi, pi]
};

double normalize_angle(double angle);

enum class SemanticChannel : std::size_t { kDoors = 0, kStairs = 1, kChairs = 2 };
inline constexpr std::size_t kSemanticChannels = 3;

// Raw map document contents, before validation.
struct MapData {
  double resolution = 0.0;
  std::vector<std::string> grid;  // row 0 is the minimum-y row
  std::array<std::vector<Point>, kSemanticChannels> semantic;
  std::vector<Point> path;
  Pose start;
};

// Validated, immutable occupancy map. Cell (row, col) covers
// [col*res, (col+1)*res) x [row*res, (row+1)*res) in world meters.
class Map {
 public:
  explicit Map(MapData data);

  double resolution() const { return data_.resolution; }
  int rows() const { return rows_; }
  int cols() const { return cols_; }
  const MapData& data() const { return data_; }
  const std::vector<Point>& path() const { return data_.path; }
  const std::vector<double>& path_arclength() const { return arclength_; }
  double path_length() const { return arclength_.back(); }
  const std::vector<Point>& objects(SemanticChannel channel) const {
    return data_.semantic[static_cast<std::size_t>(channel)];
  }
  const Pose& start_pose() const { return data_.start; }

  bool cell_occupied(int row, int col) const;
  // Out-of-bounds points count as occupied.
  bool occupied(Point p) const;
  // Distance from the center of p's cell to the nearest occupied cell center;
  // 0 outside the grid, +inf when the grid has no occupied cell.
  double obstacle_distance(Point p) const;

 private:
  MapData data_;
  int rows_ = 0;
  int cols_ = 0;
  std::vector<std::uint8_t> occupancy_;
  std::vector<double> obstacle_distance_;
  std::vector<double> arclength_;
};

Map parse_map(const nlohmann::json& document);
Map load_map(std::string_view document);
Map load_map_file(const std::string& path);
nlohmann::json map_to_json(const Map& map);

struct Trajectory {
  std::size_t index = 0;
  double curvature = 0.0;  // 1/m, positive turns left
  double length = 1.0;
  Pose origin;
  std::vector<Pose> samples;  // at arc lengths length*i/n, i = 1..n
  Pose endpoint;

  // Dense rendering of the arc from origin to endpoint.
  std::vector<Point> polyline(std::size_t segments) const;
};

struct ActionSpec {
  std::size_t k = 64;
  double kappa_max = 1.0;
  std::size_t samples = 8;
  double length = 1.0;
};

Pose arc_pose(const Pose& origin, double curvature, double arc_length);
Trajectory make_trajectory(const Pose& origin, double curvature,
                           std::size_t index, std::size_t samples = 8,
                           double length = 1.0);
std::vector<Trajectory> generate_action_set(const Pose& pose, std::size_t k,
                                            double kappa_max,
                                            std::size_t samples = 8);
std::vector<Trajectory> generate_action_set(const Pose& pose,
                                            const ActionSpec& spec);

struct WorldState {
  Pose pose;
  std::size_t path_cursor = 0;
  std::uint64_t step_count = 0;
  std::uint64_t reset_count = 0;  // collision resets
  std::uint64_t lap_count = 0;    // path completions, also returned to start
};

WorldState initial_state(const Map& map);

struct PathProjection {
  std::size_t segment = 0;
  double progress = 0.0;  // arc length along the path
  double distance = 0.0;
};

// Nearest point on the path, searching segments near the cursor only so the
// projection cannot jump to a later part of a path that folds back on itself.
PathProjection project_onto_path(const Map& map, Point p, std::size_t cursor);

struct PathReference {
  Point point;
  Point tangent;  // unit
};

// Reference point 1 m ahead (along the path) of the pose's projection.
PathReference path_reference(const Map& map, const WorldState& state,
                             double lookahead = 1.0);

FeatureVector features(const Map& map, const WorldState& state,
                       const Trajectory& traj, double clip = 3.0);
std::vector<FeatureVector> features(const Map& map, const WorldState& state,
                                    std::span<const Trajectory> actions,
                                    double clip = 3.0);

std::vector<std::size_t> mask_colliding(const Map& map,
                                        std::span<const Trajectory> actions);

// Executes traj. Returns to the start pose when the path end is reached or
// when no action from the new pose is collision free.
WorldState step(const Map& map, const WorldState& world, const Trajectory& traj,
                const ActionSpec& spec = {});

}  // namespace corrlearn
