// Maze geometry for the swarm simulator: walls, rewards, spawn regions,
// line-of-sight and wall-aware motion clipping.
//
// Coordinates are in "points", the length unit used throughout the
// simulator. Walls are closed line segments; the maze bounds act as four
// additional implicit walls for motion clipping.
#pragma once

#include <cmath>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json_fwd.hpp>

namespace swarmbo {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
  friend Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
  friend Point operator*(double s, Point p) { return {s * p.x, s * p.y}; }
  friend Point operator*(Point p, double s) { return {s * p.x, s * p.y}; }
  Point &operator+=(Point o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  friend bool operator==(Point a, Point b) = default;
};

inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point a) { return std::hypot(a.x, a.y); }
inline double distance(Point a, Point b) { return norm(b - a); }

struct WallSegment {
  Point a;
  Point b;
};

struct Rect {
  double xmin = 0.0;
  double ymin = 0.0;
  double xmax = 0.0;
  double ymax = 0.0;

  double width() const { return xmax - xmin; }
  double height() const { return ymax - ymin; }
  double area() const { return width() * height(); }
  /// Strict interior test.
  bool contains(Point p) const {
    return p.x > xmin && p.x < xmax && p.y > ymin && p.y < ymax;
  }
  bool contains(const Rect &r) const {
    return r.xmin >= xmin && r.xmax <= xmax && r.ymin >= ymin &&
           r.ymax <= ymax;
  }
};

struct SpawnRegion {
  enum class Kind { UniformBounds, Rect };
  Kind kind = Kind::UniformBounds;
  Rect rect;  // used when kind == Rect
};

struct MazeSpec {
  std::string name;
  Rect bounds;
  std::vector<WallSegment> walls;
  std::vector<Point> rewards;
  SpawnRegion spawn;
  std::string note;

  std::size_t num_rewards() const { return rewards.size(); }
  Rect spawn_rect() const {
    return spawn.kind == SpawnRegion::Kind::Rect ? spawn.rect : bounds;
  }
};

/// Raised for malformed maze files and violated maze invariants. `path()`
/// names the offending field, e.g. "rewards[2]".
class MazeError : public std::runtime_error {
public:
  MazeError(std::string path, const std::string &what)
      : std::runtime_error(path + ": " + what), path_(std::move(path)) {}
  const std::string &path() const noexcept { return path_; }

private:
  std::string path_;
};

/// Distance by which clip_move stops short of a wall.
inline constexpr double kWallStandoff = 1e-3;
/// Minimum clearance between a spawned agent and any wall.
inline constexpr double kSpawnClearance = 1e-6;

void validate_maze(const MazeSpec &maze);
MazeSpec maze_from_json(const nlohmann::json &j);
nlohmann::json maze_to_json(const MazeSpec &maze);
MazeSpec load_maze(const std::string &path);
void save_maze(const MazeSpec &maze, const std::string &path);

/// The bundled Hairpin and Tunnel environments, in that order.
std::pair<MazeSpec, MazeSpec> builtin_mazes();

/// Closed-segment intersection test (touching counts).
bool segments_intersect(Point p1, Point p2, Point q1, Point q2);
double point_segment_distance(Point p, const WallSegment &w);

bool line_of_sight(const MazeSpec &maze, Point a, Point b);

/// M(i,j) = line_of_sight(p_i, p_j) for i != j; the diagonal is false.
using VisibilityMatrix = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;
VisibilityMatrix visibility_matrix(const MazeSpec &maze,
                                   std::span<const Point> positions);

std::vector<Point> spawn_agents(const MazeSpec &maze, std::size_t n,
                                std::mt19937_64 &rng);

/// Moves from `from` towards `to`, stopping kWallStandoff short of the first
/// wall or bounds edge the segment would touch.
Point clip_move(const MazeSpec &maze, Point from, Point to);

/// True when the segment from->to touches any wall (bounds excluded).
bool crosses_wall(const MazeSpec &maze, Point from, Point to);

}  // namespace swarmbo
