#include "swarmbo/env.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <optional>

#include <nlohmann/json.hpp>

namespace swarmbo {
namespace {

  bool finite(Point p) { return std::isfinite(p.x) && std::isfinite(p.y); }

  double orient(Point a, Point b, Point c) { return cross(b - a, c - a); }

  int sign(double v) { return (v > 0) - (v < 0); }

  // Assumes a, b, p collinear.
  bool on_segment(Point a, Point b, Point p) {
    return p.x >= std::min(a.x, b.x) && p.x <= std::max(a.x, b.x) &&
           p.y >= std::min(a.y, b.y) && p.y <= std::max(a.y, b.y);
  }

  // Smallest parameter s in [0,1] at which from + s*(to-from) touches w.
  std::optional<double> crossing_param(Point from, Point to,
                                       const WallSegment &w) {
    const Point r = to - from;
    const Point s = w.b - w.a;
    const Point qp = w.a - from;
    const double denom = cross(r, s);
    const double rr = dot(r, r);

    if (denom == 0.0) {
      if (cross(qp, r) != 0.0 || rr == 0.0)
        return std::nullopt;
      // Collinear: overlap of parameter intervals.
      double t0 = dot(w.a - from, r) / rr;
      double t1 = dot(w.b - from, r) / rr;
      if (t0 > t1)
        std::swap(t0, t1);
      if (t1 < 0.0 || t0 > 1.0)
        return std::nullopt;
      return std::max(0.0, t0);
    }

    const double t = cross(qp, s) / denom;
    const double u = cross(qp, r) / denom;
    if (t < 0.0 || t > 1.0 || u < 0.0 || u > 1.0)
      return std::nullopt;
    return t;
  }

  std::vector<WallSegment> bounds_edges(const Rect &b) {
    const Point p00{b.xmin, b.ymin}, p10{b.xmax, b.ymin}, p11{b.xmax, b.ymax},
        p01{b.xmin, b.ymax};
    return {{p00, p10}, {p10, p11}, {p11, p01}, {p01, p00}};
  }

  Point parse_point(const nlohmann::json &j, const std::string &path) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() ||
        !j[1].is_number())
      throw MazeError(path, "expected [x, y]");
    Point p{j[0].get<double>(), j[1].get<double>()};
    if (!finite(p))
      throw MazeError(path, "non-finite coordinate");
    return p;
  }

  Rect parse_rect(const nlohmann::json &j, const std::string &path) {
    if (!j.is_array() || j.size() != 4)
      throw MazeError(path, "expected [xmin, ymin, xmax, ymax]");
    double v[4];
    for (int i = 0; i < 4; ++i) {
      if (!j[i].is_number())
        throw MazeError(path, "expected numbers");
      v[i] = j[i].get<double>();
      if (!std::isfinite(v[i]))
        throw MazeError(path, "non-finite coordinate");
    }
    return {v[0], v[1], v[2], v[3]};
  }

  nlohmann::json point_json(Point p) { return nlohmann::json::array({p.x, p.y}); }

  nlohmann::json rect_json(const Rect &r) {
    return nlohmann::json::array({r.xmin, r.ymin, r.xmax, r.ymax});
  }

}  // namespace

void validate_maze(const MazeSpec &maze) {
  const Rect &b = maze.bounds;
  if (!(b.xmax > b.xmin) || !(b.ymax > b.ymin))
    throw MazeError("bounds", "empty rectangle");
  for (std::size_t i = 0; i < maze.walls.size(); ++i) {
    const auto &w = maze.walls[i];
    const std::string path = "walls[" + std::to_string(i) + "]";
    if (!finite(w.a) || !finite(w.b))
      throw MazeError(path, "non-finite coordinate");
    if (w.a == w.b)
      throw MazeError(path, "degenerate segment");
  }
  if (maze.rewards.empty())
    throw MazeError("rewards", "at least one reward required");
  for (std::size_t i = 0; i < maze.rewards.size(); ++i) {
    if (!b.contains(maze.rewards[i]))
      throw MazeError("rewards[" + std::to_string(i) + "]",
                      "reward outside bounds");
  }
  if (maze.spawn.kind == SpawnRegion::Kind::Rect) {
    const Rect &s = maze.spawn.rect;
    if (!(s.xmax >= s.xmin) || !(s.ymax >= s.ymin))
      throw MazeError("spawn.rect", "inverted rectangle");
    if (!b.contains(s))
      throw MazeError("spawn.rect", "spawn region outside bounds");
  }
}

MazeSpec maze_from_json(const nlohmann::json &j) {
  if (!j.is_object())
    throw MazeError("$", "expected an object");
  MazeSpec m;

  if (!j.contains("name") || !j["name"].is_string())
    throw MazeError("name", "missing or not a string");
  m.name = j["name"].get<std::string>();

  if (!j.contains("bounds"))
    throw MazeError("bounds", "missing");
  m.bounds = parse_rect(j["bounds"], "bounds");

  if (j.contains("walls")) {
    const auto &walls = j["walls"];
    if (!walls.is_array())
      throw MazeError("walls", "expected an array");
    for (std::size_t i = 0; i < walls.size(); ++i) {
      const std::string path = "walls[" + std::to_string(i) + "]";
      if (!walls[i].is_array() || walls[i].size() != 2)
        throw MazeError(path, "expected [[x,y],[x,y]]");
      m.walls.push_back({parse_point(walls[i][0], path + "[0]"),
                         parse_point(walls[i][1], path + "[1]")});
    }
  }

  if (!j.contains("rewards") || !j["rewards"].is_array())
    throw MazeError("rewards", "missing or not an array");
  for (std::size_t i = 0; i < j["rewards"].size(); ++i)
    m.rewards.push_back(
        parse_point(j["rewards"][i], "rewards[" + std::to_string(i) + "]"));

  if (j.contains("spawn")) {
    const auto &s = j["spawn"];
    if (!s.is_object() || !s.contains("type") || !s["type"].is_string())
      throw MazeError("spawn.type", "missing or not a string");
    const auto type = s["type"].get<std::string>();
    if (type == "uniform") {
      m.spawn.kind = SpawnRegion::Kind::UniformBounds;
    } else if (type == "rect") {
      if (!s.contains("rect"))
        throw MazeError("spawn.rect", "missing");
      m.spawn.kind = SpawnRegion::Kind::Rect;
      m.spawn.rect = parse_rect(s["rect"], "spawn.rect");
    } else {
      throw MazeError("spawn.type", "unknown spawn type '" + type + "'");
    }
  }

  if (j.contains("note") && j["note"].is_string())
    m.note = j["note"].get<std::string>();

  validate_maze(m);
  return m;
}

nlohmann::json maze_to_json(const MazeSpec &maze) {
  nlohmann::json j;
  j["name"] = maze.name;
  if (!maze.note.empty())
    j["note"] = maze.note;
  j["bounds"] = rect_json(maze.bounds);
  j["walls"] = nlohmann::json::array();
  for (const auto &w : maze.walls)
    j["walls"].push_back({point_json(w.a), point_json(w.b)});
  j["rewards"] = nlohmann::json::array();
  for (const auto &r : maze.rewards)
    j["rewards"].push_back(point_json(r));
  if (maze.spawn.kind == SpawnRegion::Kind::Rect)
    j["spawn"] = {{"type", "rect"}, {"rect", rect_json(maze.spawn.rect)}};
  else
    j["spawn"] = {{"type", "uniform"}};
  return j;
}

MazeSpec load_maze(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw MazeError("$", "cannot open maze file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error &e) {
    throw MazeError("$", std::string("parse error in ") + path + ": " +
                             e.what());
  }
  return maze_from_json(j);
}

void save_maze(const MazeSpec &maze, const std::string &path) {
  std::ofstream out(path);
  if (!out)
    throw std::runtime_error("cannot write " + path);
  out << maze_to_json(maze).dump(2) << '\n';
}

std::pair<MazeSpec, MazeSpec> builtin_mazes() {
  // Published figures give topology only; coordinates are hand-authored.
  MazeSpec hairpin;
  hairpin.name = "hairpin";
  hairpin.note =
      "Hand-authored stand-in: serpentine of 4 interior walls alternating "
      "from the floor and ceiling, one reward per lane, uniform spawn.";
  hairpin.bounds = {0.0, 0.0, 300.0, 200.0};
  hairpin.walls = {
      {{60.0, 0.0}, {60.0, 150.0}},
      {{120.0, 50.0}, {120.0, 200.0}},
      {{180.0, 0.0}, {180.0, 150.0}},
      {{240.0, 50.0}, {240.0, 200.0}},
  };
  hairpin.rewards = {
      {30.0, 40.0}, {90.0, 160.0}, {150.0, 40.0}, {210.0, 160.0}, {270.0, 40.0},
  };
  hairpin.spawn.kind = SpawnRegion::Kind::UniformBounds;

  MazeSpec tunnel;
  tunnel.name = "tunnel";
  tunnel.note =
      "Hand-authored stand-in: open upper chamber split by a partition, a "
      "constricted corridor of width 2*d_rad along the floor leading to the "
      "bottom-right reward, bottom-left spawn.";
  tunnel.bounds = {0.0, 0.0, 300.0, 200.0};
  tunnel.walls = {
      {{120.0, 24.0}, {300.0, 24.0}},
      {{200.0, 60.0}, {200.0, 200.0}},
  };
  tunnel.rewards = {{50.0, 160.0}, {250.0, 140.0}, {285.0, 12.0}};
  tunnel.spawn.kind = SpawnRegion::Kind::Rect;
  tunnel.spawn.rect = {5.0, 5.0, 75.0, 55.0};

  validate_maze(hairpin);
  validate_maze(tunnel);
  return {std::move(hairpin), std::move(tunnel)};
}

bool segments_intersect(Point p1, Point p2, Point q1, Point q2) {
  const int d1 = sign(orient(q1, q2, p1));
  const int d2 = sign(orient(q1, q2, p2));
  const int d3 = sign(orient(p1, p2, q1));
  const int d4 = sign(orient(p1, p2, q2));

  if (d1 * d2 < 0 && d3 * d4 < 0)
    return true;
  if (d1 == 0 && on_segment(q1, q2, p1))
    return true;
  if (d2 == 0 && on_segment(q1, q2, p2))
    return true;
  if (d3 == 0 && on_segment(p1, p2, q1))
    return true;
  if (d4 == 0 && on_segment(p1, p2, q2))
    return true;
  return false;
}

double point_segment_distance(Point p, const WallSegment &w) {
  const Point d = w.b - w.a;
  const double len2 = dot(d, d);
  double t = len2 > 0.0 ? dot(p - w.a, d) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return distance(p, w.a + t * d);
}

bool line_of_sight(const MazeSpec &maze, Point a, Point b) {
  if (a == b)
    return true;
  for (const auto &w : maze.walls) {
    if (segments_intersect(a, b, w.a, w.b))
      return false;
  }
  return true;
}

VisibilityMatrix visibility_matrix(const MazeSpec &maze,
                                   std::span<const Point> positions) {
  const auto n = static_cast<Eigen::Index>(positions.size());
  VisibilityMatrix m = VisibilityMatrix::Constant(n, n, false);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const bool v = line_of_sight(maze, positions[i], positions[j]);
      m(i, j) = v;
      m(j, i) = v;
    }
  }
  return m;
}

std::vector<Point> spawn_agents(const MazeSpec &maze, std::size_t n,
                                std::mt19937_64 &rng) {
  const Rect region = maze.spawn_rect();
  if (!(region.area() > 0.0))
    throw MazeError("spawn.rect", "spawn region has zero area");

  std::uniform_real_distribution<double> ux(region.xmin, region.xmax);
  std::uniform_real_distribution<double> uy(region.ymin, region.ymax);

  std::vector<Point> out;
  out.reserve(n);
  constexpr std::size_t kMaxTries = 1000000;
  std::size_t tries = 0;
  while (out.size() < n) {
    if (++tries > kMaxTries * std::max<std::size_t>(n, 1))
      throw MazeError("spawn", "rejection sampling failed");
    const double x = ux(rng);
    const double y = uy(rng);
    const Point p{x, y};
    if (!maze.bounds.contains(p))
      continue;
    const bool clear =
        std::none_of(maze.walls.begin(), maze.walls.end(),
                     [&](const WallSegment &w) {
                       return point_segment_distance(p, w) < kSpawnClearance;
                     });
    if (clear)
      out.push_back(p);
  }
  return out;
}

bool crosses_wall(const MazeSpec &maze, Point from, Point to) {
  return std::any_of(maze.walls.begin(), maze.walls.end(),
                     [&](const WallSegment &w) {
                       return segments_intersect(from, to, w.a, w.b);
                     });
}

Point clip_move(const MazeSpec &maze, Point from, Point to) {
  if (from == to)
    return from;

  double first = std::numeric_limits<double>::infinity();
  auto consider = [&](const WallSegment &w) {
    if (auto s = crossing_param(from, to, w))
      first = std::min(first, *s);
  };
  for (const auto &w : maze.walls)
    consider(w);
  for (const auto &w : bounds_edges(maze.bounds))
    consider(w);

  if (!std::isfinite(first))
    return to;

  const Point r = to - from;
  const double len = norm(r);
  const double travel = first * len - kWallStandoff;
  if (travel <= 0.0)
    return from;
  const Point c = from + (travel / len) * r;
  // Rounding near grazing contacts can leave c touching a wall.
  if (crosses_wall(maze, from, c) || !maze.bounds.contains(c))
    return from;
  return c;
}

}  // namespace swarmbo
