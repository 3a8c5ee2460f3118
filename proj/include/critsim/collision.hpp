// Copyright 2026 The critsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CRITSIM__COLLISION_HPP_
#define CRITSIM__COLLISION_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "critsim/errors.hpp"
#include "critsim/hypotheses.hpp"
#include "critsim/parallel.hpp"
#include "critsim/scenario.hpp"

namespace critsim
{

/// Convex polygon with inline storage for up to MaxVertices vertices,
/// counter-clockwise.
template <std::size_t MaxVertices>
class ConvexPolygon
{
public:
  static constexpr std::size_t capacity = MaxVertices;

  ConvexPolygon() = default;

  explicit ConvexPolygon(std::span<const Point2> vertices)
  {
    if (vertices.size() > MaxVertices) {
      throw GeometryError("polygon exceeds vertex capacity");
    }
    for (const auto & v : vertices) {
      push_back(v);
    }
  }

  void push_back(Point2 v) { vertices_[size_++] = v; }

  std::size_t size() const noexcept { return size_; }
  const Point2 & operator[](std::size_t i) const { return vertices_[i]; }
  std::span<const Point2> vertices() const { return {vertices_.data(), size_}; }

  Point2 edge(std::size_t i) const { return vertices_[(i + 1) % size_] - vertices_[i]; }

  double signed_area() const
  {
    double twice = 0.0;
    for (std::size_t i = 0; i < size_; ++i) {
      twice += cross(vertices_[i], vertices_[(i + 1) % size_]);
    }
    return 0.5 * twice;
  }

  bool is_convex_ccw() const
  {
    if (size_ < 3) {
      return false;
    }
    for (std::size_t i = 0; i < size_; ++i) {
      if (cross(edge(i), edge((i + 1) % size_)) < 0.0) {
        return false;
      }
    }
    return signed_area() > 0.0;
  }

  bool operator==(const ConvexPolygon & o) const
  {
    return size_ == o.size_ && std::equal(vertices_.begin(), vertices_.begin() + size_, o.vertices_.begin());
  }

private:
  std::array<Point2, MaxVertices> vertices_{};
  std::size_t size_{0};
};

using FootprintPolygon = ConvexPolygon<8>;

/// Oriented footprint centered at the center of gravity and rotated by the
/// body yaw. 4 vertices give the rectangle; 8 cut each corner by 15 % of the
/// width.
template <std::size_t N = 8>
ConvexPolygon<N> footprint(Point2 center, double yaw, double length, double width, int vertices = 4)
{
  const double hl = 0.5 * length;
  const double hw = 0.5 * width;
  std::array<Point2, 8> local{};
  std::size_t count = 4;
  if (vertices == 8) {
    const double c = 0.15 * width;
    local = {{{hl, -hw + c}, {hl, hw - c}, {hl - c, hw}, {-hl + c, hw},
              {-hl, hw - c}, {-hl, -hw + c}, {-hl + c, -hw}, {hl - c, -hw}}};
    count = 8;
  } else {
    local[0] = {hl, -hw};
    local[1] = {hl, hw};
    local[2] = {-hl, hw};
    local[3] = {-hl, -hw};
  }
  static_assert(N >= 4);
  if (count > N) {
    throw GeometryError("footprint vertex count exceeds polygon capacity");
  }
  const double c = std::cos(yaw);
  const double s = std::sin(yaw);
  ConvexPolygon<N> poly;
  for (std::size_t i = 0; i < count; ++i) {
    poly.push_back({center.x + c * local[i].x - s * local[i].y, center.y + s * local[i].x + c * local[i].y});
  }
  return poly;
}

inline constexpr double kBoundaryTolerance = 1e-12;

/// Half-plane test; points on the boundary count as inside.
template <std::size_t N>
bool point_in_convex(const ConvexPolygon<N> & poly, Point2 p)
{
  for (std::size_t i = 0; i < poly.size(); ++i) {
    if (cross(poly.edge(i), p - poly[i]) < -kBoundaryTolerance) {
      return false;
    }
  }
  return true;
}

/// Vertex-in-polygon both ways. Misses crossings where neither polygon has a
/// vertex inside the other.
template <std::size_t N, std::size_t M>
bool overlap_vertex_test(const ConvexPolygon<N> & a, const ConvexPolygon<M> & b)
{
  for (const auto & v : a.vertices()) {
    if (point_in_convex(b, v)) {
      return true;
    }
  }
  for (const auto & v : b.vertices()) {
    if (point_in_convex(a, v)) {
      return true;
    }
  }
  return false;
}

/// Separating-axis test over the edge normals of both polygons; touching
/// polygons overlap.
template <std::size_t N, std::size_t M>
bool overlap_separating_axis(const ConvexPolygon<N> & a, const ConvexPolygon<M> & b)
{
  auto separated_along_edges_of = [](const auto & p, const auto & q) {
    for (std::size_t i = 0; i < p.size(); ++i) {
      const Point2 e = p.edge(i);
      const Point2 axis{e.y, -e.x};  // outward for CCW
      const double p_max = dot(axis, p[i]);
      double q_min = std::numeric_limits<double>::infinity();
      for (const auto & v : q.vertices()) {
        q_min = std::min(q_min, dot(axis, v));
      }
      if (q_min > p_max + kBoundaryTolerance) {
        return true;
      }
    }
    return false;
  };
  return !separated_along_edges_of(a, b) && !separated_along_edges_of(b, a);
}

template <std::size_t N, std::size_t M>
bool polygons_overlap(const ConvexPolygon<N> & a, const ConvexPolygon<M> & b, CollisionMode mode)
{
  return mode == CollisionMode::paper ? overlap_vertex_test(a, b) : overlap_separating_axis(a, b);
}

/// Earliest colliding step for every (EGO trajectory, CO trajectory) pair.
class CollisionMatrix
{
public:
  static constexpr std::int16_t kNone = -1;

  CollisionMatrix() = default;
  CollisionMatrix(std::size_t rows, std::size_t cols, std::vector<int> column_object)
  : rows_(rows), cols_(cols), steps_(rows * cols, kNone), column_object_(std::move(column_object))
  {
    if (column_object_.size() != cols_) {
      throw CollisionError("column object list does not match column count");
    }
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t pair_index(std::size_t i, std::size_t j) const noexcept { return i * cols_ + j; }

  std::optional<int> at(std::size_t i, std::size_t j) const
  {
    const auto s = steps_[pair_index(i, j)];
    return s == kNone ? std::nullopt : std::optional<int>(s);
  }

  void set(std::size_t i, std::size_t j, std::optional<int> step)
  {
    steps_[pair_index(i, j)] = step ? static_cast<std::int16_t>(*step) : kNone;
  }

  /// Object id of the CO that owns column j.
  int column_object(std::size_t j) const { return column_object_[j]; }

  std::span<const std::int16_t> entries() const { return steps_; }

  std::size_t collision_count() const
  {
    return static_cast<std::size_t>(std::count_if(steps_.begin(), steps_.end(), [](auto s) { return s != kNone; }));
  }

  bool operator==(const CollisionMatrix &) const = default;

private:
  std::size_t rows_{0};
  std::size_t cols_{0};
  std::vector<std::int16_t> steps_;
  std::vector<int> column_object_;
};

struct ObjectShape
{
  double length{0.0};
  double width{0.0};
};

enum class ScanMode { early_exit, full };

namespace detail
{

template <std::size_t N>
struct FootprintTrack
{
  std::vector<ConvexPolygon<N>> polygons;
  std::vector<Point2> centers;
  double radius{0.0};
  Point2 box_min{};
  Point2 box_max{};
};

template <std::size_t N>
FootprintTrack<N> make_track(const Trajectory & traj, ObjectShape shape, int vertices)
{
  FootprintTrack<N> track;
  track.radius = 0.5 * std::hypot(shape.length, shape.width);
  track.polygons.reserve(traj.poses.size());
  track.centers.reserve(traj.poses.size());
  track.box_min = {std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  track.box_max = {-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (const auto & pose : traj.poses) {
    track.polygons.push_back(footprint<N>(pose.position, pose.yaw, shape.length, shape.width, vertices));
    track.centers.push_back(pose.position);
    track.box_min = {std::min(track.box_min.x, pose.position.x), std::min(track.box_min.y, pose.position.y)};
    track.box_max = {std::max(track.box_max.x, pose.position.x), std::max(track.box_max.y, pose.position.y)};
  }
  return track;
}

template <std::size_t N>
std::optional<int> first_overlap(
  const FootprintTrack<N> & a, const FootprintTrack<N> & b, CollisionMode mode, ScanMode scan)
{
  const double reach = a.radius + b.radius;
  if (a.box_min.x - reach > b.box_max.x || b.box_min.x - reach > a.box_max.x ||
      a.box_min.y - reach > b.box_max.y || b.box_min.y - reach > a.box_max.y) {
    return std::nullopt;
  }
  const double reach2 = reach * reach;
  std::optional<int> first;
  for (std::size_t k = 0; k < a.polygons.size(); ++k) {
    const Point2 d = a.centers[k] - b.centers[k];
    if (dot(d, d) > reach2) {
      continue;
    }
    if (polygons_overlap(a.polygons[k], b.polygons[k], mode)) {
      if (!first) {
        first = static_cast<int>(k);
      }
      if (scan == ScanMode::early_exit) {
        break;
      }
    }
  }
  return first;
}

template <std::size_t N>
CollisionMatrix detect_collisions_impl(
  std::span<const Trajectory> ego, ObjectShape ego_shape, std::span<const Trajectory> co,
  std::span<const ObjectShape> co_shapes, const SimulationConfig & config, const WorkerPolicy & policy,
  ScanMode scan)
{
  std::vector<FootprintTrack<N>> ego_tracks(ego.size());
  std::vector<FootprintTrack<N>> co_tracks(co.size());
  parallel_for(ego.size() + co.size(), policy, [&](std::size_t t) {
    if (t < ego.size()) {
      ego_tracks[t] = make_track<N>(ego[t], ego_shape, config.footprint_vertices);
    } else {
      const std::size_t j = t - ego.size();
      co_tracks[j] = make_track<N>(co[j], co_shapes[j], config.footprint_vertices);
    }
  });

  std::vector<int> column_object(co.size());
  for (std::size_t j = 0; j < co.size(); ++j) {
    column_object[j] = co[j].object_id;
  }
  CollisionMatrix matrix(ego.size(), co.size(), std::move(column_object));
  parallel_for(ego.size(), policy, [&](std::size_t i) {
    for (std::size_t j = 0; j < co.size(); ++j) {
      matrix.set(i, j, first_overlap(ego_tracks[i], co_tracks[j], config.collision_mode, scan));
    }
  });
  return matrix;
}

}  // namespace detail

/// Checks every EGO trajectory against every CO trajectory, step by step, and
/// records the earliest step at which the footprints overlap. CO trajectories
/// are never paired with each other. `co_shapes[j]` is the footprint size of
/// the object owning `co[j]`. Rows are processed in parallel; each pair writes
/// only its own slot.
inline CollisionMatrix detect_collisions(
  std::span<const Trajectory> ego, ObjectShape ego_shape, std::span<const Trajectory> co,
  std::span<const ObjectShape> co_shapes, const SimulationConfig & config,
  const WorkerPolicy & policy = WorkerPolicy::sequential(), ScanMode scan = ScanMode::early_exit)
{
  if (co_shapes.size() != co.size()) {
    throw CollisionError("one shape per CO trajectory is required");
  }
  const std::size_t steps = ego.empty() ? (co.empty() ? 0 : co.front().poses.size()) : ego.front().poses.size();
  auto check = [&](const Trajectory & t) {
    if (t.poses.size() != steps) {
      throw CollisionError(
        "step-count mismatch: trajectory of object " + std::to_string(t.object_id) + " has " +
        std::to_string(t.poses.size()) + " poses, expected " + std::to_string(steps));
    }
  };
  std::for_each(ego.begin(), ego.end(), check);
  std::for_each(co.begin(), co.end(), check);

  if (config.footprint_vertices == 4) {
    return detail::detect_collisions_impl<4>(ego, ego_shape, co, co_shapes, config, policy, scan);
  }
  return detail::detect_collisions_impl<8>(ego, ego_shape, co, co_shapes, config, policy, scan);
}

/// r_col on a full three-lane road.
inline std::int64_t count_combinations(std::int64_t co_count, const SimulationConfig & config)
{
  const std::int64_t h_acc = config.acceleration_profiles;
  return co_count * config.co_paths * config.ego_paths(2) * h_acc * h_acc;
}

/// r_col times the number of time steps.
inline std::int64_t count_pose_combinations(std::int64_t co_count, const SimulationConfig & config)
{
  return count_combinations(co_count, config) * config.steps();
}

/// Smallest relative speed at which two footprints can pass through each
/// other between two samples: the summed extents along the motion must be
/// covered within one step.
inline double pass_through_speed(double extent_a, double extent_b, double step)
{
  return (extent_a + extent_b) / step;
}

}  // namespace critsim

#endif  // CRITSIM__COLLISION_HPP_
