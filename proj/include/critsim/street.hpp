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

#ifndef CRITSIM__STREET_HPP_
#define CRITSIM__STREET_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "critsim/errors.hpp"
#include "critsim/parallel.hpp"
#include "critsim/scenario.hpp"

namespace critsim
{

/// Rigid transform between the global frame and the road-aligned frame, whose
/// origin is the EGO center of gravity and whose x axis is the EGO heading.
struct RoadFrame
{
  Point2 origin{};
  double yaw{0.0};

  static RoadFrame from(const ObjectState & ego) { return {ego.position, ego.yaw}; }

  Point2 to_road(Point2 p) const
  {
    const double c = std::cos(yaw);
    const double s = std::sin(yaw);
    const Point2 d = p - origin;
    return {c * d.x + s * d.y, -s * d.x + c * d.y};
  }

  Point2 to_global(Point2 p) const
  {
    const double c = std::cos(yaw);
    const double s = std::sin(yaw);
    return Point2{c * p.x - s * p.y, s * p.x + c * p.y} + origin;
  }

  double yaw_to_road(double global_yaw) const { return wrap_angle(global_yaw - yaw); }
  double yaw_to_global(double road_yaw) const { return wrap_angle(road_yaw + yaw); }

  bool operator==(const RoadFrame &) const = default;
};

/// y = a x^2 + b x + c
struct Quadratic
{
  double a{0.0};
  double b{0.0};
  double c{0.0};

  double operator()(double x) const { return (a * x + b) * x + c; }
  double slope(double x) const { return 2.0 * a * x + b; }
  double heading(double x) const { return std::atan(slope(x)); }

  Quadratic operator+(const Quadratic & o) const { return {a + o.a, b + o.b, c + o.c}; }
  Quadratic operator*(double s) const { return {a * s, b * s, c * s}; }
  bool operator==(const Quadratic &) const = default;
};

/// Lane divider in the road-aligned frame.
struct LaneDivider
{
  Quadratic curve;
  double x_near{0.0};
  double x_far{0.0};
  bool synthesized{false};

  double operator()(double x) const { return curve(x); }
  bool operator==(const LaneDivider &) const = default;
};

namespace detail
{

/// Gauss-Jordan elimination with partial pivoting on an N x (N+1) augmented
/// matrix. Returns nullopt when a pivot falls below 1e-12 relative to the
/// largest entry of its column in the input matrix.
template <std::size_t N>
std::optional<std::array<double, N>> gauss_jordan(std::array<std::array<double, N + 1>, N> m)
{
  std::array<double, N> scale{};
  for (std::size_t col = 0; col < N; ++col) {
    for (std::size_t row = 0; row < N; ++row) {
      scale[col] = std::max(scale[col], std::abs(m[row][col]));
    }
  }
  for (std::size_t col = 0; col < N; ++col) {
    std::size_t pivot = col;
    for (std::size_t row = col; row < N; ++row) {
      if (std::abs(m[row][col]) > std::abs(m[pivot][col])) {
        pivot = row;
      }
    }
    if (scale[col] == 0.0 || std::abs(m[pivot][col]) <= 1e-12 * scale[col] || !std::isfinite(m[pivot][col])) {
      return std::nullopt;
    }
    std::swap(m[pivot], m[col]);
    const double inv = 1.0 / m[col][col];
    for (auto & v : m[col]) {
      v *= inv;
    }
    for (std::size_t row = 0; row < N; ++row) {
      if (row == col || m[row][col] == 0.0) {
        continue;
      }
      const double factor = m[row][col];
      for (std::size_t k = col; k <= N; ++k) {
        m[row][k] -= factor * m[col][k];
      }
    }
  }
  std::array<double, N> x{};
  for (std::size_t i = 0; i < N; ++i) {
    x[i] = m[i][N];
  }
  return x;
}

/// Least-squares quadratic through `points`, solved in centered and scaled
/// abscissae to keep the normal equations well conditioned.
inline std::optional<Quadratic> least_squares_quadratic(std::span<const Point2> points)
{
  if (points.size() < 3) {
    return std::nullopt;
  }
  double lo = points.front().x;
  double hi = points.front().x;
  for (const auto & p : points) {
    lo = std::min(lo, p.x);
    hi = std::max(hi, p.x);
  }
  const double mid = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  if (!(half > 0.0)) {
    return std::nullopt;
  }
  std::array<double, 5> su{};  // sums of u^k
  std::array<double, 3> sy{};  // sums of y u^k
  for (const auto & p : points) {
    const double u = (p.x - mid) / half;
    double uk = 1.0;
    for (std::size_t k = 0; k < 5; ++k) {
      su[k] += uk;
      if (k < 3) {
        sy[k] += p.y * uk;
      }
      uk *= u;
    }
  }
  std::array<std::array<double, 4>, 3> m{{
    {su[0], su[1], su[2], sy[0]},
    {su[1], su[2], su[3], sy[1]},
    {su[2], su[3], su[4], sy[2]},
  }};
  const auto sol = gauss_jordan<3>(m);
  if (!sol) {
    return std::nullopt;
  }
  // y = s0 + s1 u + s2 u^2 with u = (x - mid) / half
  const double s0 = (*sol)[0];
  const double s1 = (*sol)[1] / half;
  const double s2 = (*sol)[2] / (half * half);
  return Quadratic{s2, s1 - 2.0 * s2 * mid, s0 - s1 * mid + s2 * mid * mid};
}

}  // namespace detail

/// Quadratic divider through three points given in the road-aligned frame.
/// The valid range spans the smallest to the largest abscissa.
/// Throws GeometryError("degenerate divider ...") if the 3x3 system is singular.
inline LaneDivider fit_divider(Point2 p1, Point2 p2, Point2 p3)
{
  const std::array<Point2, 3> pts{p1, p2, p3};
  for (const auto & p : pts) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw GeometryError("degenerate divider: non-finite point");
    }
  }
  std::array<std::array<double, 4>, 3> m{};
  for (std::size_t i = 0; i < 3; ++i) {
    m[i] = {pts[i].x * pts[i].x, pts[i].x, 1.0, pts[i].y};
  }
  const auto sol = detail::gauss_jordan<3>(m);
  if (!sol) {
    throw GeometryError("degenerate divider: abscissae are not pairwise distinct");
  }
  const auto [lo, hi] = std::minmax({p1.x, p2.x, p3.x});
  return LaneDivider{Quadratic{(*sol)[0], (*sol)[1], (*sol)[2]}, lo, hi, false};
}

/// Closest point of a curve to a query point.
struct CurveProjection
{
  double x{0.0};                // abscissa of the foot point
  Point2 foot{};
  double signed_distance{0.0};  // > 0 when the query lies on the left of the curve
  double heading{0.0};          // curve direction at the foot point (towards +x)
};

inline CurveProjection project_onto(const Quadratic & q, Point2 p)
{
  double x = p.x;
  for (int it = 0; it < 12; ++it) {
    const double dy = q(x) - p.y;
    const double s = q.slope(x);
    const double g = (x - p.x) + dy * s;
    const double h = 1.0 + s * s + dy * 2.0 * q.a;
    if (!(h > 1e-12)) {
      break;
    }
    const double step = g / h;
    x -= step;
    if (std::abs(step) < 1e-12) {
      break;
    }
  }
  const Point2 foot{x, q(x)};
  const Point2 tangent{1.0, q.slope(x)};
  const double side = cross(tangent, p - foot);
  const double dist = norm(p - foot);
  return {x, foot, side >= 0.0 ? dist : -dist, std::atan(tangent.y)};
}

/// Curve at constant perpendicular distance `lateral_offset` (> 0 is left)
/// from `divider`, refitted as a quadratic from 9 exact offset samples over
/// the divider's valid range.
inline LaneDivider offset_curve(const LaneDivider & divider, double lateral_offset)
{
  if (lateral_offset == 0.0) {
    return divider;
  }
  constexpr int kSamples = 9;
  double lo = divider.x_near;
  double hi = divider.x_far;
  if (!(hi > lo)) {
    lo -= 1.0;
    hi += 1.0;
  }
  std::array<Point2, kSamples> samples{};
  for (int i = 0; i < kSamples; ++i) {
    const double x = lo + (hi - lo) * i / (kSamples - 1);
    const double s = divider.curve.slope(x);
    const double n = std::sqrt(1.0 + s * s);
    samples[i] = {x - lateral_offset * s / n, divider.curve(x) + lateral_offset / n};
  }
  const auto fit = detail::least_squares_quadratic(samples);
  if (!fit) {
    throw GeometryError("offset curve: degenerate sample set");
  }
  return LaneDivider{*fit, samples.front().x, samples.back().x, divider.synthesized};
}

struct Lane
{
  LaneId id{LaneId::ego};
  std::size_t left_divider{0};
  std::size_t right_divider{0};
  int direction{+1};  // +1 along the road x axis, -1 for counter traffic

  bool operator==(const Lane &) const = default;
};

/// Road in the road-aligned frame: dividers ordered left to right and up to
/// three lanes (left, ego, right).
struct RoadModel
{
  RoadFrame frame;
  std::vector<LaneDivider> dividers;
  std::vector<Lane> lanes;  // ordered left to right
  bool virtual_ego_lane{false};
  int synthesized_dividers{0};

  const Lane * find(LaneId id) const
  {
    for (const auto & lane : lanes) {
      if (lane.id == id) {
        return &lane;
      }
    }
    return nullptr;
  }

  const Lane & lane(LaneId id) const
  {
    const Lane * l = find(id);
    if (l == nullptr) {
      throw GeometryError("road has no " + std::string(to_string(id)) + " lane");
    }
    return *l;
  }

  const LaneDivider & left_of(const Lane & lane) const { return dividers[lane.left_divider]; }
  const LaneDivider & right_of(const Lane & lane) const { return dividers[lane.right_divider]; }

  Quadratic center_line(const Lane & lane) const
  {
    return (left_of(lane).curve + right_of(lane).curve) * 0.5;
  }

  /// Lanes adjacent to `id` that exist on this road.
  std::vector<LaneId> neighbors(LaneId id) const
  {
    std::vector<LaneId> out;
    for (std::size_t i = 0; i < lanes.size(); ++i) {
      if (lanes[i].id != id) {
        continue;
      }
      if (i > 0) {
        out.push_back(lanes[i - 1].id);
      }
      if (i + 1 < lanes.size()) {
        out.push_back(lanes[i + 1].id);
      }
    }
    return out;
  }

  bool operator==(const RoadModel &) const = default;
};

/// Transforms global triplets into the road-aligned frame and fits each one.
/// Fits are independent and run in parallel.
inline std::vector<LaneDivider> fit_dividers(
  std::span<const DividerTriplet> triplets, const RoadFrame & frame,
  const WorkerPolicy & policy = WorkerPolicy::sequential())
{
  std::vector<LaneDivider> out(triplets.size());
  parallel_for(triplets.size(), policy, [&](std::size_t i) {
    const auto & t = triplets[i];
    out[i] = fit_divider(frame.to_road(t[0]), frame.to_road(t[1]), frame.to_road(t[2]));
  });
  return out;
}

namespace detail
{

inline void check_not_crossing(const LaneDivider & left, const LaneDivider & right)
{
  const double lo = std::max(left.x_near, right.x_near);
  const double hi = std::min(left.x_far, right.x_far);
  constexpr int kSamples = 33;
  if (hi < lo) {
    return;
  }
  for (int i = 0; i < kSamples; ++i) {
    const double x = lo + (hi - lo) * i / (kSamples - 1);
    if (!(left(x) - right(x) > 0.0)) {
      throw GeometryError("inconsistent road: lane dividers cross inside their valid range");
    }
  }
}

inline LaneDivider straight_divider(double y, double half_length)
{
  return LaneDivider{Quadratic{0.0, 0.0, y}, -half_length, half_length, true};
}

}  // namespace detail

/// Assembles up to three lanes around the EGO vehicle from dividers given in
/// the road-aligned frame (EGO at the origin, heading along +x).
///
/// A gap of more than 1.5 lane widths between adjacent dividers is split by a
/// synthesized middle divider. When no divider pair encloses the EGO, the EGO
/// lane is made virtual: mirrored from a divider less than one lane width
/// away, or otherwise a straight lane of `lane_width` along the EGO heading.
inline RoadModel build_road(
  std::span<const LaneDivider> input, const ObjectState & ego, double lane_width = 3.5)
{
  if (input.size() > 4) {
    throw GeometryError("inconsistent road: more than 4 dividers");
  }
  RoadModel road;
  road.frame = RoadFrame::from(ego);

  std::vector<LaneDivider> dividers(input.begin(), input.end());
  std::sort(dividers.begin(), dividers.end(), [](const LaneDivider & l, const LaneDivider & r) {
    return l(0.0) > r(0.0);
  });
  for (std::size_t i = 0; i + 1 < dividers.size(); ++i) {
    detail::check_not_crossing(dividers[i], dividers[i + 1]);
  }

  // Split double-width gaps whose shared divider was not delivered.
  for (std::size_t i = 0; i + 1 < dividers.size(); ++i) {
    const double gap = dividers[i](0.0) - dividers[i + 1](0.0);
    if (gap > 1.5 * lane_width) {
      LaneDivider mid{
        (dividers[i].curve + dividers[i + 1].curve) * 0.5,
        std::max(dividers[i].x_near, dividers[i + 1].x_near),
        std::min(dividers[i].x_far, dividers[i + 1].x_far), true};
      if (mid.x_far < mid.x_near) {
        std::swap(mid.x_near, mid.x_far);
      }
      dividers.insert(dividers.begin() + static_cast<std::ptrdiff_t>(i) + 1, mid);
      ++road.synthesized_dividers;
      ++i;
    }
  }

  auto find_ego_pair = [&]() -> std::optional<std::size_t> {
    for (std::size_t i = 0; i + 1 < dividers.size(); ++i) {
      if (dividers[i](0.0) >= 0.0 && dividers[i + 1](0.0) <= 0.0) {
        return i;
      }
    }
    return std::nullopt;
  };

  auto ego_pair = find_ego_pair();
  if (!ego_pair) {
    road.virtual_ego_lane = true;
    // Nearest divider, if it is close enough to bound the EGO lane on one side.
    std::optional<std::size_t> nearest;
    for (std::size_t i = 0; i < dividers.size(); ++i) {
      if (!nearest || std::abs(dividers[i](0.0)) < std::abs(dividers[*nearest](0.0))) {
        nearest = i;
      }
    }
    if (nearest && std::abs(dividers[*nearest](0.0)) <= lane_width) {
      const LaneDivider & anchor = dividers[*nearest];
      const bool anchor_left = anchor(0.0) > 0.0;
      LaneDivider mirrored = offset_curve(anchor, anchor_left ? -lane_width : lane_width);
      mirrored.synthesized = true;
      const auto pos = dividers.begin() + static_cast<std::ptrdiff_t>(*nearest) + (anchor_left ? 1 : 0);
      dividers.insert(pos, mirrored);
      ++road.synthesized_dividers;
    } else {
      dividers = {
        detail::straight_divider(0.5 * lane_width, 100.0),
        detail::straight_divider(-0.5 * lane_width, 100.0)};
      road.synthesized_dividers += 2;
    }
    ego_pair = find_ego_pair();
    if (!ego_pair) {
      throw GeometryError("inconsistent road: unable to place the EGO lane");
    }
  }

  const std::size_t k = *ego_pair;
  if (k >= 1) {
    road.lanes.push_back({LaneId::left, k - 1, k, +1});
  }
  road.lanes.push_back({LaneId::ego, k, k + 1, +1});
  if (k + 2 < dividers.size()) {
    road.lanes.push_back({LaneId::right, k + 1, k + 2, +1});
  }
  road.dividers = std::move(dividers);
  return road;
}

struct LaneAssociation
{
  std::optional<LaneId> lane;
  bool off_road{false};

  bool operator==(const LaneAssociation &) const = default;
};

/// Lane of an object's center of gravity. The EGO is always on the EGO lane,
/// pedestrians are never associated. A vehicle exactly on a shared divider
/// goes to the side its heading points to (left when parallel). A vehicle
/// outside every lane goes to the nearest one and is flagged off-road.
inline LaneAssociation associate_lane(const ObjectState & object, const RoadModel & road)
{
  if (object.kind == ObjectKind::pedestrian) {
    return {};
  }
  if (object.kind == ObjectKind::ego_vehicle) {
    return {LaneId::ego, false};
  }
  if (road.lanes.empty()) {
    return {};
  }
  const Point2 p = road.frame.to_road(object.position);
  const double yaw = road.frame.yaw_to_road(object.yaw);
  constexpr double kOnDivider = 1e-9;
  constexpr double kParallel = 1e-9;

  for (std::size_t i = 0; i < road.lanes.size(); ++i) {
    const Lane & lane = road.lanes[i];
    const double y_left = road.left_of(lane)(p.x);
    const double y_right = road.right_of(lane)(p.x);
    if (std::abs(p.y - y_right) <= kOnDivider) {
      // On the right divider of this lane; a lane to the right may share it.
      const double lateral = std::sin(yaw - road.right_of(lane).curve.heading(p.x));
      const bool has_right = i + 1 < road.lanes.size();
      if (lateral < -kParallel && has_right) {
        return {road.lanes[i + 1].id, false};
      }
      return {lane.id, false};
    }
    if (std::abs(p.y - y_left) <= kOnDivider) {
      const double lateral = std::sin(yaw - road.left_of(lane).curve.heading(p.x));
      if (lateral <= kParallel || i == 0) {
        return {lane.id, false};
      }
      return {road.lanes[i - 1].id, false};
    }
    if (p.y > y_right && p.y < y_left) {
      return {lane.id, false};
    }
  }

  double best = std::numeric_limits<double>::infinity();
  LaneId best_id = road.lanes.front().id;
  for (const auto & lane : road.lanes) {
    const double y_left = road.left_of(lane)(p.x);
    const double y_right = road.right_of(lane)(p.x);
    const double dist = std::max({0.0, p.y - y_left, y_right - p.y});
    if (dist < best) {
      best = dist;
      best_id = lane.id;
    }
  }
  return {best_id, true};
}

/// Marks lanes as counter traffic: explicitly listed lanes plus any non-EGO
/// lane holding a vehicle that drives against the road direction.
inline void mark_counter_traffic(
  RoadModel & road, std::span<const LaneId> listed, std::span<const ObjectState> objects)
{
  for (auto & lane : road.lanes) {
    if (lane.id == LaneId::ego) {
      continue;
    }
    if (std::find(listed.begin(), listed.end(), lane.id) != listed.end()) {
      lane.direction = -1;
    }
  }
  for (const auto & object : objects) {
    if (object.kind != ObjectKind::co_vehicle) {
      continue;
    }
    const auto assoc = associate_lane(object, road);
    if (!assoc.lane || *assoc.lane == LaneId::ego || assoc.off_road) {
      continue;
    }
    if (std::cos(road.frame.yaw_to_road(object.yaw)) < 0.0) {
      for (auto & lane : road.lanes) {
        if (lane.id == *assoc.lane) {
          lane.direction = -1;
        }
      }
    }
  }
}

}  // namespace critsim

#endif  // CRITSIM__STREET_HPP_
