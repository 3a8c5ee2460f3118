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


#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "critsim/street.hpp"
#include "support.hpp"

namespace critsim
{
namespace
{

using testing::make_ego;
using testing::make_pedestrian;
using testing::make_vehicle;

// Independent oracle: Lagrange form of the interpolating quadratic.
Quadratic lagrange(Point2 p, Point2 q, Point2 r)
{
  Quadratic out;
  const std::array<Point2, 3> pts{p, q, r};
  for (std::size_t i = 0; i < 3; ++i) {
    const Point2 a = pts[(i + 1) % 3];
    const Point2 b = pts[(i + 2) % 3];
    const double den = (pts[i].x - a.x) * (pts[i].x - b.x);
    const double w = pts[i].y / den;
    out = out + Quadratic{w, -w * (a.x + b.x), w * a.x * b.x};
  }
  return out;
}

std::vector<LaneDivider> straight(std::initializer_list<double> ys)
{
  std::vector<LaneDivider> out;
  for (double y : ys) {
    out.push_back(fit_divider({-40.0, y}, {20.0, y}, {80.0, y}));
  }
  return out;
}

TEST(FitDivider, Parabola)
{
  const auto d = fit_divider({0, 0}, {1, 1}, {2, 4});
  EXPECT_NEAR(d.curve.a, 1.0, 1e-12);
  EXPECT_NEAR(d.curve.b, 0.0, 1e-12);
  EXPECT_NEAR(d.curve.c, 0.0, 1e-12);
  EXPECT_DOUBLE_EQ(d.x_near, 0.0);
  EXPECT_DOUBLE_EQ(d.x_far, 2.0);
}

TEST(FitDivider, Constant)
{
  const auto d = fit_divider({0, 1}, {1, 1}, {2, 1});
  EXPECT_NEAR(d.curve.a, 0.0, 1e-12);
  EXPECT_NEAR(d.curve.b, 0.0, 1e-12);
  EXPECT_NEAR(d.curve.c, 1.0, 1e-12);
}

TEST(FitDivider, RangeIsOrderedWhateverTheInputOrder)
{
  const auto d = fit_divider({50, 0}, {5, 0.2}, {20, 0.1});
  EXPECT_DOUBLE_EQ(d.x_near, 5.0);
  EXPECT_DOUBLE_EQ(d.x_far, 50.0);
}

TEST(FitDivider, DuplicateAbscissaIsDegenerate)
{
  EXPECT_THROW(fit_divider({1, 0}, {1, 1}, {2, 4}), GeometryError);
  EXPECT_THROW(fit_divider({1, 0}, {1, 0}, {2, 4}), GeometryError);
  EXPECT_THROW(fit_divider({1, 0}, {1 + 1e-15, 0}, {2, 4}), GeometryError);
}

TEST(FitDivider, RandomTripletsMatchLagrangeOracle)
{
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> xs(-20.0, 100.0);
  std::uniform_real_distribution<double> ys(-8.0, 8.0);
  for (int i = 0; i < 1000; ++i) {
    Point2 p{xs(rng), ys(rng)}, q{xs(rng), ys(rng)}, r{xs(rng), ys(rng)};
    if (std::min({std::abs(p.x - q.x), std::abs(q.x - r.x), std::abs(p.x - r.x)}) < 0.5) {
      continue;
    }
    const auto d = fit_divider(p, q, r);
    for (const Point2 & s : {p, q, r}) {
      EXPECT_LT(std::abs(d(s.x) - s.y), 1e-9);
    }
    const Quadratic o = lagrange(p, q, r);
    for (double x : {p.x, 0.5 * (p.x + r.x), q.x}) {
      EXPECT_NEAR(d(x), o(x), 1e-8 * (1.0 + std::abs(o(x))));
    }
  }
}

TEST(RoadFrame, RoundTrip)
{
  ObjectState ego = make_ego();
  ego.position = {12.0, -3.0};
  ego.yaw = 0.7;
  const RoadFrame f = RoadFrame::from(ego);
  EXPECT_NEAR(norm(f.to_road(ego.position)), 0.0, 1e-12);
  const Point2 p{3.0, 4.0};
  const Point2 back = f.to_global(f.to_road(p));
  EXPECT_NEAR(back.x, p.x, 1e-12);
  EXPECT_NEAR(back.y, p.y, 1e-12);
  const Point2 ahead = f.to_road(ego.position + Point2{std::cos(0.7), std::sin(0.7)} * 5.0);
  EXPECT_NEAR(ahead.x, 5.0, 1e-12);
  EXPECT_NEAR(ahead.y, 0.0, 1e-12);
}

TEST(ProjectOnto, MatchesDenseSearch)
{
  const Quadratic q{0.01, -0.1, 1.0};
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  for (int i = 0; i < 200; ++i) {
    const Point2 p{u(rng), u(rng) * 0.3};
    const auto proj = project_onto(q, p);
    double best = std::numeric_limits<double>::infinity();
    for (int k = -40000; k <= 40000; ++k) {
      const double x = k * 1e-3;
      best = std::min(best, norm(Point2{x, q(x)} - p));
    }
    EXPECT_NEAR(std::abs(proj.signed_distance), best, 1e-5);
    EXPECT_EQ(proj.signed_distance > 0.0, p.y > q(p.x));
  }
}

TEST(OffsetCurve, ZeroIsIdentity)
{
  const auto d = fit_divider({0, 0.3}, {30, 1.2}, {60, 0.1});
  EXPECT_EQ(offset_curve(d, 0.0), d);
}

TEST(OffsetCurve, StraightShiftsIntercept)
{
  const auto d = fit_divider({0, 1}, {10, 1}, {40, 1});
  const auto o = offset_curve(d, 2.5);
  EXPECT_NEAR(o.curve.a, 0.0, 1e-12);
  EXPECT_NEAR(o.curve.b, 0.0, 1e-12);
  EXPECT_NEAR(o.curve.c, 3.5, 1e-12);
}

// Dense exact-normal-offset oracle: every point of the true parallel curve
// must lie within 5 cm (vertically) of the refit.
TEST(OffsetCurve, CurvedRefitAgainstDenseOracle)
{
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> ua(-2e-3, 2e-3);
  std::uniform_real_distribution<double> ub(-0.15, 0.15);
  std::uniform_real_distribution<double> uoff(-7.0, 7.0);
  double worst = 0.0;
  for (int i = 0; i < 300; ++i) {
    const Quadratic c{ua(rng), ub(rng), 1.0};
    const LaneDivider d{c, -30.0, 90.0, false};
    const double off = uoff(rng);
    const LaneDivider o = offset_curve(d, off);
    for (int k = 0; k <= 2000; ++k) {
      const double x = d.x_near + (d.x_far - d.x_near) * k / 2000.0;
      const double s = c.slope(x);
      const double n = std::sqrt(1.0 + s * s);
      const Point2 t{x - off * s / n, c(x) + off / n};
      worst = std::max(worst, std::abs(o(t.x) - t.y));
    }
  }
  EXPECT_LT(worst, 0.05);
}

TEST(OffsetCurve, RoundTripWithinTenCentimetres)
{
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> ua(-2e-3, 2e-3);
  std::uniform_real_distribution<double> ub(-0.15, 0.15);
  std::uniform_real_distribution<double> uoff(-7.0, 7.0);
  for (int i = 0; i < 300; ++i) {
    const LaneDivider d{{ua(rng), ub(rng), 0.5}, 0.0, 80.0, false};
    const double off = uoff(rng);
    const LaneDivider back = offset_curve(offset_curve(d, off), -off);
    for (int k = 0; k <= 100; ++k) {
      const double x = d.x_near + 0.8 * k;
      EXPECT_LT(std::abs(back(x) - d(x)), 0.1);
    }
  }
}

TEST(BuildRoad, FourDividersGiveThreeLanes)
{
  const auto road = build_road(straight({-5.25, 1.75, 5.25, -1.75}), make_ego());
  ASSERT_EQ(road.lanes.size(), 3u);
  EXPECT_EQ(road.lanes[0].id, LaneId::left);
  EXPECT_EQ(road.lanes[1].id, LaneId::ego);
  EXPECT_EQ(road.lanes[2].id, LaneId::right);
  EXPECT_NEAR(road.left_of(road.lane(LaneId::ego))(0.0), 1.75, 1e-12);
  EXPECT_NEAR(road.right_of(road.lane(LaneId::left))(0.0), 1.75, 1e-12);
  EXPECT_FALSE(road.virtual_ego_lane);
  // Adjacent lanes share exactly one divider.
  EXPECT_EQ(road.lanes[0].right_divider, road.lanes[1].left_divider);
  EXPECT_EQ(road.lanes[1].right_divider, road.lanes[2].left_divider);
}

TEST(BuildRoad, NoDividersGiveVirtualLane)
{
  ObjectState ego = make_ego();
  ego.yaw = 1.0;
  const auto road = build_road({}, ego);
  ASSERT_EQ(road.lanes.size(), 1u);
  EXPECT_TRUE(road.virtual_ego_lane);
  const Lane & lane = road.lane(LaneId::ego);
  EXPECT_NEAR(road.left_of(lane)(0.0), 1.75, 1e-12);
  EXPECT_NEAR(road.right_of(lane)(0.0), -1.75, 1e-12);
  EXPECT_DOUBLE_EQ(road.left_of(lane).curve.b, 0.0);
  EXPECT_DOUBLE_EQ(road.frame.yaw, 1.0);
}

TEST(BuildRoad, TwoDividersGiveOneLaneWithoutNeighbors)
{
  const auto road = build_road(straight({1.75, -1.75}), make_ego());
  ASSERT_EQ(road.lanes.size(), 1u);
  EXPECT_TRUE(road.neighbors(LaneId::ego).empty());
}

TEST(BuildRoad, SingleNearbyDividerIsMirrored)
{
  const auto road = build_road(straight({1.6}), make_ego());
  ASSERT_EQ(road.lanes.size(), 1u);
  EXPECT_TRUE(road.virtual_ego_lane);
  EXPECT_NEAR(road.right_of(road.lane(LaneId::ego))(0.0), 1.6 - 3.5, 1e-9);
}

TEST(BuildRoad, CrossingDividersAreInconsistent)
{
  std::vector<LaneDivider> d{fit_divider({0, 2}, {20, 0}, {40, -2}), fit_divider({0, -2}, {20, 0}, {40, 2})};
  EXPECT_THROW(build_road(d, make_ego()), GeometryError);
}

TEST(BuildRoad, MissingSharedDividerIsSynthesized)
{
  const auto road = build_road(straight({5.25, -1.75, -5.25}), make_ego());
  EXPECT_EQ(road.synthesized_dividers, 1);
  ASSERT_EQ(road.lanes.size(), 3u);
  EXPECT_NEAR(road.left_of(road.lane(LaneId::ego))(0.0), 1.75, 1e-12);
  EXPECT_TRUE(road.left_of(road.lane(LaneId::ego)).synthesized);
}

TEST(AssociateLane, PedestrianEgoAndVehicles)
{
  const auto road = build_road(straight({5.25, 1.75, -1.75, -5.25}), make_ego());
  EXPECT_FALSE(associate_lane(make_pedestrian(1, 0, 0, 0, 1), road).lane.has_value());
  ObjectState far_ego = make_ego();
  far_ego.position = {0.0, 30.0};
  EXPECT_EQ(associate_lane(far_ego, road).lane, LaneId::ego);
  EXPECT_EQ(associate_lane(make_vehicle(1, 10, 3.5, 0, 10), road).lane, LaneId::left);
  EXPECT_EQ(associate_lane(make_vehicle(1, 10, -3.5, 0, 10), road).lane, LaneId::right);
  const auto off = associate_lane(make_vehicle(1, 10, 9.0, 0, 10), road);
  EXPECT_EQ(off.lane, LaneId::left);
  EXPECT_TRUE(off.off_road);
}

// Regression lock for the on-divider rule: the vehicle goes to the side its
// heading points to, and to the left lane when it is parallel.
TEST(AssociateLane, OnSharedDividerFollowsHeading)
{
  const auto road = build_road(straight({5.25, 1.75, -1.75, -5.25}), make_ego());
  EXPECT_EQ(associate_lane(make_vehicle(1, 10, 1.75, 0.1, 10), road).lane, LaneId::left);
  EXPECT_EQ(associate_lane(make_vehicle(1, 10, 1.75, -0.1, 10), road).lane, LaneId::ego);
  EXPECT_EQ(associate_lane(make_vehicle(1, 10, 1.75, 0.0, 10), road).lane, LaneId::left);
  EXPECT_EQ(associate_lane(make_vehicle(1, 10, -1.75, -0.1, 10), road).lane, LaneId::right);
  EXPECT_EQ(associate_lane(make_vehicle(1, 10, -1.75, 0.1, 10), road).lane, LaneId::ego);
  EXPECT_EQ(associate_lane(make_vehicle(1, 10, -1.75, 0.0, 10), road).lane, LaneId::ego);
}

TEST(AssociateLane, LanesPartitionTheRoad)
{
  ObjectState ego = make_ego();
  ego.yaw = 0.3;
  ego.position = {5.0, 2.0};
  const RoadFrame f = RoadFrame::from(ego);
  std::vector<DividerTriplet> triplets;
  for (double y : {5.4, 1.8, -1.7, -5.1}) {
    triplets.push_back({f.to_global({-30, y + 0.0}), f.to_global({20, y + 0.4}), f.to_global({70, y + 2.0})});
  }
  const auto road = build_road(fit_dividers(triplets, f), ego);
  ASSERT_EQ(road.lanes.size(), 3u);
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> ux(-30.0, 70.0);
  std::uniform_real_distribution<double> uy(-6.0, 8.0);
  for (int i = 0; i < 2000; ++i) {
    const Point2 local{ux(rng), uy(rng)};
    int inside = 0;
    std::optional<LaneId> expected;
    for (const auto & lane : road.lanes) {
      if (local.y > road.right_of(lane)(local.x) + 1e-6 && local.y < road.left_of(lane)(local.x) - 1e-6) {
        ++inside;
        expected = lane.id;
      }
    }
    ASSERT_LE(inside, 1);
    if (inside == 1) {
      const auto a = associate_lane(make_vehicle(1, f.to_global(local).x, f.to_global(local).y, 0.3, 10), road);
      EXPECT_EQ(a.lane, expected);
      EXPECT_FALSE(a.off_road);
    }
  }
}

TEST(CounterTraffic, ListedAndInferred)
{
  auto road = build_road(straight({5.25, 1.75, -1.75, -5.25}), make_ego());
  const std::vector<LaneId> listed{LaneId::right};
  const std::vector<ObjectState> objects{make_vehicle(1, 30, 3.5, kPi, 10)};
  mark_counter_traffic(road, listed, objects);
  EXPECT_EQ(road.lane(LaneId::left).direction, -1);
  EXPECT_EQ(road.lane(LaneId::ego).direction, +1);
  EXPECT_EQ(road.lane(LaneId::right).direction, -1);
}

TEST(FitDividers, ParallelMatchesSequential)
{
  const auto triplets = testing::straight_dividers({5.25, 1.75, -1.75, -5.25});
  const RoadFrame f = RoadFrame::from(make_ego());
  EXPECT_EQ(fit_dividers(triplets, f, WorkerPolicy::fixed(4)), fit_dividers(triplets, f));
}

}  // namespace
}  // namespace critsim
