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

// Scenario builders shared by the unit tests and the acceptance runner.

#ifndef CRITSIM_TESTS__SUPPORT_HPP_
#define CRITSIM_TESTS__SUPPORT_HPP_

#include <initializer_list>
#include <vector>

#include "critsim/scenario.hpp"

namespace critsim::testing
{

inline ObjectState make_ego(double v = 15.0, double accel = 0.0)
{
  ObjectState ego;
  ego.id = 0;
  ego.kind = ObjectKind::ego_vehicle;
  ego.velocity = v;
  ego.acceleration = accel;
  ego.length = 4.4;
  ego.width = 1.8;
  return ego;
}

inline ObjectState make_vehicle(int id, double x, double y, double yaw, double v, double accel = 0.0)
{
  ObjectState o;
  o.id = id;
  o.kind = ObjectKind::co_vehicle;
  o.position = {x, y};
  o.yaw = yaw;
  o.velocity = v;
  o.acceleration = accel;
  o.length = 4.5;
  o.width = 1.8;
  return o;
}

inline ObjectState make_pedestrian(int id, double x, double y, double yaw, double v)
{
  ObjectState o;
  o.id = id;
  o.kind = ObjectKind::pedestrian;
  o.position = {x, y};
  o.yaw = yaw;
  o.velocity = v;
  return o;
}

/// Straight dividers at the given lateral positions, sampled at x = -40, 20, 80.
inline std::vector<DividerTriplet> straight_dividers(std::initializer_list<double> ys)
{
  std::vector<DividerTriplet> out;
  for (double y : ys) {
    out.push_back({Point2{-40.0, y}, Point2{20.0, y}, Point2{80.0, y}});
  }
  return out;
}

/// Three 3.5 m lanes with the EGO centered in the middle one.
inline RawScenario three_lane_scenario(std::vector<ObjectState> objects = {}, double ego_speed = 15.0)
{
  RawScenario raw;
  raw.ego = make_ego(ego_speed);
  raw.objects = std::move(objects);
  raw.dividers = straight_dividers({5.25, 1.75, -1.75, -5.25});
  return raw;
}

/// `count` COs in the EGO lane, alternating ahead of and behind the EGO.
inline std::vector<ObjectState> ego_lane_traffic(int count)
{
  std::vector<ObjectState> out;
  for (int k = 0; k < count; ++k) {
    const double gap = 12.0 * (k / 2 + 1);
    out.push_back(make_vehicle(k + 1, k % 2 == 0 ? gap : -gap, 0.0, 0.0, 15.0));
  }
  return out;
}

}  // namespace critsim::testing

#endif  // CRITSIM_TESTS__SUPPORT_HPP_
