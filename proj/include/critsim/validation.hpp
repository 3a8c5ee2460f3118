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

#ifndef CRITSIM__VALIDATION_HPP_
#define CRITSIM__VALIDATION_HPP_

#include <algorithm>
#include <cmath>
#include <set>
#include <span>
#include <string>

#include "critsim/errors.hpp"
#include "critsim/scenario.hpp"
#include "critsim/street.hpp"

namespace critsim
{

namespace detail
{

inline void require_finite(double value, const std::string & what)
{
  if (!std::isfinite(value)) {
    throw ScenarioError("non-finite value in " + what);
  }
}

inline void check_object(const ObjectState & o, const std::string & name)
{
  require_finite(o.position.x, name + ".x");
  require_finite(o.position.y, name + ".y");
  require_finite(o.yaw, name + ".yaw");
  require_finite(o.velocity, name + ".v");
  require_finite(o.sideslip, name + ".beta");
  require_finite(o.yaw_rate, name + ".yaw_rate");
  require_finite(o.acceleration, name + ".accel");
  require_finite(o.length, name + ".length");
  require_finite(o.width, name + ".width");
  if (o.height) {
    require_finite(*o.height, name + ".height");
  }
  if (o.velocity < 0.0) {
    throw ScenarioError(name + ": velocity must be >= 0");
  }
}

}  // namespace detail

/// Checks a raw scenario and resolves everything downstream stages need:
/// vehicle classes, pedestrian footprints and speed clamps, steering limits.
/// Throws ScenarioError on ill-formed input.
inline Scenario validate_scenario(
  const RawScenario & raw,
  std::span<const VehicleClassRecord> class_table = default_vehicle_class_table())
{
  raw.config.validate();
  if (!raw.ego) {
    throw ScenarioError("missing EGO state");
  }
  if (raw.dividers.size() > 4) {
    throw ScenarioError("more than 4 lane dividers");
  }
  detail::require_finite(raw.timestamp, "timestamp");

  Scenario s;
  s.timestamp = raw.timestamp;
  s.config = raw.config;
  s.counter_traffic_lanes = raw.counter_traffic_lanes;

  s.ego = *raw.ego;
  s.ego.kind = ObjectKind::ego_vehicle;
  detail::check_object(s.ego, "ego");
  if (!(s.ego.length > 0.0) || !(s.ego.width > 0.0)) {
    throw ScenarioError("ego: length and width must be positive");
  }
  s.ego_parameters = raw.ego_parameters ? *raw.ego_parameters
                                        : classify_vehicle(s.ego.length, s.ego.width, s.ego.height, class_table);
  s.ego_parameters.max_steering_angle = s.config.max_steering_angle;
  s.ego_parameters.max_steering_rate = s.config.max_steering_rate;

  std::set<int> ids{s.ego.id};
  for (std::size_t k = 0; k < raw.objects.size(); ++k) {
    ObjectState o = raw.objects[k];
    const std::string name = "objects[" + std::to_string(k) + "]";
    if (o.kind == ObjectKind::ego_vehicle) {
      throw ScenarioError(name + ": only one EGO vehicle is allowed");
    }
    if (!ids.insert(o.id).second) {
      throw ScenarioError(name + ": duplicate object id " + std::to_string(o.id));
    }
    if (o.kind == ObjectKind::pedestrian) {
      if (!(o.length > 0.0)) {
        o.length = s.config.pedestrian_length;
      }
      if (!(o.width > 0.0)) {
        o.width = s.config.pedestrian_width;
      }
      o.sideslip = 0.0;
    }
    detail::check_object(o, name);
    if (!(o.length > 0.0) || !(o.width > 0.0)) {
      throw ScenarioError(name + ": length and width must be positive");
    }
    VehicleParameters params;
    if (o.kind == ObjectKind::pedestrian) {
      o.velocity = std::min(o.velocity, s.config.pedestrian_max_speed);
    } else {
      params = classify_vehicle(o.length, o.width, o.height, class_table);
      params.max_steering_angle = s.config.max_steering_angle;
      params.max_steering_rate = s.config.max_steering_rate;
    }
    s.objects.push_back(o);
    s.object_parameters.push_back(params);
  }

  const RoadFrame frame = RoadFrame::from(s.ego);
  for (std::size_t k = 0; k < raw.dividers.size(); ++k) {
    for (const auto & p : raw.dividers[k]) {
      detail::require_finite(p.x, "dividers[" + std::to_string(k) + "]");
      detail::require_finite(p.y, "dividers[" + std::to_string(k) + "]");
    }
    try {
      const auto & t = raw.dividers[k];
      (void)fit_divider(frame.to_road(t[0]), frame.to_road(t[1]), frame.to_road(t[2]));
    } catch (const GeometryError &) {
      throw ScenarioError("degenerate divider: dividers[" + std::to_string(k) + "]");
    }
  }
  s.dividers = raw.dividers;
  return s;
}

}  // namespace critsim

#endif  // CRITSIM__VALIDATION_HPP_
