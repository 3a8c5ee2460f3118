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

#ifndef CRITSIM__HYPOTHESES_HPP_
#define CRITSIM__HYPOTHESES_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "critsim/errors.hpp"
#include "critsim/motion.hpp"
#include "critsim/scenario.hpp"
#include "critsim/street.hpp"

namespace critsim
{

enum class ProfileKind { acceleration, slip };

/// Longitudinal input over time: holds `initial` until `latency` has passed,
/// then moves towards `target` at no more than `rate_limit` per second.
struct AccelerationProfile
{
  int id{0};
  ProfileKind kind{ProfileKind::acceleration};
  double target{0.0};
  double initial{0.0};
  double latency{0.0};
  double rate_limit{std::numeric_limits<double>::infinity()};

  double value_at(double t) const
  {
    if (t < latency) {
      return initial;
    }
    const double reach = rate_limit * (t - latency);
    return target >= initial ? std::min(target, initial + reach) : std::max(target, initial - reach);
  }

  bool operator==(const AccelerationProfile &) const = default;
};

/// Sample targets over [-max, max]: the minimum, `count - 3` further values
/// equally spaced in the negative region, zero, and the maximum.
inline std::vector<double> profile_targets(int count, double max)
{
  if (count < 3) {
    throw ScenarioError("at least 3 acceleration profiles are required");
  }
  const int negatives = count - 2;
  std::vector<double> targets;
  targets.reserve(static_cast<std::size_t>(count));
  for (int k = negatives; k >= 1; --k) {
    targets.push_back(-max * k / negatives);
  }
  targets.push_back(0.0);
  targets.push_back(max);
  return targets;
}

/// h_acc profiles of the given kind. `initial` is the current v dot (or slip).
inline std::vector<AccelerationProfile> build_profiles(
  const SimulationConfig & config, ProfileKind kind, double initial = 0.0)
{
  const bool slip = kind == ProfileKind::slip;
  const double max = slip ? config.max_slip : config.max_acceleration;
  const double rate = slip ? config.slip_for_acceleration(config.jerk_limit) : config.jerk_limit;
  const auto targets = profile_targets(config.acceleration_profiles, max);
  std::vector<AccelerationProfile> out;
  out.reserve(targets.size());
  for (std::size_t i = 0; i < targets.size(); ++i) {
    out.push_back({static_cast<int>(i), kind, targets[i], std::clamp(initial, -max, max),
                   config.profile_latency, rate});
  }
  return out;
}

/// Curve segment, parallel to a lane divider, that steers the vehicle until
/// `active_until`.
struct PathSection
{
  LaneDivider curve;
  LaneId lane{LaneId::ego};
  double active_until{std::numeric_limits<double>::infinity()};

  bool operator==(const PathSection &) const = default;
};

/// One complete path: one section per sampling instance.
struct PathSpec
{
  int object_id{0};
  int path_id{0};
  std::vector<PathSection> sections;
  int direction{+1};  // travel direction along the road x axis
  bool counter_traffic{false};
  int lane_changes{0};

  const PathSection & active(double t) const
  {
    for (const auto & s : sections) {
      if (t < s.active_until) {
        return s;
      }
    }
    return sections.back();
  }

  bool operator==(const PathSpec &) const = default;
};

struct Pose
{
  double time{0.0};
  Point2 position{};
  double yaw{0.0};
  double velocity{0.0};
  double sideslip{0.0};
  double steering{0.0};

  bool operator==(const Pose &) const = default;
};

/// Time-discretized result of one hypothesis. Pose k holds the state at
/// t = (k + 1) tau, so the last pose sits on the horizon.
struct Trajectory
{
  int object_id{0};
  int hypothesis_id{0};
  int profile_id{0};
  int path_id{0};
  std::vector<Pose> poses;
  bool drivable{true};

  double profile_target{0.0};  // longitudinal target as acceleration [m/s^2]
  int lane_changes{0};
  bool counter_traffic{false};

  bool operator==(const Trajectory &) const = default;
};

enum class VehicleModel { one_track, two_track };

/// Lateral steering law; returns degrees at the wheels.
inline double controller_law(double velocity, double path_distance, double yaw_error)
{
  const double gain = std::abs((-0.018 * velocity + 1.5) * path_distance);
  return (gain + 0.5) * path_distance + (-gain + 9.5) * (3.8197 * yaw_error);
}

struct TrackingError
{
  double path_distance{0.0};  // > 0 when the path lies left of the predicted position
  double yaw_error{0.0};      // path direction minus vehicle yaw [rad]
};

inline double prediction_time(double velocity, const SimulationConfig & config)
{
  return std::clamp(
    config.prediction_time_base + config.prediction_time_gain * velocity, config.prediction_time_base,
    config.prediction_time_max);
}

/// Errors of the predicted center of gravity against a path section.
inline TrackingError tracking_error(
  const VehicleDynamicState & state, const PathSection & section, const RoadFrame & frame,
  int direction, double t_pred)
{
  const double course = state.yaw + state.sideslip;
  const Point2 predicted =
    state.position + Point2{std::cos(course), std::sin(course)} * (state.velocity * t_pred);
  const Point2 q = frame.to_road(predicted);
  const CurveProjection proj = project_onto(section.curve.curve, q);
  const double path_heading = direction < 0 ? wrap_angle(proj.heading + kPi) : proj.heading;
  const Point2 along{std::cos(path_heading), std::sin(path_heading)};
  const Point2 offset = proj.foot - q;
  const double side = cross(along, offset);
  const double dist = norm(offset);
  return {side >= 0.0 ? dist : -dist, wrap_angle(path_heading - frame.yaw_to_road(state.yaw))};
}

/// Steering angle [rad] for the next step: the steering law (interpreted in
/// degrees), clamped to the steering limit and rate-limited against
/// `previous_steering`.
inline double lateral_controller(
  const VehicleDynamicState & state, const PathSection & section, const RoadFrame & frame,
  int direction, double previous_steering, const VehicleParameters & params,
  const SimulationConfig & config)
{
  const TrackingError e =
    tracking_error(state, section, frame, direction, prediction_time(state.velocity, config));
  const double command = controller_law(state.velocity, e.path_distance, e.yaw_error) * kPi / 180.0;
  const double limited = std::clamp(command, -params.max_steering_angle, params.max_steering_angle);
  const double max_delta = params.max_steering_rate * config.step;
  return std::clamp(limited, previous_steering - max_delta, previous_steering + max_delta);
}

inline int travel_direction(const ObjectState & object, const RoadFrame & frame)
{
  return std::cos(frame.yaw_to_road(object.yaw)) >= 0.0 ? +1 : -1;
}

/// Steps a vehicle through the horizon under one profile and one path.
inline Trajectory rollout_vehicle(
  const ObjectState & object, const VehicleParameters & params, VehicleModel model,
  const AccelerationProfile & profile, const PathSpec & path, const RoadFrame & frame,
  const SimulationConfig & config)
{
  const double tau = config.step;
  const int steps = config.steps();
  const double wheelbase = params.wheelbase();

  Trajectory traj;
  traj.object_id = object.id;
  traj.profile_id = profile.id;
  traj.path_id = path.path_id;
  traj.lane_changes = path.lane_changes;
  traj.counter_traffic = path.counter_traffic;
  traj.profile_target =
    profile.kind == ProfileKind::slip ? config.acceleration_for_slip(profile.target) : profile.target;
  traj.poses.reserve(static_cast<std::size_t>(steps));

  VehicleDynamicState state = VehicleDynamicState::from(object);
  double steering = std::clamp(
    std::atan(state.yaw_rate * wheelbase / std::max(state.velocity, config.min_model_speed)),
    -params.max_steering_angle, params.max_steering_angle);

  for (int k = 0; k < steps; ++k) {
    const double t = k * tau;
    steering = lateral_controller(state, path.active(t), frame, path.direction, steering, params, config);
    const double command = profile.value_at(t);

    StateDerivatives d;
    const bool dynamic = state.velocity >= config.min_model_speed;
    if (model == VehicleModel::one_track) {
      d.accel = command;
      if (dynamic) {
        const auto ot = one_track_derivatives(state, steering, params);
        d.sideslip_rate = ot.sideslip_rate;
        d.yaw_accel = ot.yaw_accel;
      }
    } else {
      d = two_track_derivatives(
            state, steering, command, params, config.friction, config.slip_stiffness_per_load,
            config.gravity)
            .derivatives;
      if (!dynamic) {
        d.sideslip_rate = 0.0;
        d.yaw_accel = 0.0;
      }
    }
    if (!dynamic) {
      // Kinematic single-track below the model's validity range.
      const double tan_steer = std::tan(steering);
      state.sideslip = std::atan(params.cog_to_rear * tan_steer / wheelbase);
      state.yaw_rate = state.velocity * std::cos(state.sideslip) * tan_steer / wheelbase;
    }
    // No reversing: brake to a standstill and stay there.
    if (state.velocity <= 0.0 && d.accel < 0.0) {
      d.accel = 0.0;
    } else if (state.velocity + d.accel * tau < 0.0) {
      d.accel = -state.velocity / tau;
    }

    VehicleDynamicState next = integrate_vehicle(state, d, tau);
    if (next.velocity <= 0.0) {
      next.velocity = 0.0;
      next.yaw_rate = 0.0;
      next.sideslip = 0.0;
    }
    const double course = state.yaw + state.sideslip;
    if (dot(next.position - state.position, {std::cos(course), std::sin(course)}) < 0.0) {
      next.position = state.position;
    }
    if (std::abs(next.velocity * next.yaw_rate) > 1.05 * config.friction * config.gravity) {
      traj.drivable = false;
    }
    state = next;
    traj.poses.push_back({(k + 1) * tau, state.position, state.yaw, state.velocity, state.sideslip, steering});
  }
  return traj;
}

/// Pedestrian hypotheses: a fixed heading and a constant acceleration.
struct PedestrianHypothesis
{
  double heading{0.0};
  double accel{0.0};
};

inline std::vector<double> pedestrian_headings(const SimulationConfig & config)
{
  std::vector<double> out;
  for (int k = 0; k < config.co_paths; ++k) {
    out.push_back(wrap_angle(2.0 * kPi * k / config.co_paths));
  }
  return out;
}

inline std::vector<double> pedestrian_accelerations(const SimulationConfig & config)
{
  std::vector<double> out;
  const int n = config.acceleration_profiles;
  const double a = config.pedestrian_max_acceleration;
  for (int k = 0; k < n; ++k) {
    out.push_back(-a + 2.0 * a * k / (n - 1));
  }
  return out;
}

inline Trajectory rollout_pedestrian(
  const ObjectState & object, const PedestrianHypothesis & hypothesis, const SimulationConfig & config)
{
  Trajectory traj;
  traj.object_id = object.id;
  traj.profile_target = hypothesis.accel;
  traj.poses.reserve(static_cast<std::size_t>(config.steps()));
  ObjectState state = object;
  for (int k = 0; k < config.steps(); ++k) {
    state = integrate_pedestrian(state, hypothesis.heading, hypothesis.accel, config.step,
                                 config.pedestrian_max_speed);
    traj.poses.push_back({(k + 1) * config.step, state.position, state.yaw, state.velocity, 0.0, 0.0});
  }
  return traj;
}

/// Reference path of a vehicle: the center line of `lane` for the whole horizon.
inline PathSpec lane_center_path(const ObjectState & object, const RoadModel & road, LaneId lane)
{
  const Lane & l = road.lane(lane);
  const LaneDivider & right = road.right_of(l);
  const LaneDivider & left = road.left_of(l);
  PathSpec path;
  path.object_id = object.id;
  path.path_id = -1;
  path.direction = travel_direction(object, road.frame);
  path.sections.push_back(
    {LaneDivider{road.center_line(l), std::min(left.x_near, right.x_near), std::max(left.x_far, right.x_far),
                 false},
     lane, std::numeric_limits<double>::infinity()});
  path.counter_traffic = l.direction != path.direction;
  return path;
}

/// Expected behavior: constant current acceleration towards the middle of the
/// current lane; pedestrians walk straight on at constant speed.
inline Trajectory build_reference_trajectory(
  const ObjectState & object, const VehicleParameters & params, const RoadModel & road,
  const SimulationConfig & config)
{
  if (object.kind == ObjectKind::pedestrian) {
    Trajectory ref = rollout_pedestrian(object, {object.yaw, 0.0}, config);
    ref.hypothesis_id = -1;
    ref.profile_id = -1;
    ref.path_id = -1;
    ref.profile_target = 0.0;
    return ref;
  }
  const auto assoc = associate_lane(object, road);
  const PathSpec path = lane_center_path(object, road, assoc.lane.value_or(LaneId::ego));
  const bool ego = object.kind == ObjectKind::ego_vehicle;
  AccelerationProfile profile;
  profile.id = -1;
  profile.kind = ego ? ProfileKind::slip : ProfileKind::acceleration;
  profile.initial = ego ? std::clamp(config.slip_for_acceleration(object.acceleration), -config.max_slip,
                                     config.max_slip)
                        : std::clamp(object.acceleration, -config.max_acceleration, config.max_acceleration);
  profile.target = profile.initial;
  Trajectory ref = rollout_vehicle(
    object, params, ego ? VehicleModel::two_track : VehicleModel::one_track, profile, path, road.frame, config);
  ref.hypothesis_id = -1;
  ref.profile_target = object.acceleration;
  return ref;
}

namespace detail
{

inline std::size_t pose_index_at(const Trajectory & traj, double t, double tau)
{
  const auto k = static_cast<long>(std::lround(t / tau)) - 1;
  return static_cast<std::size_t>(std::clamp<long>(k, 0, static_cast<long>(traj.poses.size()) - 1));
}

}  // namespace detail

/// Complete paths of a vehicle. At every sampling instance the reference
/// position fixes the abscissa; the own lane gets `own_lane_samples` and each
/// neighbor lane `neighbor_lane_samples` points equally spaced across the
/// lane. Each point yields one section parallel to the lane's right divider.
/// The EGO combines sections across instances (s^n paths); other vehicles
/// keep one lateral slot across all instances (s paths).
inline std::vector<PathSpec> sample_paths(
  const ObjectState & object, const RoadModel & road, const Trajectory & reference,
  const SimulationConfig & config)
{
  if (object.kind == ObjectKind::pedestrian) {
    return {};
  }
  const auto assoc = associate_lane(object, road);
  const LaneId own = assoc.lane.value_or(LaneId::ego);
  const auto neighbors = road.neighbors(own);
  const int direction = travel_direction(object, road.frame);

  // Slots ordered left to right over the own lane and its neighbors.
  struct Slot
  {
    LaneId lane;
    double fraction;  // of the lane width, from the right divider
  };
  std::vector<Slot> slots;
  for (const auto & lane : road.lanes) {
    const bool is_own = lane.id == own;
    const bool is_neighbor = std::find(neighbors.begin(), neighbors.end(), lane.id) != neighbors.end();
    if (!is_own && !is_neighbor) {
      continue;
    }
    const int n = is_own ? config.own_lane_samples : config.neighbor_lane_samples;
    for (int k = n; k >= 1; --k) {
      slots.push_back({lane.id, static_cast<double>(k) / (n + 1)});
    }
  }
  const std::size_t per_instance = slots.size();
  const std::size_t instances = config.sampling_instances.size();

  // sections[i][s]: section for instance i, slot s
  std::vector<std::vector<PathSection>> sections(instances);
  for (std::size_t i = 0; i < instances; ++i) {
    const double t = config.sampling_instances[i];
    const Pose & pose = reference.poses[detail::pose_index_at(reference, t, config.step)];
    const double x = road.frame.to_road(pose.position).x;
    const double until = i + 1 == instances ? std::numeric_limits<double>::infinity() : t;
    for (const auto & slot : slots) {
      const Lane & lane = road.lane(slot.lane);
      const LaneDivider & right = road.right_of(lane);
      const double vertical = road.left_of(lane)(x) - right(x);
      const double slope = right.curve.slope(x);
      const double offset = slot.fraction * vertical / std::sqrt(1.0 + slope * slope);
      sections[i].push_back({offset_curve(right, offset), slot.lane, until});
    }
  }

  auto finish = [&](PathSpec & path) {
    path.object_id = object.id;
    path.direction = direction;
    LaneId prev = own;
    for (const auto & s : path.sections) {
      if (s.lane != prev) {
        ++path.lane_changes;
      }
      prev = s.lane;
      if (road.lane(s.lane).direction != direction) {
        path.counter_traffic = true;
      }
    }
  };

  std::vector<PathSpec> paths;
  if (object.kind == ObjectKind::ego_vehicle) {
    std::size_t total = 1;
    for (std::size_t i = 0; i < instances; ++i) {
      total *= per_instance;
    }
    paths.reserve(total);
    for (std::size_t id = 0; id < total; ++id) {
      PathSpec path;
      path.path_id = static_cast<int>(id);
      std::size_t rest = id;
      std::vector<std::size_t> digits(instances);
      for (std::size_t i = instances; i-- > 0;) {
        digits[i] = rest % per_instance;
        rest /= per_instance;
      }
      for (std::size_t i = 0; i < instances; ++i) {
        path.sections.push_back(sections[i][digits[i]]);
      }
      finish(path);
      paths.push_back(std::move(path));
    }
  } else {
    for (std::size_t s = 0; s < per_instance; ++s) {
      PathSpec path;
      path.path_id = static_cast<int>(s);
      for (std::size_t i = 0; i < instances; ++i) {
        path.sections.push_back(sections[i][s]);
      }
      finish(path);
      paths.push_back(std::move(path));
    }
  }
  return paths;
}

/// r_tra for `co_count` collision objects on a full three-lane road.
inline std::int64_t count_trajectories(std::int64_t co_count, const SimulationConfig & config)
{
  const std::int64_t h_acc = config.acceleration_profiles;
  return co_count * h_acc * config.co_paths + h_acc * config.ego_paths(2);
}

}  // namespace critsim

#endif  // CRITSIM__HYPOTHESES_HPP_
