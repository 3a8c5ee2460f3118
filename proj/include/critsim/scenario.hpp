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

#ifndef CRITSIM__SCENARIO_HPP_
#define CRITSIM__SCENARIO_HPP_

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "critsim/errors.hpp"

namespace critsim
{

inline constexpr double kPi = 3.14159265358979323846;

struct Point2
{
  double x{0.0};
  double y{0.0};

  constexpr Point2 operator+(Point2 o) const { return {x + o.x, y + o.y}; }
  constexpr Point2 operator-(Point2 o) const { return {x - o.x, y - o.y}; }
  constexpr Point2 operator*(double s) const { return {x * s, y * s}; }
  bool operator==(const Point2 &) const = default;
};

inline constexpr double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline constexpr double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point2 a) { return std::hypot(a.x, a.y); }

/// Wraps an angle to (-pi, pi].
inline double wrap_angle(double angle)
{
  angle = std::remainder(angle, 2.0 * kPi);
  return angle <= -kPi ? angle + 2.0 * kPi : angle;
}

enum class ObjectKind { ego_vehicle, co_vehicle, pedestrian };

inline constexpr std::string_view to_string(ObjectKind kind)
{
  switch (kind) {
    case ObjectKind::ego_vehicle:
      return "ego_vehicle";
    case ObjectKind::co_vehicle:
      return "vehicle";
    case ObjectKind::pedestrian:
      return "pedestrian";
  }
  return "unknown";
}

/// Lanes relative to the EGO lane; ordered left to right.
enum class LaneId { left, ego, right };

inline constexpr std::string_view to_string(LaneId lane)
{
  switch (lane) {
    case LaneId::left:
      return "left";
    case LaneId::ego:
      return "ego";
    case LaneId::right:
      return "right";
  }
  return "unknown";
}

struct ObjectState
{
  int id{0};
  ObjectKind kind{ObjectKind::co_vehicle};
  Point2 position{};
  double yaw{0.0};           // [rad], global frame
  double velocity{0.0};      // [m/s] over ground
  double sideslip{0.0};      // [rad], vehicles only
  double yaw_rate{0.0};      // [rad/s]
  double acceleration{0.0};  // [m/s^2]
  double length{0.0};        // [m]
  double width{0.0};         // [m]
  std::optional<double> height;

  bool is_vehicle() const { return kind != ObjectKind::pedestrian; }
  bool operator==(const ObjectState &) const = default;
};

enum class VehicleClass {
  quadricycle,
  supermini,
  small_family,
  large_family,
  executive,
  multi_purpose,
  off_roader,
  cargo,
};

inline constexpr std::string_view to_string(VehicleClass c)
{
  switch (c) {
    case VehicleClass::quadricycle:
      return "quadricycle";
    case VehicleClass::supermini:
      return "supermini";
    case VehicleClass::small_family:
      return "small_family";
    case VehicleClass::large_family:
      return "large_family";
    case VehicleClass::executive:
      return "executive";
    case VehicleClass::multi_purpose:
      return "multi_purpose";
    case VehicleClass::off_roader:
      return "off_roader";
    case VehicleClass::cargo:
      return "cargo";
  }
  return "unknown";
}

struct VehicleParameters
{
  VehicleClass vehicle_class{VehicleClass::small_family};
  double mass{0.0};                       // [kg]
  double yaw_inertia{0.0};                // [kg m^2]
  double cog_to_front{0.0};               // l_f [m]
  double cog_to_rear{0.0};                // l_r [m]
  double cornering_stiffness_front{0.0};  // [N/rad], per axle
  double cornering_stiffness_rear{0.0};   // [N/rad], per axle
  double track_width{0.0};                // [m]
  double max_steering_angle{0.6};         // [rad] at the wheels
  double max_steering_rate{0.8};          // [rad/s] at the wheels

  double wheelbase() const { return cog_to_front + cog_to_rear; }
  bool operator==(const VehicleParameters &) const = default;
};

/// One row of the classification table: dimension limits plus the physical
/// parameters assigned to vehicles of that class.
struct VehicleClassRecord
{
  VehicleClass vehicle_class;
  bool tall;          // only selectable when a height above the tall threshold is known
  double max_length;  // upper bound, inclusive
  double max_width;   // upper bound, inclusive
  VehicleParameters parameters;

  bool operator==(const VehicleClassRecord &) const = default;
};

inline constexpr int kVehicleClassTableVersion = 1;
inline constexpr double kTallVehicleHeight = 1.9;  // [m]

/// Built-in copy of data/vehicle_classes.json. Values are engineering
/// estimates for European segment averages.
inline std::span<const VehicleClassRecord> default_vehicle_class_table()
{
  constexpr double inf = std::numeric_limits<double>::infinity();
  using V = VehicleClass;
  static const std::array<VehicleClassRecord, 8> table{{
    {V::quadricycle, false, 3.20, 1.55, {V::quadricycle, 550, 500, 0.85, 1.05, 30000, 33000, 1.30, 0.6, 0.8}},
    {V::supermini, false, 3.95, 1.75, {V::supermini, 1050, 1300, 1.00, 1.45, 55000, 60000, 1.45, 0.6, 0.8}},
    {V::small_family, false, 4.40, 1.82, {V::small_family, 1300, 1900, 1.10, 1.55, 65000, 72000, 1.52, 0.6, 0.8}},
    {V::large_family, false, 4.75, 1.86, {V::large_family, 1500, 2500, 1.20, 1.55, 75000, 82000, 1.56, 0.6, 0.8}},
    {V::executive, false, 5.05, 1.92, {V::executive, 1750, 3200, 1.30, 1.60, 85000, 92000, 1.60, 0.6, 0.8}},
    {V::multi_purpose, false, inf, inf, {V::multi_purpose, 1900, 3500, 1.35, 1.65, 90000, 98000, 1.62, 0.6, 0.8}},
    {V::off_roader, true, 5.00, 2.05, {V::off_roader, 2100, 3800, 1.35, 1.50, 95000, 100000, 1.65, 0.6, 0.8}},
    {V::cargo, true, inf, inf, {V::cargo, 3000, 7000, 1.60, 2.00, 120000, 140000, 1.75, 0.6, 0.8}},
  }};
  return table;
}

/// Picks the first class (in table order) whose length and width limits both
/// admit the vehicle; a dimension exactly on a limit stays in the lower class.
/// The two tall classes are only candidates when a height at or above
/// kTallVehicleHeight is known; otherwise only the six base classes are used.
/// If nothing admits the vehicle, the last candidate class is returned.
inline VehicleParameters classify_vehicle(
  double length, double width, std::optional<double> height,
  std::span<const VehicleClassRecord> table = default_vehicle_class_table())
{
  const bool tall = height.has_value() && *height >= kTallVehicleHeight;
  const VehicleClassRecord * chosen = nullptr;
  for (const auto & record : table) {
    if (record.tall != tall) {
      continue;
    }
    chosen = &record;
    if (length <= record.max_length && width <= record.max_width) {
      break;
    }
  }
  if (chosen == nullptr) {
    throw ScenarioError("vehicle class table has no candidate class");
  }
  VehicleParameters params = chosen->parameters;
  // Keep the axles inside the body for objects shorter than the class average.
  const double max_wheelbase = 0.8 * length;
  if (length > 0.0 && params.wheelbase() > max_wheelbase) {
    const double scale = max_wheelbase / params.wheelbase();
    params.cog_to_front *= scale;
    params.cog_to_rear *= scale;
  }
  return params;
}

enum class CollisionMode { paper, exact };

inline constexpr std::string_view to_string(CollisionMode mode)
{
  return mode == CollisionMode::paper ? "paper" : "exact";
}

/// Every tunable of the pipeline. Defaults reproduce the reference setup:
/// 2 s horizon at 20 ms, 6 profiles, 3 + 2 + 2 lateral samples at 1.0/1.5/2.0 s.
struct SimulationConfig
{
  double horizon{2.0};  // T [s]
  double step{0.02};    // tau [s]

  int acceleration_profiles{6};  // h_acc
  int own_lane_samples{3};
  int neighbor_lane_samples{2};
  int co_paths{7};  // h_CO,str; also the number of pedestrian headings
  std::vector<double> sampling_instances{1.0, 1.5, 2.0};

  double max_acceleration{9.7};  // OT profile range [m/s^2]
  double max_slip{0.1};          // TT profile range
  double profile_latency{0.2};   // [s]
  double jerk_limit{30.0};       // [m/s^3]

  double pedestrian_max_acceleration{12.0};  // [m/s^2]
  double pedestrian_max_speed{2.7};          // [m/s]
  double pedestrian_length{0.5};
  double pedestrian_width{0.5};

  double min_model_speed{1.0};  // below this the dynamic models are frozen [m/s]
  double friction{1.0};
  double slip_stiffness_per_load{10.0};  // longitudinal force per unit slip / wheel load
  double gravity{9.81};

  double prediction_time_base{0.1};  // [s]
  double prediction_time_gain{0.02};  // [s per m/s]
  double prediction_time_max{0.5};   // [s]
  double max_steering_angle{0.6};    // [rad]
  double max_steering_rate{0.8};     // [rad/s]
  double lane_width{3.5};            // virtual lane width [m]

  double weight_acceleration{0.5};  // w_acc
  double weight_path{0.5};          // w_str
  double acceleration_score_scale{4.85};  // [m/s^2]
  double lateral_score_scale{1.75};       // [m]
  double lane_change_penalty{0.25};       // c_com = 1 + penalty * lane changes
  double counter_traffic_penalty{4.0};    // c_cou when a counter-traffic lane is entered

  CollisionMode collision_mode{CollisionMode::paper};
  int footprint_vertices{4};
  bool conditional_scaling{true};

  int steps() const { return static_cast<int>(std::lround(horizon / step)); }

  /// Path sections per sampling instance for an object with `neighbors` neighbor lanes.
  int sections_per_instance(int neighbors) const
  {
    return own_lane_samples + neighbor_lane_samples * neighbors;
  }

  /// h_EGO,str on a road with `neighbors` neighbor lanes.
  std::int64_t ego_paths(int neighbors = 2) const
  {
    std::int64_t paths = 1;
    for (std::size_t i = 0; i < sampling_instances.size(); ++i) {
      paths *= sections_per_instance(neighbors);
    }
    return paths;
  }

  /// Slip needed for a given longitudinal acceleration under the linear tire law.
  double slip_for_acceleration(double acceleration) const
  {
    return acceleration / (slip_stiffness_per_load * gravity);
  }

  double acceleration_for_slip(double slip) const
  {
    return slip * slip_stiffness_per_load * gravity;
  }

  /// Throws ScenarioError when a field is out of range.
  void validate() const
  {
    auto require = [](bool ok, const char * what) {
      if (!ok) {
        throw ScenarioError(std::string("invalid config: ") + what);
      }
    };
    require(std::isfinite(horizon) && horizon > 0.0, "horizon must be positive");
    require(std::isfinite(step) && step > 0.0, "step must be positive");
    require(std::abs(horizon / step - std::round(horizon / step)) < 1e-9, "horizon / step must be whole");
    require(steps() <= std::numeric_limits<std::int16_t>::max(), "too many steps");
    require(acceleration_profiles >= 3, "acceleration_profiles must be >= 3");
    require(own_lane_samples >= 1 && neighbor_lane_samples >= 0, "lane sample counts");
    require(co_paths >= 1, "co_paths must be >= 1");
    require(!sampling_instances.empty(), "sampling_instances empty");
    for (std::size_t i = 0; i < sampling_instances.size(); ++i) {
      require(sampling_instances[i] > 0.0, "sampling instances must be positive");
      require(i == 0 || sampling_instances[i] > sampling_instances[i - 1], "sampling instances must increase");
    }
    require(max_acceleration > 0.0 && max_slip > 0.0, "profile ranges must be positive");
    require(profile_latency >= 0.0 && jerk_limit > 0.0, "latency / jerk");
    require(pedestrian_max_speed > 0.0 && pedestrian_max_acceleration > 0.0, "pedestrian limits");
    require(pedestrian_length > 0.0 && pedestrian_width > 0.0, "pedestrian footprint");
    require(min_model_speed > 0.0 && friction > 0.0 && slip_stiffness_per_load > 0.0 && gravity > 0.0,
            "vehicle model constants");
    require(prediction_time_base >= 0.0 && prediction_time_max >= prediction_time_base, "prediction time");
    require(max_steering_angle > 0.0 && max_steering_rate > 0.0, "steering limits");
    require(lane_width > 0.0, "lane_width must be positive");
    require(weight_acceleration >= 0.0 && weight_path >= 0.0 && weight_acceleration + weight_path > 0.0,
            "scoring weights");
    require(acceleration_score_scale > 0.0 && lateral_score_scale > 0.0, "score scales");
    require(lane_change_penalty >= 0.0 && counter_traffic_penalty >= 1.0, "penalty factors");
    require(footprint_vertices == 4 || footprint_vertices == 8, "footprint_vertices must be 4 or 8");
  }

  bool operator==(const SimulationConfig &) const = default;
};

using DividerTriplet = std::array<Point2, 3>;

/// Scenario as read from a file, before validation.
struct RawScenario
{
  double timestamp{0.0};
  std::optional<ObjectState> ego;
  std::optional<VehicleParameters> ego_parameters;
  std::vector<ObjectState> objects;
  std::vector<DividerTriplet> dividers;
  std::vector<LaneId> counter_traffic_lanes;
  SimulationConfig config;
};

/// Validated, immutable scenario. `object_parameters[k]` belongs to
/// `objects[k]` (unused for pedestrians).
struct Scenario
{
  double timestamp{0.0};
  ObjectState ego;
  VehicleParameters ego_parameters;
  std::vector<ObjectState> objects;
  std::vector<VehicleParameters> object_parameters;
  std::vector<DividerTriplet> dividers;
  std::vector<LaneId> counter_traffic_lanes;
  SimulationConfig config;

  bool operator==(const Scenario &) const = default;
};

}  // namespace critsim

#endif  // CRITSIM__SCENARIO_HPP_
