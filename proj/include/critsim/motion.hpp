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

#ifndef CRITSIM__MOTION_HPP_
#define CRITSIM__MOTION_HPP_

#include <algorithm>
#include <array>
#include <cmath>

#include "critsim/scenario.hpp"

namespace critsim
{

/// Full vehicle state carried through the pose integration.
struct VehicleDynamicState
{
  Point2 position{};
  double yaw{0.0};          // psi [rad], global frame
  double velocity{0.0};     // v [m/s]
  double sideslip{0.0};     // beta [rad]
  double yaw_rate{0.0};     // [rad/s]
  double yaw_accel{0.0};    // [rad/s^2]
  double accel{0.0};        // v dot [m/s^2]
  double ax{0.0};           // vehicle-frame acceleration [m/s^2]
  double ay{0.0};

  /// Initial dynamic state of an object; the vehicle-frame accelerations
  /// follow from the current v dot and yaw rate.
  static VehicleDynamicState from(const ObjectState & o)
  {
    VehicleDynamicState s;
    s.position = o.position;
    s.yaw = o.yaw;
    s.velocity = o.velocity;
    s.sideslip = o.sideslip;
    s.yaw_rate = o.yaw_rate;
    s.accel = o.acceleration;
    s.ax = std::cos(o.sideslip) * o.acceleration - std::sin(o.sideslip) * o.velocity * o.yaw_rate;
    s.ay = std::sin(o.sideslip) * o.acceleration + std::cos(o.sideslip) * o.velocity * o.yaw_rate;
    return s;
  }

  bool operator==(const VehicleDynamicState &) const = default;
};

/// Time derivatives fed to the Euler step.
struct StateDerivatives
{
  double accel{0.0};          // v dot
  double sideslip_rate{0.0};  // beta dot
  double yaw_accel{0.0};      // psi double dot
};

struct OneTrackDerivatives
{
  double sideslip_rate{0.0};
  double yaw_accel{0.0};
};

/// Linear single-track lateral dynamics. Requires velocity > 0; callers use
/// the kinematic fallback below the minimum model speed.
inline OneTrackDerivatives one_track_derivatives(
  const VehicleDynamicState & state, double steering, const VehicleParameters & p)
{
  const double m = p.mass;
  const double v = state.velocity;
  const double cf = p.cornering_stiffness_front;
  const double cr = p.cornering_stiffness_rear;
  const double lf = p.cog_to_front;
  const double lr = p.cog_to_rear;
  const double iz = p.yaw_inertia;
  const double beta = state.sideslip;
  const double r = state.yaw_rate;

  const double a11 = -(cf + cr) / (m * v);
  const double a12 = (cr * lr - cf * lf) / (m * v * v) - 1.0;
  const double a21 = (cr * lr - cf * lf) / iz;
  const double a22 = -(cf * lf * lf + cr * lr * lr) / (iz * v);
  const double b1 = cf / (m * v);
  const double b2 = cf * lf / iz;
  return {a11 * beta + a12 * r + b1 * steering, a21 * beta + a22 * r + b2 * steering};
}

enum Wheel : std::size_t { front_left = 0, front_right = 1, rear_left = 2, rear_right = 3 };

struct WheelForce
{
  double longitudinal{0.0};  // F_l along the wheel [N]
  double lateral{0.0};       // F_s across the wheel [N]
  double normal_load{0.0};   // F_z [N]
};

struct TireForces
{
  std::array<WheelForce, 4> wheels{};
};

struct TwoTrackResult
{
  StateDerivatives derivatives;
  TireForces forces;
};

/// Linear tire law on a four-wheel body: lateral force proportional to the
/// wheel slip angle (half the axle cornering stiffness per wheel),
/// longitudinal force proportional to the commanded slip on all four wheels,
/// both clipped to the friction circle. Static axle loads, no load transfer.
inline TwoTrackResult two_track_derivatives(
  const VehicleDynamicState & state, double steering, double slip, const VehicleParameters & p,
  double friction = 1.0, double slip_stiffness_per_load = 10.0, double gravity = 9.81)
{
  const double lf = p.cog_to_front;
  const double lr = p.cog_to_rear;
  const double half_track = 0.5 * p.track_width;
  const double wheelbase = lf + lr;
  const double v = state.velocity;
  const double beta = state.sideslip;
  const double r = state.yaw_rate;
  const double vx = v * std::cos(beta);
  const double vy = v * std::sin(beta);

  const double load_front = 0.5 * p.mass * gravity * lr / wheelbase;
  const double load_rear = 0.5 * p.mass * gravity * lf / wheelbase;

  struct Geometry
  {
    double rx, ry, steer, load, cornering;
  };
  const std::array<Geometry, 4> geometry{{
    {lf, half_track, steering, load_front, 0.5 * p.cornering_stiffness_front},
    {lf, -half_track, steering, load_front, 0.5 * p.cornering_stiffness_front},
    {-lr, half_track, 0.0, load_rear, 0.5 * p.cornering_stiffness_rear},
    {-lr, -half_track, 0.0, load_rear, 0.5 * p.cornering_stiffness_rear},
  }};

  TwoTrackResult out;
  double fx = 0.0;
  double fy = 0.0;
  double mz = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    const Geometry & g = geometry[i];
    const double wx = vx - r * g.ry;
    const double wy = vy + r * g.rx;
    const double slip_angle = (std::hypot(wx, wy) > 1e-9) ? g.steer - std::atan2(wy, wx) : 0.0;
    double f_long = slip_stiffness_per_load * g.load * slip;
    double f_lat = g.cornering * slip_angle;
    const double limit = friction * g.load;
    const double magnitude = std::hypot(f_long, f_lat);
    if (magnitude > limit) {
      const double scale = limit / magnitude;
      f_long *= scale;
      f_lat *= scale;
    }
    out.forces.wheels[i] = {f_long, f_lat, g.load};

    const double c = std::cos(g.steer);
    const double s = std::sin(g.steer);
    const double bx = f_long * c - f_lat * s;
    const double by = f_long * s + f_lat * c;
    fx += bx;
    fy += by;
    mz += g.rx * by - g.ry * bx;
  }

  out.derivatives.accel = (fx * std::cos(beta) + fy * std::sin(beta)) / p.mass;
  out.derivatives.sideslip_rate =
    v > 0.0 ? (-fx * std::sin(beta) + fy * std::cos(beta)) / (p.mass * v) - r : 0.0;
  out.derivatives.yaw_accel = mz / p.yaw_inertia;
  return out;
}

/// One explicit Euler step of the pose equations. Velocity and sideslip are
/// first order; yaw and position are second order in tau, the position using
/// the vehicle-frame accelerations stored from the previous step.
inline VehicleDynamicState integrate_vehicle(
  const VehicleDynamicState & s, const StateDerivatives & d, double tau)
{
  const double cb = std::cos(s.sideslip);
  const double sb = std::sin(s.sideslip);
  const double cy = std::cos(s.yaw);
  const double sy = std::sin(s.yaw);
  const double ch = std::cos(s.yaw + s.sideslip);
  const double sh = std::sin(s.yaw + s.sideslip);
  const double half_tau2 = 0.5 * tau * tau;

  VehicleDynamicState n;
  n.velocity = s.velocity + d.accel * tau;
  n.sideslip = s.sideslip + d.sideslip_rate * tau;
  n.yaw = s.yaw + s.yaw_rate * tau + d.yaw_accel * half_tau2;
  n.yaw_rate = s.yaw_rate + d.yaw_accel * tau;
  n.yaw_accel = d.yaw_accel;
  n.accel = d.accel;

  const double turn = s.velocity * (d.sideslip_rate + s.yaw_rate);
  n.ax = cb * d.accel - sb * turn;
  n.ay = sb * d.accel + cb * turn;

  n.position.x = s.position.x + ch * s.velocity * tau + cy * s.ax * half_tau2 - sy * s.ay * half_tau2;
  n.position.y = s.position.y + sh * s.velocity * tau + sy * s.ax * half_tau2 + cy * s.ay * half_tau2;
  return n;
}

/// Kinematic pedestrian step along a fixed heading. The speed is clamped to
/// [0, max_speed]; the displacement uses the mean of the old and clamped new
/// speed, which equals v tau + a tau^2 / 2 whenever no clamp is active.
inline ObjectState integrate_pedestrian(
  const ObjectState & s, double heading, double accel, double tau, double max_speed = 2.7)
{
  ObjectState n = s;
  const double v_next = std::clamp(s.velocity + accel * tau, 0.0, max_speed);
  const double travel = 0.5 * (s.velocity + v_next) * tau;
  n.position = s.position + Point2{std::cos(heading), std::sin(heading)} * travel;
  n.yaw = heading;
  n.velocity = v_next;
  n.acceleration = accel;
  return n;
}

}  // namespace critsim

#endif  // CRITSIM__MOTION_HPP_
