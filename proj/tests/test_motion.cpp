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

#include "critsim/motion.hpp"
#include "support.hpp"

namespace critsim
{
namespace
{

VehicleParameters car() { return classify_vehicle(4.4, 1.8, std::nullopt); }

VehicleDynamicState moving(double v, double beta = 0.0, double r = 0.0)
{
  VehicleDynamicState s;
  s.velocity = v;
  s.sideslip = beta;
  s.yaw_rate = r;
  return s;
}

double rel(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

TEST(OneTrack, EquilibriumAtRest)
{
  const auto d = one_track_derivatives(moving(20.0), 0.0, car());
  EXPECT_EQ(d.sideslip_rate, 0.0);
  EXPECT_EQ(d.yaw_accel, 0.0);
}

// Independent evaluation of the linear single-track system.
TEST(OneTrack, MatchesLinearSystem)
{
  const VehicleParameters p = car();
  const double m = p.mass, v = 17.0, cf = p.cornering_stiffness_front, cr = p.cornering_stiffness_rear;
  const double lf = p.cog_to_front, lr = p.cog_to_rear, iz = p.yaw_inertia;
  const double beta = 0.02, r = -0.1, delta = 0.05;
  const double beta_dot = -(cf + cr) / (m * v) * beta + ((cr * lr - cf * lf) / (m * v * v) - 1.0) * r + cf / (m * v) * delta;
  const double psi_dd = (cr * lr - cf * lf) / iz * beta - (cf * lf * lf + cr * lr * lr) / (iz * v) * r + cf * lf / iz * delta;
  const auto d = one_track_derivatives(moving(v, beta, r), delta, p);
  EXPECT_LT(rel(d.sideslip_rate, beta_dot), 1e-14);
  EXPECT_LT(rel(d.yaw_accel, psi_dd), 1e-14);
}

TEST(OneTrack, LinearityAndSuperposition)
{
  const VehicleParameters p = car();
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-0.1, 0.1);
  for (int i = 0; i < 1000; ++i) {
    const double v = 5.0 + 30.0 * std::abs(u(rng)) * 10.0;
    const double b1 = u(rng), r1 = u(rng), d1 = u(rng);
    const double b2 = u(rng), r2 = u(rng), d2 = u(rng);
    const auto f1 = one_track_derivatives(moving(v, b1, r1), d1, p);
    const auto f2 = one_track_derivatives(moving(v, b2, r2), d2, p);
    const auto f12 = one_track_derivatives(moving(v, b1 + b2, r1 + r2), d1 + d2, p);
    const auto f2x = one_track_derivatives(moving(v, 2 * b1, 2 * r1), 0.0, p);
    const auto f1x = one_track_derivatives(moving(v, b1, r1), 0.0, p);
    const double scale_b = std::abs(f1.sideslip_rate) + std::abs(f2.sideslip_rate);
    const double scale_r = std::abs(f1.yaw_accel) + std::abs(f2.yaw_accel);
    EXPECT_LE(std::abs(f12.sideslip_rate - f1.sideslip_rate - f2.sideslip_rate), 1e-12 * scale_b);
    EXPECT_LE(std::abs(f12.yaw_accel - f1.yaw_accel - f2.yaw_accel), 1e-12 * scale_r);
    EXPECT_LE(std::abs(f2x.sideslip_rate - 2 * f1x.sideslip_rate), 1e-12 * std::abs(f1x.sideslip_rate));
    EXPECT_LE(std::abs(f2x.yaw_accel - 2 * f1x.yaw_accel), 1e-12 * std::abs(f1x.yaw_accel));
  }
}

// Steady-state cornering: solve A x = -B delta by Cramer's rule and feed the
// solution back; both derivatives vanish.
TEST(OneTrack, SteadyStateResidual)
{
  const VehicleParameters p = car();
  for (double v : {5.0, 12.0, 25.0, 40.0}) {
    for (double delta : {-0.05, 0.01, 0.03}) {
      const double m = p.mass, cf = p.cornering_stiffness_front, cr = p.cornering_stiffness_rear;
      const double lf = p.cog_to_front, lr = p.cog_to_rear, iz = p.yaw_inertia;
      const double a11 = -(cf + cr) / (m * v), a12 = (cr * lr - cf * lf) / (m * v * v) - 1.0;
      const double a21 = (cr * lr - cf * lf) / iz, a22 = -(cf * lf * lf + cr * lr * lr) / (iz * v);
      const double b1 = -cf / (m * v) * delta, b2 = -cf * lf / iz * delta;
      const double det = a11 * a22 - a12 * a21;
      const double beta = (b1 * a22 - a12 * b2) / det;
      const double r = (a11 * b2 - a21 * b1) / det;
      const auto d = one_track_derivatives(moving(v, beta, r), delta, p);
      EXPECT_LT(std::abs(d.sideslip_rate), 1e-10);
      EXPECT_LT(std::abs(d.yaw_accel), 1e-10);
    }
  }
}

TEST(TwoTrack, StraightDrivingIsEquilibrium)
{
  const auto d = two_track_derivatives(moving(20.0), 0.0, 0.0, car()).derivatives;
  EXPECT_NEAR(d.accel, 0.0, 1e-12);
  EXPECT_NEAR(d.sideslip_rate, 0.0, 1e-12);
  EXPECT_NEAR(d.yaw_accel, 0.0, 1e-12);
}

TEST(TwoTrack, SymmetricTractionHasNoYawMoment)
{
  const auto r = two_track_derivatives(moving(20.0), 0.0, 0.05, car());
  EXPECT_NEAR(r.derivatives.yaw_accel, 0.0, 1e-9);
  EXPECT_NEAR(r.derivatives.sideslip_rate, 0.0, 1e-12);
  EXPECT_GT(r.derivatives.accel, 0.0);
  EXPECT_DOUBLE_EQ(r.forces.wheels[front_left].longitudinal, r.forces.wheels[front_right].longitudinal);
  EXPECT_DOUBLE_EQ(r.forces.wheels[rear_left].longitudinal, r.forces.wheels[rear_right].longitudinal);
}

// Low lateral acceleration: the two-track model linearizes to the one-track
// model, so the lateral derivatives agree within 5 %.
TEST(TwoTrack, AgreesWithOneTrackAtLowLateralAcceleration)
{
  const VehicleParameters p = car();
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> uv(8.0, 35.0);
  std::uniform_real_distribution<double> ud(0.002, 0.02);
  int checked = 0;
  for (int i = 0; i < 500; ++i) {
    const double v = uv(rng);
    const double delta = ud(rng);
    const auto state = moving(v, 0.0, 0.0);
    const auto ot = one_track_derivatives(state, delta, p);
    const auto tt = two_track_derivatives(state, delta, 0.0, p).derivatives;
    const double lateral = v * (ot.sideslip_rate + state.yaw_rate);
    if (std::abs(lateral) >= 2.0) {
      continue;
    }
    ++checked;
    EXPECT_LT(rel(tt.sideslip_rate, ot.sideslip_rate), 0.05) << "v=" << v << " delta=" << delta;
    EXPECT_LT(rel(tt.yaw_accel, ot.yaw_accel), 0.05) << "v=" << v << " delta=" << delta;
  }
  EXPECT_GT(checked, 100);
}

TEST(TwoTrack, ForcesStayInsideFrictionCircle)
{
  const VehicleParameters p = car();
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 5000; ++i) {
    const auto state = moving(1.0 + 40.0 * std::abs(u(rng)), 0.2 * u(rng), 1.0 * u(rng));
    const auto r = two_track_derivatives(state, 0.6 * u(rng), 0.1 * u(rng), p);
    for (const auto & w : r.forces.wheels) {
      EXPECT_LE(std::hypot(w.longitudinal, w.lateral), 1.0 * w.normal_load + 1e-9);
    }
  }
}

TEST(Euler, UniformMotion)
{
  auto s = moving(10.0);
  auto n = integrate_vehicle(s, {}, 0.02);
  EXPECT_NEAR(n.position.x, 0.2, 1e-15);
  EXPECT_NEAR(n.position.y, 0.0, 1e-15);
  s.yaw = kPi / 2;
  n = integrate_vehicle(s, {}, 0.02);
  EXPECT_NEAR(n.position.x, 0.0, 1e-15);
  EXPECT_NEAR(n.position.y, 0.2, 1e-15);
}

TEST(Euler, ConstantAccelerationFromRest)
{
  ObjectState o;
  o.acceleration = 2.0;
  auto s = VehicleDynamicState::from(o);
  for (int k = 0; k < 100; ++k) {
    s = integrate_vehicle(s, {2.0, 0.0, 0.0}, 0.02);
  }
  EXPECT_NEAR(s.velocity, 4.0, 1e-12);
  const double closed = 0.5 * 2.0 * 2.0 * 2.0;
  EXPECT_LT(std::abs(s.position.x - closed) / closed, 0.02);
}

TEST(Euler, ZeroInputDrivesStraight)
{
  ObjectState o;
  o.velocity = 13.0;
  o.yaw = 0.4;
  auto s = VehicleDynamicState::from(o);
  const Point2 dir{std::cos(0.4), std::sin(0.4)};
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const auto ot = one_track_derivatives(s, 0.0, car());
    s = integrate_vehicle(s, {0.0, ot.sideslip_rate, ot.yaw_accel}, 0.02);
    worst = std::max(worst, std::abs(cross(dir, s.position)));
  }
  EXPECT_LT(worst, 1e-9);
}

std::vector<Point2> steer_rollout(Point2 start, double yaw)
{
  const VehicleParameters p = car();
  ObjectState o;
  o.position = start;
  o.yaw = yaw;
  o.velocity = 15.0;
  auto s = VehicleDynamicState::from(o);
  std::vector<Point2> out;
  for (int k = 0; k < 100; ++k) {
    const auto ot = one_track_derivatives(s, 0.03, p);
    s = integrate_vehicle(s, {0.5, ot.sideslip_rate, ot.yaw_accel}, 0.02);
    out.push_back(s.position);
  }
  return out;
}

TEST(Euler, FrameCovariance)
{
  const auto base = steer_rollout({0.0, 0.0}, 0.0);
  for (double theta : {0.3, -1.2, 2.5}) {
    const auto turned = steer_rollout({0.0, 0.0}, theta);
    for (std::size_t k = 0; k < base.size(); ++k) {
      const Point2 expect{std::cos(theta) * base[k].x - std::sin(theta) * base[k].y,
                          std::sin(theta) * base[k].x + std::cos(theta) * base[k].y};
      EXPECT_NEAR(turned[k].x, expect.x, 1e-9);
      EXPECT_NEAR(turned[k].y, expect.y, 1e-9);
    }
  }
}

TEST(Pedestrian, Walks)
{
  ObjectState p = testing::make_pedestrian(1, 0, 0, 0, 1.0);
  const auto n = integrate_pedestrian(p, 0.0, 0.0, 0.02);
  EXPECT_NEAR(n.position.x, 0.02, 1e-15);
  EXPECT_NEAR(n.position.y, 0.0, 1e-15);
}

TEST(Pedestrian, SpeedClamps)
{
  ObjectState p = testing::make_pedestrian(1, 0, 0, 0, 2.7);
  EXPECT_DOUBLE_EQ(integrate_pedestrian(p, 0.0, 12.0, 0.02).velocity, 2.7);
  p.velocity = 0.0;
  const auto n = integrate_pedestrian(p, 0.0, -12.0, 0.02);
  EXPECT_DOUBLE_EQ(n.velocity, 0.0);
  EXPECT_DOUBLE_EQ(n.position.x, 0.0);
}

TEST(Pedestrian, UnclampedStepMatchesKinematics)
{
  ObjectState p = testing::make_pedestrian(1, 1, 2, 0, 1.2);
  const double heading = 0.8, a = 3.0, tau = 0.02;
  const auto n = integrate_pedestrian(p, heading, a, tau);
  EXPECT_NEAR(n.position.x, 1 + std::cos(heading) * (1.2 * tau + a * tau * tau / 2), 1e-15);
  EXPECT_NEAR(n.position.y, 2 + std::sin(heading) * (1.2 * tau + a * tau * tau / 2), 1e-15);
  EXPECT_NEAR(n.velocity, 1.2 + a * tau, 1e-15);
}

}  // namespace
}  // namespace critsim
