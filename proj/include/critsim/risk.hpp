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

#ifndef CRITSIM__RISK_HPP_
#define CRITSIM__RISK_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <tuple>
#include <vector>

#include "critsim/collision.hpp"
#include "critsim/errors.hpp"
#include "critsim/hypotheses.hpp"
#include "critsim/scenario.hpp"

namespace critsim
{

struct HypothesisScore
{
  int trajectory{0};
  double acceleration_score{1.0};  // n_acc
  double path_score{1.0};          // d_str
  double complexity_penalty{1.0};  // c_com
  double counter_penalty{1.0};     // c_cou
  double score{0.0};               // n_h
  double probability{0.0};

  bool operator==(const HypothesisScore &) const = default;
};

/// Perpendicular distance of the hypothesis end point from the reference's
/// final heading line.
inline double terminal_lateral_offset(const Trajectory & hypothesis, const Trajectory & reference)
{
  if (hypothesis.poses.empty() || reference.poses.empty()) {
    return 0.0;
  }
  const Pose & end = hypothesis.poses.back();
  const Pose & ref = reference.poses.back();
  const Point2 along{std::cos(ref.yaw + ref.sideslip), std::sin(ref.yaw + ref.sideslip)};
  return std::abs(cross(along, end.position - ref.position));
}

/// n_h = (w_acc n_acc + w_str d_str) / (c_com c_cou), with exponential decays
/// for the acceleration and path factors and linear/step penalties.
inline HypothesisScore score_hypothesis(
  const Trajectory & hypothesis, const Trajectory & reference, const SimulationConfig & config)
{
  HypothesisScore s;
  s.trajectory = hypothesis.hypothesis_id;
  s.acceleration_score = std::exp(
    -std::abs(hypothesis.profile_target - reference.profile_target) / config.acceleration_score_scale);
  s.path_score = std::exp(-terminal_lateral_offset(hypothesis, reference) / config.lateral_score_scale);
  s.complexity_penalty = 1.0 + config.lane_change_penalty * hypothesis.lane_changes;
  s.counter_penalty = hypothesis.counter_traffic ? config.counter_traffic_penalty : 1.0;
  s.score = (config.weight_acceleration * s.acceleration_score + config.weight_path * s.path_score) /
            (s.complexity_penalty * s.counter_penalty);
  return s;
}

/// L1 normalization of one object's scores.
inline std::vector<double> normalize(std::span<const double> scores)
{
  if (scores.empty()) {
    throw Error("normalize: empty score set");
  }
  double total = 0.0;
  for (double s : scores) {
    if (!(s > 0.0) || !std::isfinite(s)) {
      throw Error("normalize: scores must be positive and finite");
    }
    total += s;
  }
  std::vector<double> out(scores.size());
  std::transform(scores.begin(), scores.end(), out.begin(), [total](double s) { return s / total; });
  return out;
}

/// One colliding (EGO trajectory, CO trajectory) pair.
struct CollidingCombination
{
  std::size_t ego{0};  // row in the collision matrix
  std::size_t co{0};   // column in the collision matrix
  int co_object{0};
  int step{0};
  double probability{0.0};  // p_EGO,i * p_CO,j
  double scaled{0.0};       // after chronological scaling

  bool operator==(const CollidingCombination &) const = default;
};

/// Sorts by (step, EGO row, CO column) and scales each probability by the
/// running product of (1 - p) over all earlier combinations.
inline void apply_conditional_scaling(std::vector<CollidingCombination> & combinations)
{
  std::stable_sort(combinations.begin(), combinations.end(), [](const auto & a, const auto & b) {
    return std::tie(a.step, a.ego, a.co) < std::tie(b.step, b.ego, b.co);
  });
  double survival = 1.0;
  for (auto & c : combinations) {
    c.scaled = survival * c.probability;
    survival *= 1.0 - c.probability;
  }
}

struct EscapeRoute
{
  std::size_t ego{0};
  double probability{0.0};

  bool operator==(const EscapeRoute &) const = default;
};

struct CriticalityResult
{
  double timestamp{0.0};
  double p_cra{0.0};
  double p_unscaled{0.0};  // plain double sum
  std::vector<int> co_ids;
  std::vector<double> co_probability;  // per CO, parallel to co_ids
  std::vector<CollidingCombination> collisions;
  std::vector<EscapeRoute> escape_routes;  // by probability, descending

  bool operator==(const CriticalityResult &) const = default;
};

/// Collects the colliding combinations in pair-index order, applies the
/// chronological scaling (when enabled) and sums into p_cra. EGO rows that
/// collide with nothing become escape routes.
inline CriticalityResult aggregate_criticality(
  const CollisionMatrix & matrix, std::span<const double> ego_probability,
  std::span<const double> co_probability, std::span<const int> co_ids, const SimulationConfig & config,
  double timestamp = 0.0)
{
  if (ego_probability.size() != matrix.rows() || co_probability.size() != matrix.cols()) {
    throw Error("aggregate_criticality: probability vectors do not match the collision matrix");
  }
  CriticalityResult result;
  result.timestamp = timestamp;
  result.co_ids.assign(co_ids.begin(), co_ids.end());
  result.co_probability.assign(co_ids.size(), 0.0);

  std::vector<bool> collides(matrix.rows(), false);
  for (std::size_t i = 0; i < matrix.rows(); ++i) {
    for (std::size_t j = 0; j < matrix.cols(); ++j) {
      if (const auto step = matrix.at(i, j)) {
        const double p = ego_probability[i] * co_probability[j];
        result.collisions.push_back({i, j, matrix.column_object(j), *step, p, p});
        result.p_unscaled += p;
        collides[i] = true;
      }
    }
  }
  if (config.conditional_scaling) {
    apply_conditional_scaling(result.collisions);
  }
  for (const auto & c : result.collisions) {
    result.p_cra += c.scaled;
    const auto it = std::find(result.co_ids.begin(), result.co_ids.end(), c.co_object);
    if (it != result.co_ids.end()) {
      result.co_probability[static_cast<std::size_t>(it - result.co_ids.begin())] += c.scaled;
    }
  }
  for (std::size_t i = 0; i < matrix.rows(); ++i) {
    if (!collides[i]) {
      result.escape_routes.push_back({i, ego_probability[i]});
    }
  }
  std::stable_sort(result.escape_routes.begin(), result.escape_routes.end(), [](const auto & a, const auto & b) {
    return a.probability > b.probability;
  });
  return result;
}

}  // namespace critsim

#endif  // CRITSIM__RISK_HPP_
