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

#ifndef CRITSIM__ENGINE_HPP_
#define CRITSIM__ENGINE_HPP_

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "critsim/collision.hpp"
#include "critsim/errors.hpp"
#include "critsim/hypotheses.hpp"
#include "critsim/parallel.hpp"
#include "critsim/risk.hpp"
#include "critsim/scenario.hpp"
#include "critsim/street.hpp"
#include "critsim/validation.hpp"

namespace critsim
{

/// Flat trajectory index space. Object 0 is the EGO; its block is followed
/// by one block per CO. Inside a block, index = profile * paths + path.
struct IndexLayout
{
  struct Range
  {
    int object_id{0};
    std::size_t begin{0};
    std::size_t profiles{0};
    std::size_t paths{0};

    std::size_t size() const { return profiles * paths; }
    bool operator==(const Range &) const = default;
  };

  struct Slot
  {
    std::size_t object{0};  // index into ranges
    std::size_t profile{0};
    std::size_t path{0};
    bool operator==(const Slot &) const = default;
  };

  std::vector<Range> ranges;

  void add(int object_id, std::size_t profiles, std::size_t paths)
  {
    ranges.push_back({object_id, r_tra(), profiles, paths});
  }

  std::size_t r_tra() const { return ranges.empty() ? 0 : ranges.back().begin + ranges.back().size(); }
  std::size_t r_ego() const { return ranges.empty() ? 0 : ranges.front().size(); }
  std::size_t r_co() const { return r_tra() - r_ego(); }
  std::size_t r_col() const { return r_ego() * r_co(); }

  Slot decode(std::size_t flat) const
  {
    // Last range whose begin is <= flat.
    auto it = std::upper_bound(ranges.begin(), ranges.end(), flat, [](std::size_t f, const Range & r) {
      return f < r.begin;
    });
    if (it == ranges.begin() || flat >= r_tra()) {
      throw Error("trajectory index out of range");
    }
    --it;
    const std::size_t local = flat - it->begin;
    return {static_cast<std::size_t>(it - ranges.begin()), local / it->paths, local % it->paths};
  }

  std::size_t encode(const Slot & slot) const
  {
    const Range & r = ranges.at(slot.object);
    return r.begin + slot.profile * r.paths + slot.path;
  }

  std::size_t pair_index(std::size_t ego_row, std::size_t co_column) const { return ego_row * r_co() + co_column; }
  std::pair<std::size_t, std::size_t> pair(std::size_t flat_pair) const
  {
    return {flat_pair / r_co(), flat_pair % r_co()};
  }
};

struct StageTimings
{
  double street_ms{0.0};
  double trajectories_ms{0.0};
  double collision_ms{0.0};
  double risk_ms{0.0};

  double total_ms() const { return street_ms + trajectories_ms + collision_ms + risk_ms; }

  bool operator==(const StageTimings &) const = default;
};

struct RunMetrics
{
  StageTimings timings;
  std::size_t trajectories{0};
  std::size_t ego_trajectories{0};
  std::size_t co_trajectories{0};
  std::int64_t trajectory_combinations{0};
  std::int64_t pose_combinations{0};
  double pose_combinations_per_second{0.0};
  unsigned workers{1};
};

/// Receives (stage, started) before and after every stage.
using StageObserver = std::function<void(Stage, bool)>;

/// Everything a run produced, for inspection and tests.
struct Evaluation
{
  CriticalityResult result;
  RunMetrics metrics;
  RoadModel road;
  IndexLayout layout;
  std::vector<Trajectory> trajectories;
  std::vector<Trajectory> references;  // [0] EGO, then one per CO
  CollisionMatrix matrix;
  std::vector<double> probabilities;  // per trajectory, normalized per object
};

namespace detail
{

template <class Fn>
auto run_stage(Stage stage, const StageObserver & observer, double & elapsed_ms, Fn && fn)
{
  if (observer) {
    observer(stage, true);
  }
  const auto start = std::chrono::steady_clock::now();
  try {
    fn();
  } catch (const StageError &) {
    throw;
  } catch (const std::exception & e) {
    throw StageError(stage, e.what());
  }
  elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  if (observer) {
    observer(stage, false);
  }
}

}  // namespace detail

/// Runs street processing, trajectory generation, collision recognition and
/// risk assessment in that order. Inside each stage work items run in
/// parallel into disjoint slots, so the result does not depend on `policy`.
inline Evaluation evaluate_detailed(
  const Scenario & scenario, const WorkerPolicy & policy = WorkerPolicy::sequential(),
  const StageObserver & observer = {})
{
  const SimulationConfig & config = scenario.config;
  Evaluation ev;
  ev.metrics.workers = policy.resolve();

  detail::run_stage(Stage::street, observer, ev.metrics.timings.street_ms, [&] {
    const RoadFrame frame = RoadFrame::from(scenario.ego);
    const auto dividers = fit_dividers(scenario.dividers, frame, policy);
    ev.road = build_road(dividers, scenario.ego, config.lane_width);
    mark_counter_traffic(ev.road, scenario.counter_traffic_lanes, scenario.objects);
  });

  // Per object: the state, its parameters, and the hypothesis grid.
  struct ObjectPlan
  {
    const ObjectState * object;
    const VehicleParameters * params;
    std::vector<AccelerationProfile> profiles;
    std::vector<PathSpec> paths;
    std::vector<PedestrianHypothesis> pedestrian;
  };
  std::vector<ObjectPlan> plans;

  detail::run_stage(Stage::trajectories, observer, ev.metrics.timings.trajectories_ms, [&] {
    plans.push_back({&scenario.ego, &scenario.ego_parameters, {}, {}, {}});
    for (std::size_t k = 0; k < scenario.objects.size(); ++k) {
      plans.push_back({&scenario.objects[k], &scenario.object_parameters[k], {}, {}, {}});
    }

    ev.references.resize(plans.size());
    parallel_for(plans.size(), policy, [&](std::size_t k) {
      ev.references[k] = build_reference_trajectory(*plans[k].object, *plans[k].params, ev.road, config);
    });

    for (std::size_t k = 0; k < plans.size(); ++k) {
      ObjectPlan & plan = plans[k];
      const ObjectState & o = *plan.object;
      if (o.kind == ObjectKind::pedestrian) {
        const auto headings = pedestrian_headings(config);
        const auto accels = pedestrian_accelerations(config);
        for (double a : accels) {
          for (double h : headings) {
            plan.pedestrian.push_back({h, a});
          }
        }
        ev.layout.add(o.id, accels.size(), headings.size());
        continue;
      }
      const bool ego = o.kind == ObjectKind::ego_vehicle;
      const double initial = ego ? config.slip_for_acceleration(o.acceleration) : o.acceleration;
      plan.profiles = build_profiles(config, ego ? ProfileKind::slip : ProfileKind::acceleration, initial);
      plan.paths = sample_paths(o, ev.road, ev.references[k], config);
      ev.layout.add(o.id, plan.profiles.size(), plan.paths.size());
    }

    ev.trajectories.resize(ev.layout.r_tra());
    parallel_for(ev.layout.r_tra(), policy, [&](std::size_t flat) {
      const auto slot = ev.layout.decode(flat);
      const ObjectPlan & plan = plans[slot.object];
      const ObjectState & o = *plan.object;
      Trajectory traj;
      if (o.kind == ObjectKind::pedestrian) {
        traj = rollout_pedestrian(o, plan.pedestrian[slot.profile * ev.layout.ranges[slot.object].paths + slot.path],
                                  config);
        traj.profile_id = static_cast<int>(slot.profile);
        traj.path_id = static_cast<int>(slot.path);
      } else {
        const VehicleModel model =
          o.kind == ObjectKind::ego_vehicle ? VehicleModel::two_track : VehicleModel::one_track;
        traj = rollout_vehicle(o, *plan.params, model, plan.profiles[slot.profile], plan.paths[slot.path],
                               ev.road.frame, config);
      }
      traj.hypothesis_id = static_cast<int>(flat - ev.layout.ranges[slot.object].begin);
      ev.trajectories[flat] = std::move(traj);
    });
  });

  detail::run_stage(Stage::collision, observer, ev.metrics.timings.collision_ms, [&] {
    const std::size_t r_ego = ev.layout.r_ego();
    std::vector<ObjectShape> shapes;
    shapes.reserve(ev.layout.r_co());
    for (std::size_t k = 1; k < plans.size(); ++k) {
      const ObjectShape shape{plans[k].object->length, plans[k].object->width};
      shapes.insert(shapes.end(), ev.layout.ranges[k].size(), shape);
    }
    const std::span<const Trajectory> all(ev.trajectories);
    ev.matrix = detect_collisions(all.subspan(0, r_ego), {scenario.ego.length, scenario.ego.width},
                                  all.subspan(r_ego), shapes, config, policy);
  });

  detail::run_stage(Stage::risk, observer, ev.metrics.timings.risk_ms, [&] {
    std::vector<double> scores(ev.trajectories.size());
    parallel_for(ev.trajectories.size(), policy, [&](std::size_t flat) {
      const auto slot = ev.layout.decode(flat);
      scores[flat] = score_hypothesis(ev.trajectories[flat], ev.references[slot.object], config).score;
    });
    ev.probabilities.resize(scores.size());
    for (const auto & range : ev.layout.ranges) {
      const auto p = normalize(std::span<const double>(scores).subspan(range.begin, range.size()));
      std::copy(p.begin(), p.end(), ev.probabilities.begin() + static_cast<std::ptrdiff_t>(range.begin));
    }
    std::vector<int> co_ids;
    for (std::size_t k = 1; k < ev.layout.ranges.size(); ++k) {
      co_ids.push_back(ev.layout.ranges[k].object_id);
    }
    const std::span<const double> probs(ev.probabilities);
    ev.result = aggregate_criticality(ev.matrix, probs.subspan(0, ev.layout.r_ego()),
                                      probs.subspan(ev.layout.r_ego()), co_ids, config, scenario.timestamp);
  });

  RunMetrics & m = ev.metrics;
  m.trajectories = ev.layout.r_tra();
  m.ego_trajectories = ev.layout.r_ego();
  m.co_trajectories = ev.layout.r_co();
  m.trajectory_combinations = static_cast<std::int64_t>(ev.layout.r_col());
  m.pose_combinations = m.trajectory_combinations * config.steps();
  const double seconds = m.timings.total_ms() / 1000.0;
  m.pose_combinations_per_second = seconds > 0.0 ? static_cast<double>(m.pose_combinations) / seconds : 0.0;
  return ev;
}

inline std::pair<CriticalityResult, RunMetrics> evaluate(
  const Scenario & scenario, const WorkerPolicy & policy = WorkerPolicy::sequential(),
  const StageObserver & observer = {})
{
  Evaluation ev = evaluate_detailed(scenario, policy, observer);
  return {std::move(ev.result), ev.metrics};
}

struct FrameResult
{
  double timestamp{0.0};
  std::optional<CriticalityResult> result;
  std::optional<RunMetrics> metrics;
  std::string error;  // empty on success

  bool ok() const { return result.has_value(); }
};

/// Evaluates every frame on its own; a failing frame is reported and the
/// stream continues.
inline std::vector<FrameResult> evaluate_stream(
  std::span<const RawScenario> frames, const WorkerPolicy & policy = WorkerPolicy::sequential())
{
  std::vector<FrameResult> out;
  out.reserve(frames.size());
  for (const auto & frame : frames) {
    FrameResult r;
    r.timestamp = frame.timestamp;
    try {
      auto [result, metrics] = evaluate(validate_scenario(frame), policy);
      r.result = std::move(result);
      r.metrics = metrics;
    } catch (const std::exception & e) {
      r.error = e.what();
    }
    out.push_back(std::move(r));
  }
  return out;
}

/// Lead time between the first frame whose p_cra exceeds `threshold` and
/// `impact_time`; nullopt if no frame before impact crosses it.
inline std::optional<double> anticipation_time(
  std::span<const FrameResult> frames, double threshold, double impact_time)
{
  for (const auto & f : frames) {
    if (f.timestamp > impact_time) {
      break;
    }
    if (f.ok() && f.result->p_cra > threshold) {
      return impact_time - f.timestamp;
    }
  }
  return std::nullopt;
}

}  // namespace critsim

#endif  // CRITSIM__ENGINE_HPP_
