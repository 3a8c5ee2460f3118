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


// critsim: runs scenario files and frame replays through the engine.
//
//   critsim run scenario.json
//   critsim run replay_dir/ --trace out.csv --metrics out.json
//   critsim run s2.json --bench --repeat 20 --workers auto

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "critsim/engine.hpp"
#include "critsim/json_io.hpp"
#include "critsim/trace.hpp"

namespace fs = std::filesystem;
using critsim::io::json;

namespace
{

enum ExitCode : int { kOk = 0, kInputError = 1, kEngineError = 2 };

struct Options
{
  std::string input;
  std::string trace_path;
  std::string metrics_path;
  bool bench{false};
  int repeat{5};
  std::string workers{"1"};
  std::string collision_mode;
  std::string config_path;
};

struct InputError : critsim::Error
{
  using critsim::Error::Error;
};

double median(std::vector<double> v)
{
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

critsim::StageTimings median_timings(const std::vector<critsim::StageTimings> & runs)
{
  std::vector<double> street, trajectories, collision, risk;
  for (const auto & t : runs) {
    street.push_back(t.street_ms);
    trajectories.push_back(t.trajectories_ms);
    collision.push_back(t.collision_ms);
    risk.push_back(t.risk_ms);
  }
  return {median(street), median(trajectories), median(collision), median(risk)};
}

critsim::Scenario load_frame(const fs::path & path, const Options & opt, const std::optional<json> & overrides)
{
  try {
    critsim::RawScenario raw = critsim::io::read_scenario_file(path);
    if (overrides) {
      critsim::io::apply_config(*overrides, raw.config);
    }
    if (!opt.collision_mode.empty()) {
      critsim::io::apply_config(json{{"collision_mode", opt.collision_mode}}, raw.config);
    }
    return critsim::validate_scenario(raw);
  } catch (const critsim::ScenarioError & e) {
    throw InputError(e.what());
  }
}

void print_summary(const std::string & name, const critsim::CriticalityResult & r, const critsim::RunMetrics & m)
{
  std::printf("%s t=%.12g p_cra=%.12g trajectories=%zu (ego %zu, co %zu) pose_combinations=%lld collisions=%zu\n",
              name.c_str(), r.timestamp, r.p_cra, m.trajectories, m.ego_trajectories, m.co_trajectories,
              static_cast<long long>(m.pose_combinations), r.collisions.size());
  for (std::size_t k = 0; k < r.co_ids.size(); ++k) {
    std::printf("  co %d p=%.12g\n", r.co_ids[k], r.co_probability[k]);
  }
  for (std::size_t k = 0; k < std::min<std::size_t>(3, r.escape_routes.size()); ++k) {
    std::printf("  escape %zu: ego trajectory %zu p=%.12g\n", k + 1, r.escape_routes[k].ego,
                r.escape_routes[k].probability);
  }
  if (r.escape_routes.empty()) {
    std::printf("  no escape route\n");
  }
}

void print_bench(const std::string & name, int repeat, const critsim::RunMetrics & m)
{
  const auto & t = m.timings;
  std::printf("bench %s repeat=%d workers=%u (median ms)\n", name.c_str(), repeat, m.workers);
  std::printf("  street        %10.3f\n", t.street_ms);
  std::printf("  trajectories  %10.3f\n", t.trajectories_ms);
  std::printf("  collision     %10.3f\n", t.collision_ms);
  std::printf("  risk          %10.3f\n", t.risk_ms);
  std::printf("  total         %10.3f\n", t.total_ms());
  std::printf("  throughput    %10.4g pose combinations/s\n", m.pose_combinations_per_second);
}

int run(const Options & opt)
{
  const critsim::WorkerPolicy policy = critsim::WorkerPolicy::parse(opt.workers);
  std::optional<json> overrides;
  std::vector<fs::path> frames;
  try {
    if (!opt.config_path.empty()) {
      overrides = critsim::io::read_json_file(opt.config_path);
    }
    if (!fs::exists(opt.input)) {
      throw InputError("no such file or directory: " + opt.input);
    }
    frames = fs::is_directory(opt.input) ? critsim::io::replay_frames(opt.input) : std::vector<fs::path>{opt.input};
    if (frames.empty()) {
      throw InputError("no *.json frames in " + opt.input);
    }
  } catch (const critsim::Error & e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  }

  std::ofstream trace_file;
  std::optional<critsim::trace::TraceWriter> trace;
  if (!opt.trace_path.empty()) {
    trace_file.open(opt.trace_path);
    if (!trace_file) {
      std::cerr << "error: cannot write " << opt.trace_path << '\n';
      return kInputError;
    }
    trace.emplace(trace_file);
  }

  json metrics = json::array();
  int status = kOk;
  for (const auto & path : frames) {
    const std::string name = path.filename().string();
    try {
      const critsim::Scenario scenario = load_frame(path, opt, overrides);
      auto [result, m] = critsim::evaluate(scenario, policy);
      if (opt.bench) {
        std::vector<critsim::StageTimings> runs{m.timings};
        for (int k = 1; k < opt.repeat; ++k) {
          runs.push_back(critsim::evaluate(scenario, policy).second.timings);
        }
        m.timings = median_timings(runs);
        const double seconds = m.timings.total_ms() / 1000.0;
        m.pose_combinations_per_second = seconds > 0.0 ? static_cast<double>(m.pose_combinations) / seconds : 0.0;
      }
      print_summary(name, result, m);
      if (opt.bench) {
        print_bench(name, opt.repeat, m);
      }
      if (trace) {
        trace->write(critsim::trace::make_record(result, m.timings));
      }
      metrics.push_back({{"frame", name}, {"result", critsim::io::result_to_json(result)},
                         {"metrics", critsim::io::metrics_to_json(m)}});
    } catch (const InputError & e) {
      std::cerr << "error: " << name << ": input: " << e.what() << '\n';
      status = std::max<int>(status, kInputError);
    } catch (const critsim::StageError & e) {
      std::cerr << "error: " << name << ": " << e.what() << '\n';
      status = kEngineError;
    }
  }

  if (!opt.metrics_path.empty()) {
    std::ofstream out(opt.metrics_path);
    if (!out) {
      std::cerr << "error: cannot write " << opt.metrics_path << '\n';
      return kInputError;
    }
    out << metrics.dump(2) << '\n';
  }
  return status;
}

}  // namespace

int main(int argc, char ** argv)
{
  CLI::App app{"Criticality assessment for traffic scenarios"};
  app.require_subcommand(1);

  Options opt;
  CLI::App * cmd = app.add_subcommand("run", "Evaluate a scenario file or a directory of replay frames");
  cmd->add_option("input", opt.input, "Scenario JSON file or replay directory")->required();
  cmd->add_option("--trace", opt.trace_path, "Write one CSV trace record per frame");
  cmd->add_option("--metrics", opt.metrics_path, "Write results and run metrics as JSON");
  cmd->add_flag("--bench", opt.bench, "Repeat every frame and report median stage timings");
  cmd->add_option("--repeat", opt.repeat, "Repetitions in bench mode")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--workers", opt.workers, "Worker threads: a count or 'auto'")
    ->check([](const std::string & s) -> std::string {
      try {
        critsim::WorkerPolicy::parse(s);
        return {};
      } catch (const std::exception &) {
        return "expected a positive count or 'auto'";
      }
    })
    ->capture_default_str();
  cmd->add_option("--collision-mode", opt.collision_mode, "Polygon overlap test")
    ->check(CLI::IsMember({"paper", "exact"}));
  cmd->add_option("--config", opt.config_path, "JSON object overriding simulation config keys");

  CLI11_PARSE(app, argc, argv);
  return run(opt);
}
