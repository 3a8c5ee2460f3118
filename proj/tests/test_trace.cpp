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


#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "critsim/trace.hpp"
#include "support.hpp"

namespace critsim
{
namespace
{

trace::TraceRecord random_record(std::mt19937_64 & rng)
{
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> id(1, 500);
  trace::TraceRecord r;
  r.timestamp = 100.0 * u(rng);
  r.p_cra = u(rng);
  const int cos = static_cast<int>(rng() % 5);
  for (int k = 0; k < cos; ++k) {
    r.co_probabilities.emplace_back(id(rng), u(rng));
  }
  r.colliding_combinations = rng() % 100000;
  const int escapes = static_cast<int>(rng() % 4);
  for (int k = 0; k < escapes; ++k) {
    r.escapes[k] = std::pair{static_cast<std::size_t>(rng() % 2058), u(rng)};
  }
  r.timings = {u(rng) * 10, u(rng) * 100, u(rng) * 1000, u(rng)};
  return r;
}

// %.12g keeps 12 significant digits.
void expect_close(const trace::TraceRecord & a, const trace::TraceRecord & b)
{
  const auto near = [](double x, double y) { EXPECT_NEAR(x, y, 1e-11 * std::max(1.0, std::abs(x))); };
  near(a.timestamp, b.timestamp);
  near(a.p_cra, b.p_cra);
  ASSERT_EQ(a.co_probabilities.size(), b.co_probabilities.size());
  for (std::size_t k = 0; k < a.co_probabilities.size(); ++k) {
    EXPECT_EQ(a.co_probabilities[k].first, b.co_probabilities[k].first);
    near(a.co_probabilities[k].second, b.co_probabilities[k].second);
  }
  EXPECT_EQ(a.colliding_combinations, b.colliding_combinations);
  for (std::size_t k = 0; k < a.escapes.size(); ++k) {
    ASSERT_EQ(a.escapes[k].has_value(), b.escapes[k].has_value());
    if (a.escapes[k]) {
      EXPECT_EQ(a.escapes[k]->first, b.escapes[k]->first);
      near(a.escapes[k]->second, b.escapes[k]->second);
    }
  }
  near(a.timings.collision_ms, b.timings.collision_ms);
}

TEST(Trace, RoundTrip)
{
  std::mt19937_64 rng(11);
  std::vector<trace::TraceRecord> records;
  std::stringstream buffer;
  {
    trace::TraceWriter writer(buffer);
    for (int k = 0; k < 200; ++k) {
      records.push_back(random_record(rng));
      writer.write(records.back());
    }
  }
  const auto back = trace::read_trace(buffer);
  ASSERT_EQ(back.size(), records.size());
  for (std::size_t k = 0; k < records.size(); ++k) {
    expect_close(records[k], back[k]);
    EXPECT_EQ(trace::format_record(back[k]), trace::format_record(records[k]));
  }
}

TEST(Trace, FormatExample)
{
  trace::TraceRecord r;
  r.timestamp = 0.5;
  r.p_cra = 0.25;
  r.co_probabilities = {{1, 0.125}, {7, 0.125}};
  r.colliding_combinations = 12;
  r.escapes[0] = std::pair{std::size_t{3}, 0.5};
  r.timings = {1, 2, 3, 4};
  EXPECT_EQ(trace::format_record(r), "0.5,0.25,1:0.125;7:0.125,12,3,0.5,,,,,1,2,3,4");
  EXPECT_EQ(trace::parse_record(trace::format_record(r)), r);
}

TEST(Trace, RejectsMalformedInput)
{
  std::istringstream no_header("0.5,0.25,,0,,,,,,,1,2,3,4\n");
  EXPECT_THROW(trace::read_trace(no_header), Error);
  EXPECT_THROW(trace::parse_record("1,2,3"), Error);
  EXPECT_THROW(trace::parse_record("x,0.25,,0,,,,,,,1,2,3,4"), Error);
  EXPECT_THROW(trace::parse_record("0,0.25,17,0,,,,,,,1,2,3,4"), Error);
}

TEST(Trace, ContentIndependentOfWorkers)
{
  const Scenario s = validate_scenario(testing::three_lane_scenario(testing::ego_lane_traffic(3)));
  std::vector<std::string> lines;
  for (const auto & policy : {WorkerPolicy::sequential(), WorkerPolicy::fixed(3), WorkerPolicy::all_cores()}) {
    const auto [result, metrics] = evaluate(s, policy);
    auto record = trace::make_record(result, metrics.timings);
    record.timings = {};
    lines.push_back(trace::format_record(record));
  }
  EXPECT_EQ(lines[0], lines[1]);
  EXPECT_EQ(lines[0], lines[2]);
}

}  // namespace
}  // namespace critsim
