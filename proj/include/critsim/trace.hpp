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

// Per-frame CSV trace. Column layout in docs/trace_format.md.

#ifndef CRITSIM__TRACE_HPP_
#define CRITSIM__TRACE_HPP_

#include <array>
#include <cstdio>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "critsim/engine.hpp"
#include "critsim/errors.hpp"

namespace critsim::trace
{

inline constexpr int kEscapeColumns = 3;

inline constexpr const char * kHeader =
  "timestamp,p_cra,co_probabilities,colliding_combinations,"
  "escape_1_id,escape_1_p,escape_2_id,escape_2_p,escape_3_id,escape_3_p,"
  "t_street_ms,t_trajectories_ms,t_collision_ms,t_risk_ms";

struct TraceRecord
{
  double timestamp{0.0};
  double p_cra{0.0};
  std::vector<std::pair<int, double>> co_probabilities;
  std::size_t colliding_combinations{0};
  std::array<std::optional<std::pair<std::size_t, double>>, kEscapeColumns> escapes{};
  StageTimings timings;

  bool operator==(const TraceRecord &) const = default;
};

inline TraceRecord make_record(const CriticalityResult & result, const StageTimings & timings)
{
  TraceRecord r;
  r.timestamp = result.timestamp;
  r.p_cra = result.p_cra;
  for (std::size_t k = 0; k < result.co_ids.size(); ++k) {
    r.co_probabilities.emplace_back(result.co_ids[k], result.co_probability[k]);
  }
  r.colliding_combinations = result.collisions.size();
  for (std::size_t k = 0; k < r.escapes.size() && k < result.escape_routes.size(); ++k) {
    r.escapes[k] = std::pair{result.escape_routes[k].ego, result.escape_routes[k].probability};
  }
  r.timings = timings;
  return r;
}

inline std::string format_number(double v)
{
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.12g", v);
  return buffer;
}

inline std::string format_record(const TraceRecord & r)
{
  std::string out = format_number(r.timestamp) + "," + format_number(r.p_cra) + ",";
  for (std::size_t k = 0; k < r.co_probabilities.size(); ++k) {
    if (k > 0) {
      out += ";";
    }
    out += std::to_string(r.co_probabilities[k].first) + ":" + format_number(r.co_probabilities[k].second);
  }
  out += "," + std::to_string(r.colliding_combinations);
  for (const auto & e : r.escapes) {
    out += e ? "," + std::to_string(e->first) + "," + format_number(e->second) : std::string(",,");
  }
  for (double t : {r.timings.street_ms, r.timings.trajectories_ms, r.timings.collision_ms, r.timings.risk_ms}) {
    out += "," + format_number(t);
  }
  return out;
}

class TraceWriter
{
public:
  explicit TraceWriter(std::ostream & out) : out_(out) { out_ << kHeader << '\n'; }

  void write(const TraceRecord & r) { out_ << format_record(r) << '\n'; }

private:
  std::ostream & out_;
};

namespace detail
{

inline std::vector<std::string> split(const std::string & line, char sep)
{
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, sep)) {
    cells.push_back(cell);
  }
  if (!line.empty() && line.back() == sep) {
    cells.emplace_back();
  }
  return cells;
}

inline double to_double(const std::string & s)
{
  try {
    return std::stod(s);
  } catch (const std::exception &) {
    throw Error("trace: malformed number '" + s + "'");
  }
}

}  // namespace detail

inline TraceRecord parse_record(const std::string & line)
{
  const auto cells = detail::split(line, ',');
  if (cells.size() != 14) {
    throw Error("trace: expected 14 columns, got " + std::to_string(cells.size()));
  }
  TraceRecord r;
  r.timestamp = detail::to_double(cells[0]);
  r.p_cra = detail::to_double(cells[1]);
  if (!cells[2].empty()) {
    for (const auto & item : detail::split(cells[2], ';')) {
      const auto colon = item.find(':');
      if (colon == std::string::npos) {
        throw Error("trace: malformed CO probability '" + item + "'");
      }
      r.co_probabilities.emplace_back(std::stoi(item.substr(0, colon)), detail::to_double(item.substr(colon + 1)));
    }
  }
  r.colliding_combinations = std::stoull(cells[3]);
  for (int k = 0; k < kEscapeColumns; ++k) {
    const auto & id = cells[4 + 2 * k];
    if (!id.empty()) {
      r.escapes[k] = std::pair{static_cast<std::size_t>(std::stoull(id)), detail::to_double(cells[5 + 2 * k])};
    }
  }
  r.timings.street_ms = detail::to_double(cells[10]);
  r.timings.trajectories_ms = detail::to_double(cells[11]);
  r.timings.collision_ms = detail::to_double(cells[12]);
  r.timings.risk_ms = detail::to_double(cells[13]);
  return r;
}

inline std::vector<TraceRecord> read_trace(std::istream & in)
{
  std::string line;
  if (!std::getline(in, line) || line != kHeader) {
    throw Error("trace: missing or unexpected header");
  }
  std::vector<TraceRecord> records;
  while (std::getline(in, line)) {
    if (!line.empty()) {
      records.push_back(parse_record(line));
    }
  }
  return records;
}

}  // namespace critsim::trace

#endif  // CRITSIM__TRACE_HPP_
