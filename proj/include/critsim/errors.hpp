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

#ifndef CRITSIM__ERRORS_HPP_
#define CRITSIM__ERRORS_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace critsim
{

/// Base class of every error raised by the library.
class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Ill-formed scenario input (missing EGO, non-finite numbers, bad config).
class ScenarioError : public Error
{
public:
  using Error::Error;
};

/// Degenerate divider fits and inconsistent lane topology.
class GeometryError : public Error
{
public:
  using Error::Error;
};

/// Trajectory sets that cannot be paired (step-count mismatch).
class CollisionError : public Error
{
public:
  using Error::Error;
};

/// Pipeline stages, in execution order.
enum class Stage { street, trajectories, collision, risk };

inline constexpr std::string_view to_string(Stage stage)
{
  switch (stage) {
    case Stage::street:
      return "street";
    case Stage::trajectories:
      return "trajectories";
    case Stage::collision:
      return "collision";
    case Stage::risk:
      return "risk";
  }
  return "unknown";
}

/// Error raised by the engine; carries the stage that failed.
class StageError : public Error
{
public:
  StageError(Stage stage, const std::string & what)
  : Error(std::string(to_string(stage)) + " stage: " + what), stage_(stage)
  {
  }

  Stage stage() const noexcept { return stage_; }

private:
  Stage stage_;
};

}  // namespace critsim

#endif  // CRITSIM__ERRORS_HPP_
