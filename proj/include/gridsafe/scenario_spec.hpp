#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gridsafe/parameterization.hpp"
#include "gridsafe/types.hpp"

namespace gridsafe {

enum class ObservationMode { Manhattan, IntersectionAware, AuxiliaryTarget };

std::string to_string(ObservationMode m);
ObservationMode observation_mode_from_string(std::string_view s);

struct ScenarioSpec {
  std::string name;
  Grid map;
  std::vector<Position> agent_spawns;
  std::vector<Target> targets;
  int step_budget = 100;
  RewardMode reward_mode = RewardMode::Base;
  ObservationMode observation_mode = ObservationMode::Manhattan;
  std::optional<Position> auxiliary_target;

  int num_agents() const { return static_cast<int>(agent_spawns.size()); }
  bool has_owned_targets() const;

  bool operator==(const ScenarioSpec&) const = default;
};

}  // namespace gridsafe
