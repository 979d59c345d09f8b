#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "gridsafe/planner.hpp"
#include "gridsafe/scenario_spec.hpp"
#include "gridsafe/types.hpp"

namespace gridsafe {

/// A per-episode decision maker for one agent slot.
class Controller {
 public:
  virtual ~Controller() = default;
  virtual void reset(const GridState& state) = 0;
  virtual Action act(const GridState& state) = 0;
};

/// Builds the controller for `slot` in an episode of `episode_spec`.
/// `identity` is the agent's index in the original joint scenario, so a solo
/// run of agent 2 uses agent 2's policy in slot 0.
using ControllerFactory =
    std::function<std::unique_ptr<Controller>(const ScenarioSpec& episode_spec, int slot, int identity)>;

/// Runs until the state is terminal. Reward model follows spec.reward_mode.
EpisodeTrace run_episode(const ScenarioSpec& spec, std::vector<std::unique_ptr<Controller>>& controllers);

EpisodeTrace run_joint(const ScenarioSpec& spec, const ControllerFactory& factory);

/// Agent `agent` alone, with only the targets it may collect.
EpisodeTrace run_solo(const ScenarioSpec& spec, int agent, const ControllerFactory& factory);

class TspController : public Controller {
 public:
  TspController(int slot, RewardModel rewards, PlannerOptions options) : agent_(slot, std::move(rewards), options) {}
  void reset(const GridState& state) override { agent_.reset(state); }
  Action act(const GridState& state) override { return agent_.act(state); }
  const TspAgent& agent() const { return agent_; }

 private:
  TspAgent agent_;
};

/// TSP controllers with per-identity options (e.g. a forced tie for agent 1).
ControllerFactory tsp_factory(std::vector<PlannerOptions> per_agent);

}  // namespace gridsafe
