#include "gridsafe/rollout.hpp"

#include "gridsafe/engine.hpp"
#include "gridsafe/scenarios.hpp"

namespace gridsafe {

EpisodeTrace run_episode(const ScenarioSpec& spec, std::vector<std::unique_ptr<Controller>>& controllers) {
  if (static_cast<int>(controllers.size()) != spec.num_agents())
    throw ContractError("controller count does not match agent count");
  const RewardModel rewards(spec.reward_mode);
  GridState state = reset(spec);
  for (auto& c : controllers) c->reset(state);

  EpisodeTrace trace;
  while (is_terminal(state) == Terminal::NotTerminal) {
    JointAction joint;
    joint.reserve(controllers.size());
    for (auto& c : controllers) joint.push_back(c->act(state));
    StepOutcome out = step(state, joint, rewards);
    trace.steps.push_back({std::move(state), std::move(joint), std::move(out.rewards), std::move(out.events)});
    state = std::move(out.next);
  }
  trace.terminal = is_terminal(state);
  trace.final_state = std::move(state);
  return trace;
}

EpisodeTrace run_joint(const ScenarioSpec& spec, const ControllerFactory& factory) {
  std::vector<std::unique_ptr<Controller>> controllers;
  for (int i = 0; i < spec.num_agents(); ++i) controllers.push_back(factory(spec, i, i));
  return run_episode(spec, controllers);
}

EpisodeTrace run_solo(const ScenarioSpec& spec, int agent, const ControllerFactory& factory) {
  const ScenarioSpec solo = solo_scenario(spec, agent);
  std::vector<std::unique_ptr<Controller>> controllers;
  controllers.push_back(factory(solo, 0, agent));
  return run_episode(solo, controllers);
}

ControllerFactory tsp_factory(std::vector<PlannerOptions> per_agent) {
  return [per_agent = std::move(per_agent)](const ScenarioSpec& spec, int slot, int identity) {
    const PlannerOptions opts =
        identity < static_cast<int>(per_agent.size()) ? per_agent[static_cast<std::size_t>(identity)] : PlannerOptions{};
    return std::unique_ptr<Controller>(std::make_unique<TspController>(slot, RewardModel(spec.reward_mode), opts));
  };
}

}  // namespace gridsafe
