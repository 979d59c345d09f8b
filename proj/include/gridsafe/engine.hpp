#pragma once

#include <span>
#include <string>
#include <string_view>

#include "gridsafe/parameterization.hpp"
#include "gridsafe/scenario_spec.hpp"
#include "gridsafe/types.hpp"

namespace gridsafe {

/// Initial state of a scenario. Validates the spec first.
GridState reset(const ScenarioSpec& spec);

/// Deterministic simultaneous transition.
///
/// Every agent proposes the cell its action leads to. Moves off the grid or
/// into walls become no-ops. Agent conflicts are then resolved until stable:
/// two agents proposing the same cell both stay, an agent proposing a cell
/// whose occupant stays put stays as well, and position swaps are cancelled.
/// Entering a collectible target removes it. Every agent pays the step
/// weight of its destination cell, including blocked agents.
StepOutcome step(const GridState& state, const JointAction& actions, const RewardModel& rewards);

/// An action that leaves `agent` where it is: a move into a wall or off the
/// grid, else a move into another agent; in open surroundings it alternates
/// Up and Down with the step parity.
Action idle_action(const GridState& state, int agent);

Terminal is_terminal(const GridState& state, int budget);
inline Terminal is_terminal(const GridState& state) { return is_terminal(state, state.budget); }

/// sum_k gamma^k r_k
double discounted_return(std::span<const double> rewards, double gamma);

/// Row-major text, one line per row: '#' wall, '.' field, digits for agents,
/// '$' shared targets, 'a'/'b'/... for targets owned by agent 1/2/...
std::string render_ascii(const GridState& state);

/// Inverse of render_ascii. Collected lists start empty.
GridState parse_ascii(std::string_view text, int budget = 0);

}  // namespace gridsafe
