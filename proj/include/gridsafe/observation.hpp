#pragma once

#include <optional>
#include <vector>

#include "gridsafe/scenario_spec.hpp"
#include "gridsafe/types.hpp"

namespace gridsafe {

/// Local view of one agent: its own cell and the cell of its immediate target.
struct Observation {
  int agent_x = 0;
  int agent_y = 0;
  int target_x = 0;
  int target_y = 0;

  Position agent() const { return {agent_x, agent_y}; }
  Position target() const { return {target_x, target_y}; }
  bool operator==(const Observation&) const = default;
};

enum class DistanceMetric { Manhattan, IntersectionAware };

/// Rasterized straight line, both endpoints included.
struct GridPath {
  std::vector<Position> cells;

  /// Number of moves, i.e. cell count - 1.
  int length() const { return static_cast<int>(cells.size()) - 1; }
  bool contains(Position p) const;
};

/// Integer Bresenham line from `from` to `to` (all octants).
GridPath bresenham_path(Position from, Position to);

/// Line length to `target`, plus the line length to the nearest other agent
/// sitting on that line, if any.
double adapted_distance(const GridState& state, int agent, Position target);

/// Distance of `agent` to `target` under `metric`.
double target_distance(const GridState& state, int agent, Position target, DistanceMetric metric);

/// Closest collectible target under `metric`, ties by smallest (x, y).
std::optional<Position> nearest_target(const GridState& state, int agent, DistanceMetric metric);

/// Throws DomainError when the agent has no collectible target.
Observation observe(const GridState& state, int agent, DistanceMetric metric);

/// Per-episode state of the auxiliary-target detour for one agent.
enum class AuxLatch { Idle, Active, Reached };

struct AuxObservation {
  Observation obs;
  AuxLatch latch;
};

/// Manhattan observation augmented with a detour target. When every agent is
/// equally far from its own current target, `detour_agent` observes `aux`
/// until it stands on it; afterwards normal targeting resumes for the rest of
/// the episode. Other agents are unaffected.
AuxObservation with_auxiliary_target(const GridState& state, int agent, Position aux, AuxLatch latch,
                                     int detour_agent = 0);

/// Stateful observer for one agent in one episode, dispatching on the
/// scenario's observation mode.
class Observer {
 public:
  Observer(int agent, ObservationMode mode, std::optional<Position> aux, int detour_agent = 0);

  void reset() { latch_ = AuxLatch::Idle; }
  /// nullopt when there is nothing left to look at.
  std::optional<Observation> operator()(const GridState& state);

  AuxLatch latch() const { return latch_; }
  /// Forces the latch, used when training the detour leg.
  void set_latch(AuxLatch latch) { latch_ = latch; }

 private:
  int agent_;
  ObservationMode mode_;
  std::optional<Position> aux_;
  int detour_agent_;
  AuxLatch latch_ = AuxLatch::Idle;
};

}  // namespace gridsafe
