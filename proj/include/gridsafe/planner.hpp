#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "gridsafe/parameterization.hpp"
#include "gridsafe/scenario_spec.hpp"
#include "gridsafe/types.hpp"

namespace gridsafe {

/// How equal-cost choices are resolved.
enum class TieBreak {
  Lexicographic,  // smallest (x, y) first
  BottomRight,    // largest (y, x) first
  Random,         // uniform among equal-cost candidates and routes
};

struct PlannerOptions {
  // Choice among equal-cost targets (and, unless route_tie is set, routes).
  TieBreak tie_break = TieBreak::Lexicographic;
  // Shape of the cell route among equal-cost routes; defaults to tie_break.
  // Ignored under a Random tie_break, where routes are sampled.
  std::optional<TieBreak> route_tie;
  // Cell costs are max(0, -P_c) when set, |P_c| otherwise.
  bool clamp_positive = true;
  std::uint64_t seed = 0;
};

inline TieBreak route_shape(const PlannerOptions& o) { return o.route_tie.value_or(o.tie_break); }

inline constexpr double kCostTolerance = 1e-9;

/// Non-negative cost of entering `cell`.
double cell_cost(const RewardModel& rewards, Position cell, bool clamp_positive);

/// Single-source shortest paths over field cells with destination pricing.
/// Ties in accumulated cost are broken by hop count; remaining ties are kept
/// as predecessor sets so that routes can be sampled.
class ShortestPaths {
 public:
  ShortestPaths(const Grid& grid, const RewardModel& rewards, Position source, bool clamp_positive);

  Position source() const { return source_; }
  bool reachable(Position p) const { return hops_[grid_->index(p)] >= 0; }
  double cost(Position p) const { return cost_[grid_->index(p)]; }
  int hops(Position p) const { return hops_[grid_->index(p)]; }
  /// Number of distinct fewest-hops optimal routes (saturates for large counts).
  double route_count(Position p) const { return count_[grid_->index(p)]; }

  /// Number of distinct minimal-cost routes of any length (see route()).
  double equal_cost_route_count(Position p) const { return tie_count_[grid_->index(p)]; }

  /// Optimal route source..dest. For Lexicographic and BottomRight this is
  /// the fewest-hops minimal-cost route, walking back from `dest` through the
  /// preferred predecessor cell. For Random (with `rng`) a route is drawn
  /// uniformly among all minimal-cost routes that respect the search's settle
  /// order; across free cells these can differ in length.
  std::vector<Position> route(Position dest, TieBreak tie = TieBreak::Lexicographic,
                              std::mt19937_64* rng = nullptr) const;

 private:
  const Grid* grid_;
  Position source_;
  std::vector<double> cost_;
  std::vector<int> hops_;
  std::vector<double> count_;
  std::vector<std::vector<std::size_t>> preds_;
  std::vector<double> tie_count_;
  std::vector<std::vector<std::size_t>> tie_preds_;
};

/// Complete waypoint graph. nodes[0] is the start.
struct CostGraph {
  std::vector<Position> nodes;
  std::vector<double> costs;  // row-major n x n
  std::vector<int> hop_counts;
  std::vector<std::vector<Position>> paths;

  std::size_t size() const { return nodes.size(); }
  double edge_cost(std::size_t a, std::size_t b) const { return costs[a * size() + b]; }
  int edge_hops(std::size_t a, std::size_t b) const { return hop_counts[a * size() + b]; }
  const std::vector<Position>& edge_path(std::size_t a, std::size_t b) const { return paths[a * size() + b]; }
};

/// Throws ValidationError when a waypoint pair is not connected.
CostGraph build_cost_graph(const Grid& grid, const RewardModel& rewards, Position start,
                           std::span<const Position> targets, const PlannerOptions& options = {},
                           std::mt19937_64* rng = nullptr);

/// Graph over all targets of the scenario.
CostGraph build_cost_graph(const ScenarioSpec& spec, const RewardModel& rewards, Position start,
                           const PlannerOptions& options = {});

/// Same result as build_cost_graph with one OpenMP task per source node.
/// Route sampling is not supported here (rng-free).
CostGraph build_cost_graph_parallel(const Grid& grid, const RewardModel& rewards, Position start,
                                    std::span<const Position> targets, const PlannerOptions& options = {});

struct VisitPlan {
  std::vector<Position> order;
  std::vector<Position> route;  // start .. last target
  double total_cost = 0.0;

  int route_length() const { return route.empty() ? 0 : static_cast<int>(route.size()) - 1; }
};

/// Nearest-neighbour open tour from node 0.
VisitPlan greedy_hamiltonian(const CostGraph& graph, TieBreak tie = TieBreak::Lexicographic,
                             std::mt19937_64* rng = nullptr);

/// Exact minimum-cost open tour from node 0 by permutation enumeration.
/// At most 8 targets.
VisitPlan brute_force_hamiltonian(const CostGraph& graph);

/// Next move along `route` from `pos`. Throws ContractError when pos is not on the route.
Action next_action_on_route(std::span<const Position> route, Position pos);

/// Greedy TSP planning agent. Full map knowledge, no model of other agents:
/// it replans only when its current head target disappears.
class TspAgent {
 public:
  TspAgent(int agent, RewardModel rewards, PlannerOptions options = {});

  void reset(const GridState& state);
  Action act(const GridState& state);

  const VisitPlan& plan() const { return plan_; }
  int replans() const { return replans_; }

 private:
  void replan(const GridState& state);
  Action idle_action(const GridState& state);

  int agent_;
  RewardModel rewards_;
  PlannerOptions options_;
  std::mt19937_64 rng_;
  VisitPlan plan_;
  std::vector<Position> remaining_;  // plan order not yet reached
  std::vector<Position> leg_;        // route to remaining_.front()
  bool first_plan_ = true;
  int replans_ = 0;
};

}  // namespace gridsafe
