#include "gridsafe/planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>

#include "gridsafe/engine.hpp"

namespace gridsafe {

double cell_cost(const RewardModel& rewards, Position cell, bool clamp_positive) {
  const double w = rewards.cost_weight(cell);
  return clamp_positive ? std::max(0.0, -w) : std::abs(w);
}

namespace {

struct Key {
  double cost;
  int hops;
};

// -1: a < b, 0: tie, 1: a > b
int compare(Key a, Key b) {
  if (a.cost < b.cost - kCostTolerance) return -1;
  if (a.cost > b.cost + kCostTolerance) return 1;
  if (a.hops != b.hops) return a.hops < b.hops ? -1 : 1;
  return 0;
}

std::size_t draw_index(std::mt19937_64& rng, std::size_t n) {
  // Rejection sampling; portable across standard libraries.
  const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
  const std::uint64_t limit = max - max % n;
  std::uint64_t v;
  do v = rng();
  while (v >= limit);
  return static_cast<std::size_t>(v % n);
}

double draw_unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

bool prefer(Position a, Position b, TieBreak tie) {
  if (tie == TieBreak::BottomRight) return std::tie(a.y, a.x) > std::tie(b.y, b.x);
  return a < b;
}

}  // namespace

ShortestPaths::ShortestPaths(const Grid& grid, const RewardModel& rewards, Position source, bool clamp_positive)
    : grid_(&grid),
      source_(source),
      cost_(grid.size(), std::numeric_limits<double>::infinity()),
      hops_(grid.size(), -1),
      count_(grid.size(), 0.0),
      preds_(grid.size()),
      tie_count_(grid.size(), 0.0),
      tie_preds_(grid.size()) {
  if (!grid.is_field(source)) throw ValidationError("shortest paths from non-field cell " + to_string(source));

  std::vector<double> step_cost(grid.size(), 0.0);
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (grid.is_field(grid.position(i))) step_cost[i] = cell_cost(rewards, grid.position(i), clamp_positive);

  std::vector<bool> done(grid.size(), false);
  struct Item {
    Key key;
    std::size_t idx;
  };
  auto worse = [](const Item& a, const Item& b) {
    const int c = compare(a.key, b.key);
    return c > 0 || (c == 0 && a.idx > b.idx);
  };
  std::priority_queue<Item, std::vector<Item>, decltype(worse)> open(worse);

  const std::size_t s = grid.index(source);
  cost_[s] = 0.0;
  hops_[s] = 0;
  count_[s] = 1.0;
  open.push({{0.0, 0}, s});
  std::vector<std::size_t> order;
  while (!open.empty()) {
    const Item it = open.top();
    open.pop();
    if (done[it.idx]) continue;
    done[it.idx] = true;
    order.push_back(it.idx);
    const Position p = grid.position(it.idx);
    const Key here{cost_[it.idx], hops_[it.idx]};
    for (Action a : kActions) {
      const Position q = moved(p, a);
      if (!grid.is_field(q)) continue;
      const std::size_t qi = grid.index(q);
      if (done[qi]) continue;
      const Key cand{here.cost + step_cost[qi], here.hops + 1};
      const int c = hops_[qi] < 0 ? -1 : compare(cand, Key{cost_[qi], hops_[qi]});
      if (c < 0) {
        cost_[qi] = cand.cost;
        hops_[qi] = cand.hops;
        preds_[qi] = {it.idx};
        count_[qi] = count_[it.idx];
        open.push({cand, qi});
      } else if (c == 0) {
        preds_[qi].push_back(it.idx);
        count_[qi] += count_[it.idx];
      }
    }
  }

  // Equal-cost routes regardless of length, oriented by settle order so the
  // predecessor graph stays acyclic across free (zero-cost) cells.
  std::vector<std::size_t> rank(grid.size(), grid.size());
  for (std::size_t r = 0; r < order.size(); ++r) rank[order[r]] = r;
  tie_count_[s] = 1.0;
  for (std::size_t r = 1; r < order.size(); ++r) {
    const std::size_t v = order[r];
    const Position p = grid.position(v);
    for (Action a : kActions) {
      const Position q = moved(p, a);
      if (!grid.is_field(q)) continue;
      const std::size_t u = grid.index(q);
      if (rank[u] >= r) continue;
      if (std::abs(cost_[u] + step_cost[v] - cost_[v]) > kCostTolerance) continue;
      tie_preds_[v].push_back(u);
      tie_count_[v] += tie_count_[u];
    }
  }
}

std::vector<Position> ShortestPaths::route(Position dest, TieBreak tie, std::mt19937_64* rng) const {
  if (tie != TieBreak::Random) rng = nullptr;
  if (!grid_->in_bounds(dest) || !reachable(dest))
    throw ValidationError("no route from " + to_string(source_) + " to " + to_string(dest));
  std::vector<Position> out;
  std::size_t cur = grid_->index(dest);
  const std::size_t src = grid_->index(source_);
  out.push_back(dest);
  while (cur != src) {
    const auto& ps = rng ? tie_preds_[cur] : preds_[cur];
    std::size_t next = ps.front();
    if (rng && ps.size() > 1) {
      // Weight predecessors by their route counts: uniform over whole routes.
      double total = 0.0;
      for (auto p : ps) total += tie_count_[p];
      double u = draw_unit(*rng) * total;
      next = ps.back();
      for (auto p : ps) {
        if (u < tie_count_[p]) {
          next = p;
          break;
        }
        u -= tie_count_[p];
      }
    } else if (ps.size() > 1) {
      next = *std::min_element(ps.begin(), ps.end(), [&](std::size_t a, std::size_t b) {
        return prefer(grid_->position(a), grid_->position(b), tie);
      });
    }
    cur = next;
    out.push_back(grid_->position(cur));
  }
  std::reverse(out.begin(), out.end());
  return out;
}

namespace {

CostGraph empty_graph(Position start, std::span<const Position> targets) {
  CostGraph g;
  g.nodes.push_back(start);
  g.nodes.insert(g.nodes.end(), targets.begin(), targets.end());
  const std::size_t n = g.nodes.size();
  g.costs.assign(n * n, 0.0);
  g.hop_counts.assign(n * n, 0);
  g.paths.assign(n * n, {});
  return g;
}

void fill_row(CostGraph& g, std::size_t a, const ShortestPaths& sp, TieBreak tie, std::mt19937_64* rng) {
  const std::size_t n = g.size();
  for (std::size_t b = 0; b < n; ++b) {
    const Position dest = g.nodes[b];
    if (!sp.reachable(dest))
      throw ValidationError("waypoint " + to_string(dest) + " unreachable from " + to_string(g.nodes[a]));
    g.costs[a * n + b] = sp.cost(dest);
    g.hop_counts[a * n + b] = sp.hops(dest);
    g.paths[a * n + b] = sp.route(dest, tie, rng);
  }
}

}  // namespace

CostGraph build_cost_graph(const Grid& grid, const RewardModel& rewards, Position start,
                           std::span<const Position> targets, const PlannerOptions& options, std::mt19937_64* rng) {
  if (!grid.is_field(start)) throw ValidationError("planner start " + to_string(start) + " is not a field cell");
  CostGraph g = empty_graph(start, targets);
  for (std::size_t a = 0; a < g.size(); ++a) {
    const ShortestPaths sp(grid, rewards, g.nodes[a], options.clamp_positive);
    fill_row(g, a, sp, route_shape(options), rng);
  }
  return g;
}

CostGraph build_cost_graph(const ScenarioSpec& spec, const RewardModel& rewards, Position start,
                           const PlannerOptions& options) {
  std::vector<Position> targets;
  for (const Target& t : spec.targets) targets.push_back(t.pos);
  return build_cost_graph(spec.map, rewards, start, targets, options);
}

CostGraph build_cost_graph_parallel(const Grid& grid, const RewardModel& rewards, Position start,
                                    std::span<const Position> targets, const PlannerOptions& options) {
  if (!grid.is_field(start)) throw ValidationError("planner start " + to_string(start) + " is not a field cell");
  CostGraph g = empty_graph(start, targets);
  const auto n = static_cast<std::ptrdiff_t>(g.size());
  std::vector<std::string> errors(g.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t a = 0; a < n; ++a) {
    try {
      const ShortestPaths sp(grid, rewards, g.nodes[static_cast<std::size_t>(a)], options.clamp_positive);
      fill_row(g, static_cast<std::size_t>(a), sp, route_shape(options), nullptr);
    } catch (const std::exception& e) {
      errors[static_cast<std::size_t>(a)] = e.what();
    }
  }
  for (const auto& e : errors)
    if (!e.empty()) throw ValidationError(e);
  return g;
}

namespace {


VisitPlan assemble(const CostGraph& graph, const std::vector<std::size_t>& order) {
  VisitPlan plan;
  plan.route.push_back(graph.nodes.front());
  std::size_t cur = 0;
  for (std::size_t next : order) {
    plan.order.push_back(graph.nodes[next]);
    plan.total_cost += graph.edge_cost(cur, next);
    const auto& leg = graph.edge_path(cur, next);
    plan.route.insert(plan.route.end(), leg.begin() + 1, leg.end());
    cur = next;
  }
  return plan;
}

}  // namespace

VisitPlan greedy_hamiltonian(const CostGraph& graph, TieBreak tie, std::mt19937_64* rng) {
  const std::size_t n = graph.size();
  std::vector<bool> visited(n, false);
  visited[0] = true;
  std::vector<std::size_t> order;
  std::size_t cur = 0;
  for (std::size_t k = 1; k < n; ++k) {
    std::vector<std::size_t> best;
    double best_cost = std::numeric_limits<double>::infinity();
    for (std::size_t j = 1; j < n; ++j) {
      if (visited[j]) continue;
      const double c = graph.edge_cost(cur, j);
      if (c < best_cost - kCostTolerance) {
        best = {j};
        best_cost = c;
      } else if (c <= best_cost + kCostTolerance) {
        best.push_back(j);
      }
    }
    std::size_t pick = best.front();
    if (tie == TieBreak::Random && rng && best.size() > 1) {
      pick = best[draw_index(*rng, best.size())];
    } else {
      for (std::size_t j : best)
        if (prefer(graph.nodes[j], graph.nodes[pick], tie)) pick = j;
    }
    visited[pick] = true;
    order.push_back(pick);
    cur = pick;
  }
  return assemble(graph, order);
}

VisitPlan brute_force_hamiltonian(const CostGraph& graph) {
  const std::size_t n = graph.size();
  if (n > 9) throw DomainError("brute force tour supports at most 8 targets, got " + std::to_string(n - 1));
  std::vector<std::size_t> perm(n - 1);
  std::iota(perm.begin(), perm.end(), std::size_t{1});
  std::vector<std::size_t> best = perm;
  double best_cost = std::numeric_limits<double>::infinity();
  do {
    double c = 0.0;
    std::size_t cur = 0;
    for (std::size_t j : perm) {
      c += graph.edge_cost(cur, j);
      cur = j;
    }
    if (c < best_cost - kCostTolerance) {
      best_cost = c;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return assemble(graph, best);
}

Action next_action_on_route(std::span<const Position> route, Position pos) {
  for (std::size_t i = 0; i + 1 < route.size(); ++i)
    if (route[i] == pos) return direction_between(pos, route[i + 1]);
  throw ContractError("position " + to_string(pos) + " has no successor on the route");
}

TspAgent::TspAgent(int agent, RewardModel rewards, PlannerOptions options)
    : agent_(agent), rewards_(std::move(rewards)), options_(options), rng_(options.seed) {}

void TspAgent::reset(const GridState& state) {
  rng_.seed(options_.seed);
  plan_ = {};
  remaining_.clear();
  leg_.clear();
  first_plan_ = true;
  replans_ = 0;
  replan(state);
}

void TspAgent::replan(const GridState& state) {
  const Position pos = state.agents[static_cast<std::size_t>(agent_)];
  std::vector<Position> targets;
  for (const Target& t : state.targets)
    if (t.collectible_by(agent_)) targets.push_back(t.pos);
  if (!first_plan_) ++replans_;
  first_plan_ = false;
  remaining_.clear();
  leg_.clear();
  if (targets.empty()) {
    plan_ = {};
    return;
  }
  std::mt19937_64* rng = options_.tie_break == TieBreak::Random ? &rng_ : nullptr;
  const CostGraph graph = build_cost_graph(state.map(), rewards_, pos, targets, options_, rng);
  plan_ = greedy_hamiltonian(graph, options_.tie_break, rng);
  remaining_ = plan_.order;
  // First leg of the concatenated route ends at the first target.
  const auto first = std::find(plan_.route.begin(), plan_.route.end(), remaining_.front());
  leg_.assign(plan_.route.begin(), first + 1);
}

Action TspAgent::idle_action(const GridState& state) { return gridsafe::idle_action(state, agent_); }

Action TspAgent::act(const GridState& state) {
  const Position pos = state.agents[static_cast<std::size_t>(agent_)];
  auto available = [&](Position p) {
    return std::any_of(state.targets.begin(), state.targets.end(),
                       [&](const Target& t) { return t.pos == p && t.collectible_by(agent_); });
  };

  // Drop targets this agent collected itself.
  while (!remaining_.empty() && remaining_.front() == pos && !available(pos)) {
    remaining_.erase(remaining_.begin());
    leg_.clear();
  }
  if (!remaining_.empty() && !available(remaining_.front())) {
    replan(state);  // head target taken by someone else
  } else if (remaining_.empty()) {
    const bool any = std::any_of(state.targets.begin(), state.targets.end(),
                                 [&](const Target& t) { return t.collectible_by(agent_); });
    if (!any) return idle_action(state);
    replan(state);
  }
  if (remaining_.empty()) return idle_action(state);

  if (leg_.empty() || std::find(leg_.begin(), leg_.end() - 1, pos) == leg_.end() - 1) {
    std::mt19937_64* rng = options_.tie_break == TieBreak::Random ? &rng_ : nullptr;
    const ShortestPaths sp(state.map(), rewards_, pos, options_.clamp_positive);
    leg_ = sp.route(remaining_.front(), route_shape(options_), rng);
  }
  return next_action_on_route(leg_, pos);
}

}  // namespace gridsafe
