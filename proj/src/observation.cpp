#include "gridsafe/observation.hpp"

#include <algorithm>
#include <cstdlib>
#include <limits>

namespace gridsafe {

bool GridPath::contains(Position p) const { return std::find(cells.begin(), cells.end(), p) != cells.end(); }

GridPath bresenham_path(Position from, Position to) {
  GridPath path;
  int x = from.x;
  int y = from.y;
  const int dx = std::abs(to.x - from.x);
  const int dy = -std::abs(to.y - from.y);
  const int sx = from.x < to.x ? 1 : -1;
  const int sy = from.y < to.y ? 1 : -1;
  int err = dx + dy;
  for (;;) {
    path.cells.push_back({x, y});
    if (x == to.x && y == to.y) break;
    const int e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      x += sx;
    }
    if (e2 <= dx) {
      err += dx;
      y += sy;
    }
  }
  return path;
}

double adapted_distance(const GridState& state, int agent, Position target) {
  const Position self = state.agents[static_cast<std::size_t>(agent)];
  const GridPath line = bresenham_path(self, target);
  // Nearest obstruction along the line wins.
  for (std::size_t k = 1; k < line.cells.size(); ++k) {
    const auto other = state.agent_at(line.cells[k]);
    if (other && *other != agent) {
      const GridPath to_other = bresenham_path(self, state.agents[static_cast<std::size_t>(*other)]);
      return static_cast<double>(line.length() + to_other.length());
    }
  }
  return static_cast<double>(line.length());
}

double target_distance(const GridState& state, int agent, Position target, DistanceMetric metric) {
  if (metric == DistanceMetric::IntersectionAware) return adapted_distance(state, agent, target);
  return static_cast<double>(manhattan(state.agents[static_cast<std::size_t>(agent)], target));
}

std::optional<Position> nearest_target(const GridState& state, int agent, DistanceMetric metric) {
  std::optional<Position> best;
  double best_d = std::numeric_limits<double>::infinity();
  for (const Target& t : state.targets) {
    if (!t.collectible_by(agent)) continue;
    const double d = target_distance(state, agent, t.pos, metric);
    if (d < best_d || (d == best_d && best && t.pos < *best)) {
      best = t.pos;
      best_d = d;
    }
  }
  return best;
}

namespace {

Observation make_obs(Position self, Position target) { return {self.x, self.y, target.x, target.y}; }

}  // namespace

Observation observe(const GridState& state, int agent, DistanceMetric metric) {
  const auto t = nearest_target(state, agent, metric);
  if (!t) throw DomainError("agent " + std::to_string(agent + 1) + " has no target to observe");
  return make_obs(state.agents[static_cast<std::size_t>(agent)], *t);
}

AuxObservation with_auxiliary_target(const GridState& state, int agent, Position aux, AuxLatch latch,
                                     int detour_agent) {
  if (!state.map().is_field(aux)) throw DomainError("auxiliary target " + to_string(aux) + " is not a field cell");
  const Position self = state.agents[static_cast<std::size_t>(agent)];
  const auto own = nearest_target(state, agent, DistanceMetric::Manhattan);

  if (agent == detour_agent) {
    if (latch == AuxLatch::Idle && own && state.num_agents() > 1) {
      bool equal = true;
      const int d0 = manhattan(self, *own);
      for (int j = 0; j < state.num_agents() && equal; ++j) {
        if (j == agent) continue;
        const auto tj = nearest_target(state, j, DistanceMetric::Manhattan);
        equal = tj && manhattan(state.agents[static_cast<std::size_t>(j)], *tj) == d0;
      }
      if (equal) latch = AuxLatch::Active;
    }
    if (latch == AuxLatch::Active && self == aux) latch = AuxLatch::Reached;
    if (latch == AuxLatch::Active) return {make_obs(self, aux), latch};
  }
  if (!own) throw DomainError("agent " + std::to_string(agent + 1) + " has no target to observe");
  return {make_obs(self, *own), latch};
}

Observer::Observer(int agent, ObservationMode mode, std::optional<Position> aux, int detour_agent)
    : agent_(agent), mode_(mode), aux_(aux), detour_agent_(detour_agent) {}

std::optional<Observation> Observer::operator()(const GridState& state) {
  const bool has_target = nearest_target(state, agent_, DistanceMetric::Manhattan).has_value();
  switch (mode_) {
    case ObservationMode::Manhattan:
      if (!has_target) return std::nullopt;
      return observe(state, agent_, DistanceMetric::Manhattan);
    case ObservationMode::IntersectionAware:
      if (!has_target) return std::nullopt;
      return observe(state, agent_, DistanceMetric::IntersectionAware);
    case ObservationMode::AuxiliaryTarget: {
      if (!aux_) throw DomainError("auxiliary_target observation without an aux cell");
      if (!has_target && latch_ != AuxLatch::Active) return std::nullopt;
      const auto r = with_auxiliary_target(state, agent_, *aux_, latch_, detour_agent_);
      latch_ = r.latch;
      return r.obs;
    }
  }
  return std::nullopt;
}

}  // namespace gridsafe
