#include "gridsafe/engine.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gridsafe/scenarios.hpp"
#include "map_text.hpp"

namespace gridsafe {

std::string to_string(Position p) { return "(" + std::to_string(p.x) + "," + std::to_string(p.y) + ")"; }

char action_symbol(Action a) {
  switch (a) {
    case Action::Up: return 'U';
    case Action::Right: return 'R';
    case Action::Down: return 'D';
    case Action::Left: return 'L';
  }
  return '?';
}

Action action_from_symbol(char c) {
  switch (c) {
    case 'U': return Action::Up;
    case 'R': return Action::Right;
    case 'D': return Action::Down;
    case 'L': return Action::Left;
    default: throw ValidationError(std::string("unknown action symbol '") + c + "'");
  }
}

Action direction_between(Position from, Position to) {
  for (Action a : kActions)
    if (moved(from, a) == to) return a;
  throw ContractError("cells " + to_string(from) + " and " + to_string(to) + " are not adjacent");
}

std::string to_string(Terminal t) {
  switch (t) {
    case Terminal::NotTerminal: return "not_terminal";
    case Terminal::AllTargetsCollected: return "all_targets_collected";
    case Terminal::StepBudgetExhausted: return "step_budget_exhausted";
  }
  return "not_terminal";
}

ParseError::ParseError(int l, int c, const std::string& what)
    : ValidationError("line " + std::to_string(l) + (c > 0 ? ", column " + std::to_string(c) : std::string()) + ": " +
                      what),
      line(l),
      column(c) {}

Grid::Grid(int width, int height, std::vector<CellKind> cells)
    : width_(width), height_(height), cells_(std::move(cells)) {
  if (width <= 0 || height <= 0) throw ValidationError("grid dimensions must be positive");
  if (cells_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height))
    throw ValidationError("grid cell count does not match dimensions");
}

Grid Grid::with_wall(Position p) const {
  Grid copy = *this;
  copy.cells_[index(p)] = CellKind::Wall;
  return copy;
}

std::optional<int> GridState::agent_at(Position p) const {
  for (int i = 0; i < num_agents(); ++i)
    if (agents[static_cast<std::size_t>(i)] == p) return i;
  return std::nullopt;
}

bool GridState::has_target_at(Position p) const {
  return std::any_of(targets.begin(), targets.end(), [p](const Target& t) { return t.pos == p; });
}

GridState reset(const ScenarioSpec& spec) {
  validate_scenario(spec);
  GridState s;
  s.grid = std::make_shared<const Grid>(spec.map);
  s.agents = spec.agent_spawns;
  s.targets = spec.targets;
  s.collected.assign(spec.agent_spawns.size(), {});
  s.step = 0;
  s.budget = spec.step_budget;
  return s;
}

StepOutcome step(const GridState& state, const JointAction& actions, const RewardModel& rewards) {
  const auto n = state.agents.size();
  if (actions.size() != n)
    throw ContractError("joint action has " + std::to_string(actions.size()) + " entries for " + std::to_string(n) +
                        " agents");
  if (is_terminal(state) != Terminal::NotTerminal) throw ContractError("step called on a terminal state");

  const Grid& grid = state.map();
  StepOutcome out;
  out.events.assign(n, EventSet{});

  std::vector<Position> target(n);
  std::vector<bool> moving(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    const Position want = moved(state.agents[i], actions[i]);
    if (grid.is_field(want)) {
      target[i] = want;
      moving[i] = true;
    } else {
      target[i] = state.agents[i];
      out.events[i].add(Event::BlockedByWall);
    }
  }

  auto cancel = [&](std::size_t i) {
    target[i] = state.agents[i];
    moving[i] = false;
    out.events[i].add(Event::BlockedByAgent);
  };

  // Cancellations can cascade (a stays, so b moving into a's cell stays, ...).
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        if (target[i] == target[j]) {
          if (moving[i]) cancel(i);
          if (moving[j]) cancel(j);
          changed = true;
        } else if (moving[i] && moving[j] && target[i] == state.agents[j] && target[j] == state.agents[i]) {
          cancel(i);
          cancel(j);
          changed = true;
        }
      }
    }
  }

  out.next = state;
  out.next.step = state.step + 1;
  out.rewards.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    out.next.agents[i] = target[i];
    if (target[i] != state.agents[i]) out.events[i].add(Event::Moved);

    bool collected = false;
    if (out.events[i].has(Event::Moved)) {
      auto& ts = out.next.targets;
      auto it = std::find_if(ts.begin(), ts.end(), [&](const Target& t) {
        return t.pos == target[i] && t.collectible_by(static_cast<int>(i));
      });
      if (it != ts.end()) {
        out.next.collected[i].push_back(it->pos);
        ts.erase(it);
        collected = true;
        out.events[i].add(Event::CollectedTarget);
      }
    }
    out.rewards[i] = rewards.reward(target[i], collected);
  }
  return out;
}

Action idle_action(const GridState& state, int agent) {
  const Position pos = state.agents.at(static_cast<std::size_t>(agent));
  for (Action a : kActions)
    if (!state.map().is_field(moved(pos, a))) return a;
  for (Action a : kActions)
    if (state.agent_at(moved(pos, a))) return a;
  return (state.step % 2 == 0) ? Action::Up : Action::Down;
}

Terminal is_terminal(const GridState& state, int budget) {
  if (state.targets.empty()) return Terminal::AllTargetsCollected;
  if (state.step >= budget) return Terminal::StepBudgetExhausted;
  return Terminal::NotTerminal;
}

double discounted_return(std::span<const double> rewards, double gamma) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw DomainError("discount factor must lie in [0, 1]");
  double g = 0.0;
  // Horner form from the back keeps gamma = 0 exact.
  for (auto it = rewards.rbegin(); it != rewards.rend(); ++it) g = *it + gamma * g;
  return g;
}

std::string render_ascii(const GridState& state) {
  const Grid& grid = state.map();
  std::string out;
  out.reserve(static_cast<std::size_t>((grid.width() + 1) * grid.height()));
  for (int y = 1; y <= grid.height(); ++y) {
    for (int x = 1; x <= grid.width(); ++x) {
      const Position p{x, y};
      char c = grid.at(p) == CellKind::Wall ? '#' : '.';
      for (const Target& t : state.targets)
        if (t.pos == p) c = t.owner ? static_cast<char>('a' + *t.owner) : '$';
      if (auto a = state.agent_at(p)) c = static_cast<char>('1' + *a);
      out.push_back(c);
    }
    if (y < grid.height()) out.push_back('\n');
  }
  return out;
}

GridState parse_ascii(std::string_view text, int budget) {
  auto rows = detail::split_lines(text);
  while (!rows.empty() && rows.back().empty()) rows.pop_back();
  auto parsed = detail::parse_map(rows, 1);
  GridState s;
  s.grid = std::make_shared<const Grid>(std::move(parsed.grid));
  s.agents = std::move(parsed.agents);
  s.targets = std::move(parsed.targets);
  s.collected.assign(s.agents.size(), {});
  s.budget = budget;
  return s;
}

namespace detail {

std::vector<std::string> split_lines(std::string_view text) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto end = text.find('\n', start);
    if (end == std::string_view::npos) {
      if (start < text.size()) lines.emplace_back(text.substr(start));
      break;
    }
    lines.emplace_back(text.substr(start, end - start));
    start = end + 1;
  }
  return lines;
}

ParsedMap parse_map(const std::vector<std::string>& rows, int first_line) {
  if (rows.empty()) throw ParseError(first_line, 0, "map is empty");
  const int width = static_cast<int>(rows.front().size());
  const int height = static_cast<int>(rows.size());
  if (width == 0) throw ParseError(first_line, 0, "map row is empty");

  std::vector<CellKind> cells;
  cells.reserve(static_cast<std::size_t>(width * height));
  std::vector<std::optional<Position>> agents;
  ParsedMap out;
  for (int r = 0; r < height; ++r) {
    const auto& row = rows[static_cast<std::size_t>(r)];
    const int line = first_line + r;
    if (static_cast<int>(row.size()) != width)
      throw ParseError(line, 0, "map row has width " + std::to_string(row.size()) + ", expected " +
                                    std::to_string(width));
    for (int c = 0; c < width; ++c) {
      const char ch = row[static_cast<std::size_t>(c)];
      const Position p{c + 1, r + 1};
      if (ch == '#') {
        cells.push_back(CellKind::Wall);
        continue;
      }
      cells.push_back(CellKind::Field);
      if (ch == '.') continue;
      if (ch == '$') {
        out.targets.push_back({p, std::nullopt});
      } else if (ch >= '1' && ch <= '9') {
        const auto idx = static_cast<std::size_t>(ch - '1');
        if (agents.size() <= idx) agents.resize(idx + 1);
        if (agents[idx]) throw ParseError(line, c + 1, std::string("agent ") + ch + " appears twice");
        agents[idx] = p;
      } else if (ch >= 'a' && ch <= 'i') {
        out.targets.push_back({p, static_cast<int>(ch - 'a')});
      } else {
        throw ParseError(line, c + 1, std::string("unknown map symbol '") + ch + "'");
      }
    }
  }
  for (std::size_t i = 0; i < agents.size(); ++i) {
    if (!agents[i]) throw ParseError(first_line, 0, "agent " + std::to_string(i + 1) + " missing from map");
    out.agents.push_back(*agents[i]);
  }
  out.grid = Grid(width, height, std::move(cells));
  return out;
}

}  // namespace detail

}  // namespace gridsafe
