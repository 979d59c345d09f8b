#include "gridsafe/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <queue>
#include <random>
#include <set>
#include <sstream>

#include "gridsafe/engine.hpp"
#include "map_text.hpp"

namespace gridsafe {

std::string to_string(ObservationMode m) {
  switch (m) {
    case ObservationMode::Manhattan: return "manhattan";
    case ObservationMode::IntersectionAware: return "intersection_aware";
    case ObservationMode::AuxiliaryTarget: return "auxiliary_target";
  }
  return "manhattan";
}

ObservationMode observation_mode_from_string(std::string_view s) {
  if (s == "manhattan") return ObservationMode::Manhattan;
  if (s == "intersection_aware") return ObservationMode::IntersectionAware;
  if (s == "auxiliary_target") return ObservationMode::AuxiliaryTarget;
  throw ValidationError("unknown observation_mode '" + std::string(s) + "'");
}

bool ScenarioSpec::has_owned_targets() const {
  return std::any_of(targets.begin(), targets.end(), [](const Target& t) { return t.owner.has_value(); });
}

std::vector<int> bfs_distances(const Grid& grid, Position source) {
  std::vector<int> dist(grid.size(), -1);
  if (!grid.is_field(source)) return dist;
  std::queue<Position> frontier;
  dist[grid.index(source)] = 0;
  frontier.push(source);
  while (!frontier.empty()) {
    const Position p = frontier.front();
    frontier.pop();
    const int d = dist[grid.index(p)];
    for (Action a : kActions) {
      const Position q = moved(p, a);
      if (!grid.is_field(q) || dist[grid.index(q)] >= 0) continue;
      dist[grid.index(q)] = d + 1;
      frontier.push(q);
    }
  }
  return dist;
}

int bfs_distance(const Grid& grid, Position from, Position to) {
  if (!grid.in_bounds(to)) return -1;
  return bfs_distances(grid, from)[grid.index(to)];
}

std::vector<Position> separating_cells(const Grid& grid, Position a, Position b) {
  std::vector<Position> out;
  if (bfs_distance(grid, a, b) < 0) return out;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Position p = grid.position(i);
    if (p == a || p == b || !grid.is_field(p)) continue;
    if (bfs_distance(grid.with_wall(p), a, b) < 0) out.push_back(p);
  }
  return out;
}

int default_budget(std::string_view name) { return name.starts_with("two_rooms") ? 30 : 100; }

void validate_scenario(const ScenarioSpec& spec) {
  const Grid& g = spec.map;
  if (g.width() <= 0 || g.height() <= 0) throw ValidationError("scenario map is empty");
  if (spec.agent_spawns.empty()) throw ValidationError("scenario has no agents");
  if (spec.step_budget <= 0) throw ValidationError("step budget must be positive");

  std::set<Position> spawns;
  for (std::size_t i = 0; i < spec.agent_spawns.size(); ++i) {
    const Position p = spec.agent_spawns[i];
    if (!g.is_field(p))
      throw ValidationError("agent " + std::to_string(i + 1) + " spawns on a non-field cell " + to_string(p));
    if (!spawns.insert(p).second) throw ValidationError("two agents share spawn cell " + to_string(p));
  }

  std::set<Position> seen;
  for (const Target& t : spec.targets) {
    if (!g.is_field(t.pos)) throw ValidationError("target on a non-field cell " + to_string(t.pos));
    if (spawns.count(t.pos)) throw ValidationError("target on a spawn cell " + to_string(t.pos));
    if (!seen.insert(t.pos).second) throw ValidationError("two targets share cell " + to_string(t.pos));
    if (t.owner && (*t.owner < 0 || *t.owner >= spec.num_agents()))
      throw ValidationError("target " + to_string(t.pos) + " owned by a missing agent");

    bool reachable = false;
    for (int i = 0; i < spec.num_agents(); ++i) {
      if (!t.collectible_by(i)) continue;
      if (bfs_distance(g, spec.agent_spawns[static_cast<std::size_t>(i)], t.pos) >= 0) reachable = true;
    }
    if (!reachable) throw ValidationError("target " + to_string(t.pos) + " is unreachable for its collector");
  }

  if (spec.auxiliary_target && !g.is_field(*spec.auxiliary_target))
    throw ValidationError("auxiliary target " + to_string(*spec.auxiliary_target) + " is not a field cell");
  if (spec.observation_mode == ObservationMode::AuxiliaryTarget && !spec.auxiliary_target)
    throw ValidationError("observation_mode auxiliary_target requires an aux cell");

  if (spec.name.starts_with("two_rooms")) {
    if (spec.num_agents() != 2) throw ValidationError("two-rooms scenario needs exactly two agents");
    const auto doors = separating_cells(g, spec.agent_spawns[0], spec.agent_spawns[1]);
    if (doors.size() != 1)
      throw ValidationError("two-rooms map must have exactly one door cell separating the spawns, found " +
                            std::to_string(doors.size()));
  }
}

// ---------------------------------------------------------------------------

std::vector<Position> quarter_circle_arc(const CoinQuadrantLayout& layout) {
  const Position c = layout.arc_center;
  std::vector<std::pair<double, Position>> cells;
  for (int y = 1; y <= c.y; ++y) {
    for (int x = c.x; x <= layout.width; ++x) {
      const double dx = x - c.x;
      const double dy = c.y - y;
      if (static_cast<int>(std::lround(std::hypot(dx, dy))) != layout.radius) continue;
      if (y < 1 || x > layout.width) continue;
      cells.emplace_back(std::atan2(dy, dx), Position{x, y});
    }
  }
  // Descending angle: upper-left end first.
  std::sort(cells.begin(), cells.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  std::vector<Position> out;
  out.reserve(cells.size());
  for (const auto& [angle, p] : cells) out.push_back(p);
  return out;
}

namespace {

ScenarioSpec coin_room(const CoinQuadrantLayout& layout, std::vector<Position> coins, std::string name) {
  ScenarioSpec spec;
  spec.name = std::move(name);
  spec.map = Grid(layout.width, layout.height,
                  std::vector<CellKind>(static_cast<std::size_t>(layout.width * layout.height), CellKind::Field));
  spec.agent_spawns = {layout.agent1, layout.agent2};
  std::sort(coins.begin(), coins.end(), [](Position a, Position b) { return std::tie(a.y, a.x) < std::tie(b.y, b.x); });
  for (Position p : coins) spec.targets.push_back({p, std::nullopt});
  spec.step_budget = default_budget(spec.name);
  spec.reward_mode = RewardMode::Base;
  spec.observation_mode = ObservationMode::Manhattan;
  return spec;
}

void check_coin_count(int n_coins) {
  if (n_coins < 2 || n_coins > 12) throw DomainError("coin count must lie in [2, 12], got " + std::to_string(n_coins));
}

}  // namespace

ScenarioSpec build_coin_quadrant(int n_coins) { return build_coin_quadrant(n_coins, canonical_coin_layout()); }

ScenarioSpec build_coin_quadrant(int n_coins, const CoinQuadrantLayout& layout) {
  check_coin_count(n_coins);
  const auto arc = quarter_circle_arc(layout);
  if (static_cast<int>(arc.size()) < n_coins)
    throw DomainError("arc holds " + std::to_string(arc.size()) + " cells, fewer than " + std::to_string(n_coins));
  std::vector<Position> coins;
  if (n_coins == 5 && !layout.five_coin_arc_indices.empty()) {
    if (layout.five_coin_arc_indices.size() != 5) throw ValidationError("five-coin placement needs five arc indices");
    for (std::size_t idx : layout.five_coin_arc_indices) {
      if (idx >= arc.size()) throw ValidationError("coin index " + std::to_string(idx) + " is off the arc");
      coins.push_back(arc[idx]);
    }
  } else {
    const double span = static_cast<double>(arc.size() - 1);
    for (int k = 0; k < n_coins; ++k) {
      const auto idx = static_cast<std::size_t>(std::lround(k * span / (n_coins - 1)));
      coins.push_back(arc[idx]);
    }
  }
  auto spec = coin_room(layout, std::move(coins), "coin_quadrant");
  validate_scenario(spec);
  return spec;
}

ScenarioSpec gen_random_quarter_circle(std::uint64_t seed, int n_coins) {
  return gen_random_quarter_circle(seed, n_coins, canonical_coin_layout());
}

ScenarioSpec gen_random_quarter_circle(std::uint64_t seed, int n_coins, const CoinQuadrantLayout& layout) {
  check_coin_count(n_coins);
  auto arc = quarter_circle_arc(layout);
  if (static_cast<int>(arc.size()) < n_coins)
    throw DomainError("arc holds " + std::to_string(arc.size()) + " cells, fewer than " + std::to_string(n_coins));
  // Partial Fisher-Yates with rejection sampling keeps the draw independent of
  // the standard library's distribution implementations.
  std::mt19937_64 rng(seed);
  auto below = [&rng](std::uint64_t n) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t v;
    do v = rng();
    while (v >= limit);
    return v % n;
  };
  for (std::size_t i = 0; i < static_cast<std::size_t>(n_coins); ++i) {
    const auto j = i + static_cast<std::size_t>(below(arc.size() - i));
    std::swap(arc[i], arc[j]);
  }
  arc.resize(static_cast<std::size_t>(n_coins));
  auto spec = coin_room(layout, std::move(arc), "coin_quadrant_random");
  validate_scenario(spec);
  return spec;
}

std::vector<ScenarioSpec> coin_sweep_settings(int n_settings, int coins_min, int coins_max, std::uint64_t base_seed) {
  return coin_sweep_settings(n_settings, coins_min, coins_max, base_seed, canonical_coin_layout());
}

std::vector<ScenarioSpec> coin_sweep_settings(int n_settings, int coins_min, int coins_max, std::uint64_t base_seed,
                                              const CoinQuadrantLayout& layout) {
  if (n_settings < 0) throw DomainError("setting count must be non-negative");
  if (coins_min > coins_max) throw DomainError("coins_min exceeds coins_max");
  check_coin_count(coins_min);
  check_coin_count(coins_max);
  std::vector<ScenarioSpec> out;
  for (int k = 0; k < n_settings; ++k) {
    const std::uint64_t seed = base_seed + static_cast<std::uint64_t>(k);
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
    const auto span = static_cast<std::uint64_t>(coins_max - coins_min + 1);
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % span;
    std::uint64_t v;
    do v = rng();
    while (v >= limit);
    const int n = coins_min + static_cast<int>(v % span);
    out.push_back(gen_random_quarter_circle(seed, n, layout));
  }
  return out;
}

ScenarioSpec build_two_rooms() { return build_two_rooms_from_map(canonical_two_rooms_map()); }

ScenarioSpec build_two_rooms_from_map(std::string_view map_rows) {
  auto parsed = detail::parse_map(detail::split_lines(map_rows), 1);
  ScenarioSpec spec;
  spec.name = "two_rooms";
  spec.map = std::move(parsed.grid);
  spec.agent_spawns = std::move(parsed.agents);
  spec.targets = std::move(parsed.targets);
  spec.step_budget = default_budget(spec.name);
  spec.auxiliary_target = Position{1, 1};
  validate_scenario(spec);
  return spec;
}

Position door_cell(const ScenarioSpec& spec) {
  if (spec.num_agents() < 2) throw ValidationError("door lookup needs two agents");
  const auto doors = separating_cells(spec.map, spec.agent_spawns[0], spec.agent_spawns[1]);
  if (doors.size() != 1) throw ValidationError("expected exactly one door cell, found " + std::to_string(doors.size()));
  return doors.front();
}

// ---------------------------------------------------------------------------

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

ScenarioSpec parse_scenario(std::string_view text) {
  const auto lines = detail::split_lines(text);
  ScenarioSpec spec;
  std::optional<int> budget;
  bool have_name = false;

  std::size_t i = 0;
  for (; i < lines.size(); ++i) {
    const auto& line = lines[i];
    const int line_no = static_cast<int>(i) + 1;
    if (line.empty()) break;
    const auto colon = line.find(':');
    if (colon == std::string::npos) throw ParseError(line_no, 0, "expected 'key: value' header");
    const std::string key = trim(std::string_view(line).substr(0, colon));
    const std::string value = trim(std::string_view(line).substr(colon + 1));
    try {
      if (key == "name") {
        if (value.empty()) throw ValidationError("name must not be empty");
        spec.name = value;
        have_name = true;
      } else if (key == "budget") {
        std::size_t used = 0;
        const int b = std::stoi(value, &used);
        if (used != value.size()) throw ValidationError("budget must be an integer");
        budget = b;
      } else if (key == "reward_mode") {
        spec.reward_mode = reward_mode_from_string(value);
      } else if (key == "observation_mode") {
        spec.observation_mode = observation_mode_from_string(value);
      } else if (key == "aux") {
        if (!value.empty()) {
          const auto comma = value.find(',');
          if (comma == std::string::npos) throw ValidationError("aux must be 'x,y'");
          std::size_t ux = 0, uy = 0;
          const std::string xs = trim(std::string_view(value).substr(0, comma));
          const std::string ys = trim(std::string_view(value).substr(comma + 1));
          const int x = std::stoi(xs, &ux);
          const int y = std::stoi(ys, &uy);
          if (ux != xs.size() || uy != ys.size()) throw ValidationError("aux must be 'x,y'");
          spec.auxiliary_target = Position{x, y};
        }
      } else {
        throw ValidationError("unknown header '" + key + "'");
      }
    } catch (const ParseError&) {
      throw;
    } catch (const std::invalid_argument&) {
      throw ParseError(line_no, static_cast<int>(colon) + 2, "malformed number in '" + key + "'");
    } catch (const std::out_of_range&) {
      throw ParseError(line_no, static_cast<int>(colon) + 2, "number out of range in '" + key + "'");
    } catch (const ValidationError& e) {
      throw ParseError(line_no, 0, e.what());
    }
  }
  if (!have_name) throw ParseError(1, 0, "missing 'name:' header");
  if (i >= lines.size()) throw ParseError(static_cast<int>(lines.size()) + 1, 0, "missing map after blank line");

  std::vector<std::string> rows(lines.begin() + static_cast<std::ptrdiff_t>(i) + 1, lines.end());
  while (!rows.empty() && rows.back().empty()) rows.pop_back();
  auto parsed = detail::parse_map(rows, static_cast<int>(i) + 2);
  spec.map = std::move(parsed.grid);
  spec.agent_spawns = std::move(parsed.agents);
  spec.targets = std::move(parsed.targets);
  spec.step_budget = budget.value_or(default_budget(spec.name));
  try {
    validate_scenario(spec);
  } catch (const ParseError&) {
    throw;
  } catch (const ValidationError& e) {
    throw ParseError(static_cast<int>(i) + 2, 0, e.what());
  }
  return spec;
}

std::string serialize_scenario(const ScenarioSpec& spec) {
  std::ostringstream os;
  os << "name: " << spec.name << '\n';
  os << "budget: " << spec.step_budget << '\n';
  os << "reward_mode: " << to_string(spec.reward_mode) << '\n';
  os << "observation_mode: " << to_string(spec.observation_mode) << '\n';
  if (spec.auxiliary_target) os << "aux: " << spec.auxiliary_target->x << ',' << spec.auxiliary_target->y << '\n';
  os << '\n';
  GridState view;
  view.grid = std::make_shared<const Grid>(spec.map);
  view.agents = spec.agent_spawns;
  view.targets = spec.targets;
  os << render_ascii(view) << '\n';
  return os.str();
}

ScenarioSpec load_scenario_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open scenario file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

void save_scenario_file(const ScenarioSpec& spec, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write scenario file '" + path + "'");
  out << serialize_scenario(spec);
  if (!out) throw IoError("write failed for '" + path + "'");
}

ScenarioSpec resolve_scenario(const std::string& id) {
  if (id == "coin_quadrant") return build_coin_quadrant(5);
  if (id == "two_rooms") return build_two_rooms();
  return load_scenario_file(id);
}

ScenarioSpec solo_scenario(const ScenarioSpec& spec, int agent) {
  if (agent < 0 || agent >= spec.num_agents()) throw ContractError("solo_scenario: agent index out of range");
  ScenarioSpec solo = spec;
  solo.agent_spawns = {spec.agent_spawns[static_cast<std::size_t>(agent)]};
  solo.targets.clear();
  for (const Target& t : spec.targets) {
    if (!t.collectible_by(agent)) continue;
    solo.targets.push_back({t.pos, t.owner ? std::optional<int>(0) : std::nullopt});
  }
  solo.name = spec.name.starts_with("two_rooms") ? "solo_" + spec.name : spec.name;
  return solo;
}

}  // namespace gridsafe
