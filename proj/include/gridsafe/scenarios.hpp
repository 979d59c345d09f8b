#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "gridsafe/scenario_spec.hpp"

namespace gridsafe {

// ---------------------------------------------------------------------------
// Grid utilities shared by validation, layout checks and tests.

/// BFS hop counts from `source` over field cells; -1 marks unreachable cells.
/// Indexed by Grid::index.
std::vector<int> bfs_distances(const Grid& grid, Position source);

/// Hop count between two cells, -1 if unreachable.
int bfs_distance(const Grid& grid, Position from, Position to);

/// Field cells (other than a and b) whose removal disconnects a from b.
std::vector<Position> separating_cells(const Grid& grid, Position a, Position b);

// ---------------------------------------------------------------------------
// Validation

/// Throws ValidationError naming the first violated constraint.
void validate_scenario(const ScenarioSpec& spec);

/// Default step budget for a scenario name when the file omits it.
int default_budget(std::string_view name);

// ---------------------------------------------------------------------------
// Coin quadrant

/// Geometry of the open coin room. Coins sit on a quarter-circle arc around
/// `arc_center`, spanning from the upper-left end (arc_center.x, arc_center.y - radius)
/// to the lower-right end (arc_center.x + radius, arc_center.y).
struct CoinQuadrantLayout {
  int width;
  int height;
  Position arc_center;
  int radius;
  Position agent1;
  Position agent2;
  // Arc indices of the five coins of the canonical layout; empty means the
  // five coins are evenly spaced like every other count.
  std::vector<std::size_t> five_coin_arc_indices = {};
};

const CoinQuadrantLayout& canonical_coin_layout();

/// Cells with round(euclidean distance to the centre) == radius in the
/// upper-right quadrant, ordered from the upper-left end to the lower-right end.
std::vector<Position> quarter_circle_arc(const CoinQuadrantLayout& layout);

/// Evenly spaced coins on the arc, always including both ends (five coins
/// use the layout's frozen placement when it has one).
ScenarioSpec build_coin_quadrant(int n_coins);
ScenarioSpec build_coin_quadrant(int n_coins, const CoinQuadrantLayout& layout);

/// Seeded random coin subset of the canonical arc.
ScenarioSpec gen_random_quarter_circle(std::uint64_t seed, int n_coins);
ScenarioSpec gen_random_quarter_circle(std::uint64_t seed, int n_coins, const CoinQuadrantLayout& layout);

/// Randomized evaluation population: setting k draws its coin count in
/// [coins_min, coins_max] and its coin cells from seed base_seed + k.
std::vector<ScenarioSpec> coin_sweep_settings(int n_settings, int coins_min, int coins_max, std::uint64_t base_seed);
std::vector<ScenarioSpec> coin_sweep_settings(int n_settings, int coins_min, int coins_max, std::uint64_t base_seed,
                                              const CoinQuadrantLayout& layout);

// ---------------------------------------------------------------------------
// Two rooms

/// Canonical two-rooms map text (rows only).
std::string_view canonical_two_rooms_map();

ScenarioSpec build_two_rooms();
ScenarioSpec build_two_rooms_from_map(std::string_view map_rows);

/// The unique cell separating the two spawns; throws if there is none or several.
Position door_cell(const ScenarioSpec& spec);

// ---------------------------------------------------------------------------
// Text format

ScenarioSpec parse_scenario(std::string_view text);
std::string serialize_scenario(const ScenarioSpec& spec);

ScenarioSpec load_scenario_file(const std::string& path);
void save_scenario_file(const ScenarioSpec& spec, const std::string& path);

/// "coin_quadrant", "two_rooms" or a path to a scenario file.
ScenarioSpec resolve_scenario(const std::string& id);

/// Copy of `spec` containing only agent `agent` (renumbered to 0) and the
/// targets it may collect.
ScenarioSpec solo_scenario(const ScenarioSpec& spec, int agent);

}  // namespace gridsafe
