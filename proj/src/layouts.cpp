#include "gridsafe/scenarios.hpp"

namespace gridsafe {

const CoinQuadrantLayout& canonical_coin_layout() {
  // Found by tools/layout_search (mode coin): agent 1 is 8 steps from both arc
  // ends, agent 2 is 4 steps from the lower-right end and its greedy route
  // over the five coins is 20 steps long.
  static const CoinQuadrantLayout layout{12, 12, {1, 9}, 8, {2, 8}, {11, 7}, {0, 3, 6, 8, 12}};
  return layout;
}

std::string_view canonical_two_rooms_map() {
  // Found by tools/layout_search (mode rooms): the door (4,7) is 8 steps from
  // both spawns, agent 1 is equally far from its flag and from (1,1), and
  // greedy play under base costs deadlocks at the door.
  static constexpr std::string_view map =
      ".1#........\n"
      "..#........\n"
      "..#........\n"
      "..#........\n"
      "..#.a......\n"
      "..#........\n"
      "...........\n"
      "...b#.....2";
  return map;
}

}  // namespace gridsafe
