#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace gridsafe {

/// Cell coordinate, 1-based. x is the column from the left, y the row from the top.
struct Position {
  int x = 1;
  int y = 1;

  auto operator<=>(const Position&) const = default;
};

inline int manhattan(Position a, Position b) {
  return (a.x > b.x ? a.x - b.x : b.x - a.x) + (a.y > b.y ? a.y - b.y : b.y - a.y);
}

std::string to_string(Position p);

enum class CellKind : std::uint8_t { Field, Wall };

enum class Action : std::uint8_t { Up = 0, Right = 1, Down = 2, Left = 3 };

inline constexpr std::array<Action, 4> kActions{Action::Up, Action::Right, Action::Down, Action::Left};

inline Position moved(Position p, Action a) {
  switch (a) {
    case Action::Up: return {p.x, p.y - 1};
    case Action::Right: return {p.x + 1, p.y};
    case Action::Down: return {p.x, p.y + 1};
    case Action::Left: return {p.x - 1, p.y};
  }
  return p;
}

char action_symbol(Action a);
Action action_from_symbol(char c);

/// Direction of a unit step between 4-neighbours; throws if the cells are not adjacent.
Action direction_between(Position from, Position to);

using JointAction = std::vector<Action>;

// Errors. Validation problems surface as ValidationError, numeric domain
// violations as DomainError, misuse of the engine as ContractError.
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};
struct ContractError : std::logic_error {
  using std::logic_error::logic_error;
};
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed text input. Line and column are 1-based; column 0 means the whole line.
struct ParseError : ValidationError {
  ParseError(int line, int column, const std::string& what);
  int line;
  int column;
};

/// Immutable cell map shared between all states of an episode.
class Grid {
 public:
  Grid() = default;
  Grid(int width, int height, std::vector<CellKind> cells);

  int width() const { return width_; }
  int height() const { return height_; }

  bool in_bounds(Position p) const { return p.x >= 1 && p.y >= 1 && p.x <= width_ && p.y <= height_; }
  CellKind at(Position p) const { return cells_[index(p)]; }
  bool is_field(Position p) const { return in_bounds(p) && at(p) == CellKind::Field; }

  std::size_t index(Position p) const {
    return static_cast<std::size_t>(p.y - 1) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(p.x - 1);
  }
  Position position(std::size_t idx) const {
    return {static_cast<int>(idx % static_cast<std::size_t>(width_)) + 1,
            static_cast<int>(idx / static_cast<std::size_t>(width_)) + 1};
  }
  std::size_t size() const { return cells_.size(); }

  Grid with_wall(Position p) const;

  bool operator==(const Grid&) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<CellKind> cells_;
};

/// A collectible target. Shared targets (no owner) go to whoever enters first.
struct Target {
  Position pos;
  std::optional<int> owner;  // 0-based agent index

  bool collectible_by(int agent) const { return !owner || *owner == agent; }
  bool operator==(const Target&) const = default;
};

struct GridState {
  std::shared_ptr<const Grid> grid;
  std::vector<Position> agents;
  std::vector<Target> targets;
  std::vector<std::vector<Position>> collected;
  int step = 0;
  int budget = 0;

  int num_agents() const { return static_cast<int>(agents.size()); }
  const Grid& map() const { return *grid; }
  std::optional<int> agent_at(Position p) const;
  bool has_target_at(Position p) const;
  std::size_t collected_count(int agent) const { return collected[static_cast<std::size_t>(agent)].size(); }
};

enum class Event : std::uint8_t {
  Moved = 1,
  BlockedByWall = 2,
  BlockedByAgent = 4,
  CollectedTarget = 8,
};

/// Small bitset over Event.
class EventSet {
 public:
  void add(Event e) { bits_ |= static_cast<std::uint8_t>(e); }
  bool has(Event e) const { return (bits_ & static_cast<std::uint8_t>(e)) != 0; }
  std::uint8_t bits() const { return bits_; }
  bool operator==(const EventSet&) const = default;

 private:
  std::uint8_t bits_ = 0;
};

struct StepOutcome {
  GridState next;
  std::vector<double> rewards;
  std::vector<EventSet> events;
};

enum class Terminal { NotTerminal, AllTargetsCollected, StepBudgetExhausted };

std::string to_string(Terminal t);

struct TraceStep {
  GridState state;  // state before the joint action
  JointAction actions;
  std::vector<double> rewards;
  std::vector<EventSet> events;
};

struct EpisodeTrace {
  std::vector<TraceStep> steps;
  GridState final_state;
  Terminal terminal = Terminal::NotTerminal;

  int length() const { return static_cast<int>(steps.size()); }
};

}  // namespace gridsafe
