#pragma once

// Shared-workspace gridworld: a greedy proxy human walks toward a hidden goal
// while an assistant relocates heavy blocks the human cannot push.
//
// Coordinates are (row, col) with row 0 at the top; "up" decreases the row.
// One environment turn is: one agent action, then one human step.

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "ave/env.hpp"

namespace ave::grid {

struct Cell {
  int row = 0;
  int col = 0;
  friend auto operator<=>(const Cell&, const Cell&) = default;
};

enum class Direction : std::uint8_t { up, down, left, right };

/// Fixed tie-break / enumeration order.
inline constexpr std::array<Direction, 4> kDirections{Direction::up, Direction::down, Direction::left,
                                                      Direction::right};

Cell neighbor(Cell c, Direction d);
int manhattan(Cell a, Cell b);
std::string_view to_string(Direction d);

struct GridScenario {
  int width = 6;
  int height = 6;
  Cell human;
  std::vector<Cell> blocks;  // kept sorted row-major
  Cell goal;
  int timeout = 1000;

  bool in_bounds(Cell c) const { return c.row >= 0 && c.row < height && c.col >= 0 && c.col < width; }
  bool is_block(Cell c) const;
  /// In bounds and not occupied by the human or a block.
  bool is_free(Cell c) const { return in_bounds(c) && !is_block(c) && c != human; }
  /// Throws ConfigError when the invariants do not hold.
  void validate() const;

  friend bool operator==(const GridScenario&, const GridScenario&) = default;
};

struct AgentAction {
  enum class Kind : std::uint8_t { noop, move_block };
  Kind kind = Kind::noop;
  Cell block;
  Direction direction = Direction::up;

  static AgentAction noop() { return {}; }
  static AgentAction move(Cell block, Direction d) { return {Kind::move_block, block, d}; }
  Cell destination() const { return neighbor(block, direction); }

  friend bool operator==(const AgentAction&, const AgentAction&) = default;
};

std::string describe(const AgentAction& a);

/// Greedy proxy human: first free 4-neighbour (up, down, left, right) that
/// strictly decreases Manhattan distance to the goal; otherwise stays.
/// A human already on the goal stays put.
GridScenario human_step(const GridScenario& s);

/// Throws IllegalActionError for a move whose block does not exist or whose
/// destination is out of bounds / occupied.
GridScenario apply_agent_action(const GridScenario& s, const AgentAction& a);

/// noop first, then (block row-major, direction up/down/left/right).
std::vector<AgentAction> legal_agent_actions(const GridScenario& s);

/// BFS through non-block cells. nullopt when unreachable.
std::optional<int> shortest_path_distance(const GridScenario& s, Cell from, Cell to);

/// BFS distance from `from` to every cell (row-major), -1 for unreachable.
std::vector<int> distance_field(const GridScenario& s, Cell from);

/// One environment turn: agent action then human step.
GridScenario turn(const GridScenario& s, const AgentAction& a);

bool reached_goal(const GridScenario& s);

// Structured-text scenario layout (schema "ave.gridworld/1"):
//   {"schema": "ave.gridworld/1", "width": 6, "height": 6, "timeout": 1000,
//    "human": [r, c], "goal": [r, c], "blocks": [[r, c], ...]}
nlohmann::json to_json(const GridScenario& s);
GridScenario scenario_from_json(const nlohmann::json& j);

/// ASCII picture: H human, G goal, # block, * block on goal, . free.
std::string render(const GridScenario& s);

// Canonical initialisations used by the study.
GridScenario corner_trap(int width, int height, int corner, Cell goal);
GridScenario center_trap(int width, int height, Cell goal);
Cell center_cell(int width, int height);

struct ProbeState {
  std::string label;
  GridScenario layout;
};

/// Twelve 6x6 layouts for ranking empowerment estimators: free corners,
/// edges and centre cells, fully trapped humans and partially walled ones.
std::vector<ProbeState> canonical_probe_states();

/// Human-move probing environment used for human empowerment. The block
/// layout is frozen (agent idle); the state is the human's cell.
/// Actions: 0 stay, 1 up, 2 down, 3 left, 4 right; a blocked move stays.
/// Random probing samples uniformly over stay + free neighbours.
class HumanProbeEnv {
 public:
  using State = Cell;
  static constexpr int kActions = 5;

  explicit HumanProbeEnv(const GridScenario& layout);

  int action_count() const { return kActions; }
  StepOutcome<State> step(const State& s, ActionId a) const;
  bool is_terminal(const State&) const { return false; }
  ActionId sample_action(const State& s, SeededRng& rng) const;
  /// human_cell / full -> [row, col].
  std::vector<double> features(const State& s, FeatureSelector f) const;
  /// Layout v1: u8 version=1, i32 row, i32 col, u32 block count, blocks (i32 row, i32 col)...
  /// The joint (human, blocks) state, blocks being constant under probing.
  Bytes serialize(const State& s) const;

  bool open(Cell c) const { return layout_.in_bounds(c) && !layout_.is_block(c); }

 private:
  GridScenario layout_;
};

static_assert(Environment<HumanProbeEnv>);

}  // namespace ave::grid
