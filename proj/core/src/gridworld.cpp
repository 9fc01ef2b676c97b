#include "ave/gridworld.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace ave::grid {

Cell neighbor(Cell c, Direction d) {
  switch (d) {
    case Direction::up: return {c.row - 1, c.col};
    case Direction::down: return {c.row + 1, c.col};
    case Direction::left: return {c.row, c.col - 1};
    case Direction::right: return {c.row, c.col + 1};
  }
  return c;
}

int manhattan(Cell a, Cell b) { return std::abs(a.row - b.row) + std::abs(a.col - b.col); }

std::string_view to_string(Direction d) {
  switch (d) {
    case Direction::up: return "up";
    case Direction::down: return "down";
    case Direction::left: return "left";
    case Direction::right: return "right";
  }
  return "?";
}

bool GridScenario::is_block(Cell c) const { return std::binary_search(blocks.begin(), blocks.end(), c); }

void GridScenario::validate() const {
  if (width <= 0 || height <= 0) throw ConfigError("grid dimensions must be positive");
  if (timeout <= 0) throw ConfigError("timeout must be positive");
  if (!in_bounds(human)) throw ConfigError("human out of bounds");
  if (!in_bounds(goal)) throw ConfigError("goal out of bounds");
  if (human == goal) throw ConfigError("human starts on the goal");
  if (!std::is_sorted(blocks.begin(), blocks.end())) throw ConfigError("blocks must be sorted");
  if (std::adjacent_find(blocks.begin(), blocks.end()) != blocks.end()) throw ConfigError("duplicate block");
  for (Cell b : blocks) {
    if (!in_bounds(b)) throw ConfigError("block out of bounds");
    if (b == human || b == goal) throw ConfigError("block overlaps human or goal");
  }
}

std::string describe(const AgentAction& a) {
  if (a.kind == AgentAction::Kind::noop) return "noop";
  std::ostringstream os;
  os << "move(" << a.block.row << "," << a.block.col << ")->" << to_string(a.direction);
  return os.str();
}

GridScenario human_step(const GridScenario& s) {
  GridScenario next = s;
  if (s.human == s.goal) return next;
  const int here = manhattan(s.human, s.goal);
  for (Direction d : kDirections) {
    Cell c = neighbor(s.human, d);
    if (s.in_bounds(c) && !s.is_block(c) && manhattan(c, s.goal) < here) {
      next.human = c;
      break;
    }
  }
  return next;
}

GridScenario apply_agent_action(const GridScenario& s, const AgentAction& a) {
  if (a.kind == AgentAction::Kind::noop) return s;
  if (!s.is_block(a.block)) throw IllegalActionError("no block at source cell for " + describe(a));
  const Cell dest = a.destination();
  if (!s.is_free(dest)) throw IllegalActionError("destination occupied or out of bounds for " + describe(a));
  GridScenario next = s;
  auto it = std::lower_bound(next.blocks.begin(), next.blocks.end(), a.block);
  next.blocks.erase(it);
  next.blocks.insert(std::lower_bound(next.blocks.begin(), next.blocks.end(), dest), dest);
  return next;
}

std::vector<AgentAction> legal_agent_actions(const GridScenario& s) {
  std::vector<AgentAction> out{AgentAction::noop()};
  for (Cell b : s.blocks)
    for (Direction d : kDirections)
      if (s.is_free(neighbor(b, d))) out.push_back(AgentAction::move(b, d));
  return out;
}

std::vector<int> distance_field(const GridScenario& s, Cell from) {
  std::vector<int> dist(static_cast<std::size_t>(s.width * s.height), -1);
  if (!s.in_bounds(from) || s.is_block(from)) return dist;
  auto idx = [&](Cell c) { return static_cast<std::size_t>(c.row * s.width + c.col); };
  std::deque<Cell> queue{from};
  dist[idx(from)] = 0;
  while (!queue.empty()) {
    Cell c = queue.front();
    queue.pop_front();
    for (Direction d : kDirections) {
      Cell n = neighbor(c, d);
      if (!s.in_bounds(n) || s.is_block(n) || dist[idx(n)] >= 0) continue;
      dist[idx(n)] = dist[idx(c)] + 1;
      queue.push_back(n);
    }
  }
  return dist;
}

std::optional<int> shortest_path_distance(const GridScenario& s, Cell from, Cell to) {
  if (from == to) return 0;
  if (!s.in_bounds(to)) return std::nullopt;
  const int d = distance_field(s, from)[static_cast<std::size_t>(to.row * s.width + to.col)];
  if (d < 0) return std::nullopt;
  return d;
}

GridScenario turn(const GridScenario& s, const AgentAction& a) { return human_step(apply_agent_action(s, a)); }

bool reached_goal(const GridScenario& s) { return s.human == s.goal; }

namespace {

nlohmann::json cell_json(Cell c) { return nlohmann::json::array({c.row, c.col}); }

Cell cell_from(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 2) throw ConfigError("cell must be [row, col]");
  return {j.at(0).get<int>(), j.at(1).get<int>()};
}

}  // namespace

nlohmann::json to_json(const GridScenario& s) {
  nlohmann::json blocks = nlohmann::json::array();
  for (Cell b : s.blocks) blocks.push_back(cell_json(b));
  return {{"schema", "ave.gridworld/1"}, {"width", s.width},        {"height", s.height},
          {"timeout", s.timeout},        {"human", cell_json(s.human)}, {"goal", cell_json(s.goal)},
          {"blocks", blocks}};
}

GridScenario scenario_from_json(const nlohmann::json& j) {
  if (j.value("schema", std::string{}) != "ave.gridworld/1") throw ConfigError("unsupported gridworld schema");
  GridScenario s;
  s.width = j.at("width").get<int>();
  s.height = j.at("height").get<int>();
  s.timeout = j.value("timeout", 1000);
  s.human = cell_from(j.at("human"));
  s.goal = cell_from(j.at("goal"));
  for (const auto& b : j.at("blocks")) s.blocks.push_back(cell_from(b));
  std::sort(s.blocks.begin(), s.blocks.end());
  s.validate();
  return s;
}

std::string render(const GridScenario& s) {
  std::string out;
  for (int r = 0; r < s.height; ++r) {
    for (int c = 0; c < s.width; ++c) {
      const Cell cell{r, c};
      char ch = '.';
      if (s.is_block(cell)) ch = cell == s.goal ? '*' : '#';
      else if (cell == s.human) ch = 'H';
      else if (cell == s.goal) ch = 'G';
      out.push_back(ch);
    }
    out.push_back('\n');
  }
  return out;
}

Cell center_cell(int width, int height) { return {height / 2, width / 2}; }

GridScenario corner_trap(int width, int height, int corner, Cell goal) {
  GridScenario s;
  s.width = width;
  s.height = height;
  const bool bottom = corner & 2;
  const bool right = corner & 1;
  s.human = {bottom ? height - 1 : 0, right ? width - 1 : 0};
  s.blocks = {neighbor(s.human, bottom ? Direction::up : Direction::down),
              neighbor(s.human, right ? Direction::left : Direction::right)};
  std::sort(s.blocks.begin(), s.blocks.end());
  s.goal = goal;
  return s;
}

GridScenario center_trap(int width, int height, Cell goal) {
  GridScenario s;
  s.width = width;
  s.height = height;
  s.human = center_cell(width, height);
  for (Direction d : kDirections) s.blocks.push_back(neighbor(s.human, d));
  std::sort(s.blocks.begin(), s.blocks.end());
  s.goal = goal;
  return s;
}

std::vector<ProbeState> canonical_probe_states() {
  const auto make = [](Cell human, std::vector<Cell> blocks) {
    GridScenario s;
    s.human = human;
    s.blocks = std::move(blocks);
    std::sort(s.blocks.begin(), s.blocks.end());
    s.goal = human == Cell{5, 0} ? Cell{0, 5} : Cell{5, 0};
    s.validate();
    return s;
  };
  const Cell c = center_cell(6, 6);
  std::vector<ProbeState> out = {
      {"free-corner-tl", make({0, 0}, {})},
      {"free-corner-br", make({5, 5}, {})},
      {"free-edge-top", make({0, 3}, {})},
      {"free-edge-left", make({3, 0}, {})},
      {"free-center", make(c, {})},
      {"free-inner", make({3, 3}, {})},
      {"trapped-corner", corner_trap(6, 6, 0, {5, 5})},
      {"trapped-center", center_trap(6, 6, {5, 5})},
      {"trapped-edge", make({0, 3}, {{0, 2}, {0, 4}, {1, 3}})},
      {"walled-corner", make({0, 0}, {{0, 1}})},
      {"walled-center-2", make(c, {neighbor(c, Direction::up), neighbor(c, Direction::left)})},
      {"walled-center-3",
       make(c, {neighbor(c, Direction::up), neighbor(c, Direction::left), neighbor(c, Direction::right)})},
  };
  return out;
}

HumanProbeEnv::HumanProbeEnv(const GridScenario& layout) : layout_(layout) {}

StepOutcome<HumanProbeEnv::State> HumanProbeEnv::step(const State& s, ActionId a) const {
  if (a.index < 0 || a.index >= kActions) throw ContractViolation("probe action out of range");
  State next = s;
  if (a.index > 0) {
    Cell c = neighbor(s, kDirections[static_cast<std::size_t>(a.index - 1)]);
    if (open(c)) next = c;
  }
  return {next, 0.0, false, OutcomeLabel::none};
}

ActionId HumanProbeEnv::sample_action(const State& s, SeededRng& rng) const {
  std::array<int, kActions> options{0};
  int n = 1;
  for (int i = 1; i < kActions; ++i)
    if (open(neighbor(s, kDirections[static_cast<std::size_t>(i - 1)]))) options[static_cast<std::size_t>(n++)] = i;
  return {options[static_cast<std::size_t>(rng.uniform_int(n))]};
}

std::vector<double> HumanProbeEnv::features(const State& s, FeatureSelector f) const {
  if (f != FeatureSelector::human_cell && f != FeatureSelector::full)
    throw ConfigError("feature selector '" + std::string(to_string(f)) + "' is not defined for the gridworld");
  return {static_cast<double>(s.row), static_cast<double>(s.col)};
}

Bytes HumanProbeEnv::serialize(const State& s) const {
  ByteWriter w;
  w.u8(1);
  w.i32(s.row);
  w.i32(s.col);
  w.u32(static_cast<std::uint32_t>(layout_.blocks.size()));
  for (Cell b : layout_.blocks) {
    w.i32(b.row);
    w.i32(b.col);
  }
  return std::move(w).bytes();
}

}  // namespace ave::grid
