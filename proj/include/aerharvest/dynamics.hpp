#pragma once

#include <vector>

#include "aerharvest/world.hpp"

namespace aerharvest {

enum class Action : int {
  kHover = 0,
  kEast = 1,
  kNorth = 2,
  kWest = 3,
  kSouth = 4,
  kLand = 5,
};

constexpr int kNumActions = 6;

inline int action_dx(Action a) {
  switch (a) {
    case Action::kEast:
      return 1;
    case Action::kWest:
      return -1;
    default:
      return 0;
  }
}

inline int action_dy(Action a) {
  switch (a) {
    case Action::kNorth:
      return 1;
    case Action::kSouth:
      return -1;
    default:
      return 0;
  }
}

const char* action_name(Action a);

struct UavState {
  Cell position;
  bool airborne = true;        // altitude h while true, ground level once landed
  bool operational = true;     // phi
  int flying_time = 0;         // b, remaining mission steps
  bool crashed = false;
  Cell start_position;

  bool landed() const { return !airborne && !crashed; }
};

// Feasible action set: the full space on a landing cell, otherwise everything
// but land. Empty for a non-operational agent.
std::vector<Action> feasible_actions(const UavState& state, const CityMap& map);

struct SafeAction {
  Action action = Action::kHover;
  bool rejected = false;
};

// Safety controller: replaces the requested action with hover when it would
// enter Z, leave the grid, collide with an operational agent's position, or
// land outside the landing zone. Agents resolve in ascending index order, so
// for j < i `joint_states[j]` already holds the post-move position.
SafeAction safe_action(const std::vector<UavState>& joint_states, int agent, Action a,
                       const CityMap& map);

struct StepOutcome {
  bool crashed_now = false;
  bool landed_now = false;
};

// Advances one agent by an already-filtered action: motion, battery decrement,
// landing, and the crash rule (battery exhausted while airborne).
StepOutcome step_agent(UavState& state, Action safe_a, const CityMap& map);

struct ConstraintViolation {
  enum Kind { kCollision, kForbiddenCell } kind;
  int agent_a = -1;
  int agent_b = -1;  // collision only
};

// Test oracle over the mobility constraints; the safety controller keeps the
// reachable set clean, so this reports nothing on any legal trajectory.
std::vector<ConstraintViolation> check_constraints(const std::vector<UavState>& joint_states,
                                                   const CityMap& map);

}  // namespace aerharvest
