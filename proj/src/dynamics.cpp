#include "aerharvest/dynamics.hpp"

namespace aerharvest {

const char* action_name(Action a) {
  switch (a) {
    case Action::kHover:
      return "hover";
    case Action::kEast:
      return "east";
    case Action::kNorth:
      return "north";
    case Action::kWest:
      return "west";
    case Action::kSouth:
      return "south";
    case Action::kLand:
      return "land";
  }
  return "?";
}

std::vector<Action> feasible_actions(const UavState& state, const CityMap& map) {
  if (!state.operational) return {};
  std::vector<Action> actions = {Action::kHover, Action::kEast, Action::kNorth, Action::kWest,
                                 Action::kSouth};
  if (map.is_landing(state.position.x, state.position.y)) actions.push_back(Action::kLand);
  return actions;
}

SafeAction safe_action(const std::vector<UavState>& joint_states, int agent, Action a,
                       const CityMap& map) {
  const UavState& self = joint_states[static_cast<std::size_t>(agent)];
  const Cell target{self.position.x + action_dx(a), self.position.y + action_dy(a)};

  if (a == Action::kLand && !map.is_landing(self.position.x, self.position.y)) {
    return {Action::kHover, true};
  }
  // The world border behaves like Z.
  if (!map.in_bounds(target.x, target.y) || map.is_nfz_or_tall(target.x, target.y)) {
    return {Action::kHover, true};
  }
  for (std::size_t j = 0; j < joint_states.size(); ++j) {
    if (static_cast<int>(j) == agent) continue;
    const UavState& other = joint_states[j];
    if (other.operational && other.position == target) return {Action::kHover, true};
  }
  return {a, false};
}

StepOutcome step_agent(UavState& state, Action safe_a, const CityMap& map) {
  (void)map;
  StepOutcome out;
  if (!state.operational) return out;  // frozen

  if (safe_a == Action::kLand) {
    state.airborne = false;
    state.operational = false;
    out.landed_now = true;
  } else {
    state.position.x += action_dx(safe_a);
    state.position.y += action_dy(safe_a);
  }

  state.flying_time -= 1;
  if (state.flying_time <= 0 && state.airborne) {
    state.crashed = true;
    state.operational = false;
    out.crashed_now = true;
  }
  return out;
}

std::vector<ConstraintViolation> check_constraints(const std::vector<UavState>& joint_states,
                                                   const CityMap& map) {
  std::vector<ConstraintViolation> v;
  const int n = static_cast<int>(joint_states.size());
  for (int i = 0; i < n; ++i) {
    const UavState& si = joint_states[static_cast<std::size_t>(i)];
    if (!si.operational) continue;
    if (map.is_nfz_or_tall(si.position.x, si.position.y)) {
      v.push_back({ConstraintViolation::kForbiddenCell, i, -1});
    }
    for (int j = i + 1; j < n; ++j) {
      const UavState& sj = joint_states[static_cast<std::size_t>(j)];
      if (sj.operational && si.position == sj.position) {
        v.push_back({ConstraintViolation::kCollision, i, j});
      }
    }
  }
  return v;
}

}  // namespace aerharvest
