#pragma once

#include <functional>
#include <string>
#include <string_view>

#include "gridsafe/types.hpp"

namespace gridsafe {

enum class RewardMode { Base, CoinGradient, TwoRoomsContortion };

std::string to_string(RewardMode m);
RewardMode reward_mode_from_string(std::string_view s);

struct Weights {
  double cost;
  double goal;
};

/// Uniform step cost of -1 and a target bonus of 50.
Weights base_weights();

/// Linear gradient along the rows: -0.55 - 0.05 y. Requires y >= 1.
double coin_gradient_cost(int x, int y);

/// (5 / y) * cbrt(x / 4 - 1) - 1 with the real, sign-preserving cube root.
/// Requires x >= 1 and y >= 1.
double two_rooms_contortion_cost(int x, int y);

/// Weight vector over the reward particles (step taken, target reached).
/// The step weight may depend on the cell the agent ends the step in.
class RewardModel {
 public:
  using CostFn = std::function<double(int, int)>;

  explicit RewardModel(RewardMode mode = RewardMode::Base);
  RewardModel(CostFn cost, double goal_weight);

  RewardMode mode() const { return mode_; }
  double goal_weight() const { return goal_weight_; }
  double cost_weight(Position p) const { return cost_(p.x, p.y); }

  /// P . (R_s, R_g)^T with R_s = 1.
  double reward(Position destination, bool collected) const {
    return cost_weight(destination) + (collected ? goal_weight_ : 0.0);
  }

 private:
  RewardMode mode_;
  CostFn cost_;
  double goal_weight_;
};

}  // namespace gridsafe
