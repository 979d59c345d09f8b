#include "gridsafe/parameterization.hpp"

#include <cmath>

namespace gridsafe {

std::string to_string(RewardMode m) {
  switch (m) {
    case RewardMode::Base: return "base";
    case RewardMode::CoinGradient: return "coin_gradient";
    case RewardMode::TwoRoomsContortion: return "two_rooms_contortion";
  }
  return "base";
}

RewardMode reward_mode_from_string(std::string_view s) {
  if (s == "base") return RewardMode::Base;
  if (s == "coin_gradient") return RewardMode::CoinGradient;
  if (s == "two_rooms_contortion") return RewardMode::TwoRoomsContortion;
  throw ValidationError("unknown reward_mode '" + std::string(s) + "'");
}

Weights base_weights() { return {-1.0, 50.0}; }

double coin_gradient_cost(int /*x*/, int y) {
  if (y < 1) throw DomainError("coin_gradient_cost: y must be >= 1");
  return -0.55 - 0.05 * static_cast<double>(y);
}

double two_rooms_contortion_cost(int x, int y) {
  if (y < 1) throw DomainError("two_rooms_contortion_cost: y must be >= 1");
  if (x < 1) throw DomainError("two_rooms_contortion_cost: x must be >= 1");
  // std::cbrt is defined for negative arguments and keeps the sign.
  return (5.0 / static_cast<double>(y)) * std::cbrt(static_cast<double>(x) / 4.0 - 1.0) - 1.0;
}

RewardModel::RewardModel(RewardMode mode) : mode_(mode), goal_weight_(base_weights().goal) {
  switch (mode) {
    case RewardMode::Base: cost_ = [](int, int) { return base_weights().cost; }; break;
    case RewardMode::CoinGradient: cost_ = coin_gradient_cost; break;
    case RewardMode::TwoRoomsContortion: cost_ = two_rooms_contortion_cost; break;
  }
}

RewardModel::RewardModel(CostFn cost, double goal_weight)
    : mode_(RewardMode::Base), cost_(std::move(cost)), goal_weight_(goal_weight) {}

}  // namespace gridsafe
