#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "gridsafe/emergence.hpp"
#include "gridsafe/rl.hpp"
#include "gridsafe/rollout.hpp"
#include "gridsafe/scenario_spec.hpp"

namespace gridsafe {

/// One emergence evaluation: a scenario and the agents that play it.
struct BatchJob {
  ScenarioSpec scenario;
  ControllerFactory agents;
};

/// Evaluates every job; results are in job order. Jobs run concurrently on
/// OpenMP threads; the first failure is rethrown after the loop.
std::vector<EmergenceReport> evaluate_batch(std::span<const BatchJob> jobs, DetectorWindows windows = {});

/// Single-threaded reference for evaluate_batch.
std::vector<EmergenceReport> evaluate_batch_serial(std::span<const BatchJob> jobs, DetectorWindows windows = {});

/// Trains one team per seed (cfg.seed is replaced by each seed), in seed order.
std::vector<std::vector<TrainedAgent>> train_seeds(const ScenarioSpec& scenario, const TrainConfig& cfg,
                                                   std::span<const std::uint64_t> seeds);

/// Single-threaded reference for train_seeds.
std::vector<std::vector<TrainedAgent>> train_seeds_serial(const ScenarioSpec& scenario, const TrainConfig& cfg,
                                                          std::span<const std::uint64_t> seeds);

/// Number of OpenMP threads a parallel region would use.
int parallel_threads();

}  // namespace gridsafe
