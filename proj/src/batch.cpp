#include "gridsafe/batch.hpp"

#include <exception>

#include <omp.h>

namespace gridsafe {

namespace {

/// Runs body(i) for i in [0, n) on OpenMP threads and rethrows the failure
/// with the lowest index, so errors are as deterministic as results.
template <typename Body>
void parallel_for(std::size_t n, Body&& body) {
  std::vector<std::exception_ptr> errors(n);
  const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace

std::vector<EmergenceReport> evaluate_batch(std::span<const BatchJob> jobs, DetectorWindows windows) {
  std::vector<EmergenceReport> out(jobs.size());
  parallel_for(jobs.size(), [&](std::size_t i) { out[i] = detect_emergence(jobs[i].scenario, jobs[i].agents, windows); });
  return out;
}

std::vector<EmergenceReport> evaluate_batch_serial(std::span<const BatchJob> jobs, DetectorWindows windows) {
  std::vector<EmergenceReport> out;
  out.reserve(jobs.size());
  for (const BatchJob& job : jobs) out.push_back(detect_emergence(job.scenario, job.agents, windows));
  return out;
}

std::vector<std::vector<TrainedAgent>> train_seeds(const ScenarioSpec& scenario, const TrainConfig& cfg,
                                                   std::span<const std::uint64_t> seeds) {
  std::vector<std::vector<TrainedAgent>> out(seeds.size());
  parallel_for(seeds.size(), [&](std::size_t i) {
    TrainConfig c = cfg;
    c.seed = seeds[i];
    out[i] = train(scenario, c);
  });
  return out;
}

std::vector<std::vector<TrainedAgent>> train_seeds_serial(const ScenarioSpec& scenario, const TrainConfig& cfg,
                                                          std::span<const std::uint64_t> seeds) {
  std::vector<std::vector<TrainedAgent>> out;
  out.reserve(seeds.size());
  for (std::uint64_t seed : seeds) {
    TrainConfig c = cfg;
    c.seed = seed;
    out.push_back(train(scenario, c));
  }
  return out;
}

int parallel_threads() { return omp_get_max_threads(); }

}  // namespace gridsafe
