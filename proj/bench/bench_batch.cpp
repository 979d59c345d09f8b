// Serial vs OpenMP timings for the batch kernels. Each pair is also checked
// for identical results, since the parallel paths must not change outcomes.
//
// usage: gridsafe_bench [repeats]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "gridsafe/batch.hpp"
#include "gridsafe/harness.hpp"
#include "gridsafe/planner.hpp"
#include "gridsafe/scenarios.hpp"

using namespace gridsafe;

namespace {

template <typename F>
double best_ms(int repeats, F&& f) {
  double best = 1e300;
  for (int r = 0; r < repeats; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    const auto t1 = std::chrono::steady_clock::now();
    best = std::min(best, std::chrono::duration<double, std::milli>(t1 - t0).count());
  }
  return best;
}

void report(const char* name, double serial, double parallel, bool same) {
  std::printf("%-22s serial %9.2f ms   parallel %9.2f ms   speedup %5.2fx   %s\n", name, serial, parallel,
              parallel > 0 ? serial / parallel : 0.0, same ? "identical" : "MISMATCH");
}

std::vector<BatchJob> sweep_jobs() {
  std::vector<BatchJob> jobs;
  for (const ScenarioSpec& s : coin_sweep_settings(20, 2, 12, 0)) {
    for (bool remediated : {false, true}) {
      const ScenarioSpec c = configure_scenario(s, AgentType::Tsp, remediated);
      jobs.push_back({c, tsp_team(c, remediated, 0)});
    }
  }
  return jobs;
}

bool same_reports(const std::vector<EmergenceReport>& a, const std::vector<EmergenceReport>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].emergent != b[i].emergent || a[i].joint_trace.length() != b[i].joint_trace.length() ||
        a[i].joint_trace.final_state.agents != b[i].joint_trace.final_state.agents)
      return false;
  }
  return true;
}

bool same_teams(const std::vector<std::vector<TrainedAgent>>& a, const std::vector<std::vector<TrainedAgent>>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].size() != b[i].size()) return false;
    for (std::size_t k = 0; k < a[i].size(); ++k)
      if (a[i][k].policy.flatten() != b[i][k].policy.flatten()) return false;
  }
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  const int repeats = argc > 1 ? std::max(1, std::atoi(argv[1])) : 3;
  std::printf("OpenMP threads: %d, best of %d\n", parallel_threads(), repeats);

  const auto jobs = sweep_jobs();
  std::vector<EmergenceReport> serial;
  std::vector<EmergenceReport> parallel;
  const double es = best_ms(repeats, [&] { serial = evaluate_batch_serial(jobs); });
  const double ep = best_ms(repeats, [&] { parallel = evaluate_batch(jobs); });
  report("evaluate_batch", es, ep, same_reports(serial, parallel));

  const ScenarioSpec rooms = build_two_rooms();
  TrainConfig cfg;
  cfg.episodes = 200;
  const std::vector<std::uint64_t> seeds{0, 1, 2, 3};
  std::vector<std::vector<TrainedAgent>> ts;
  std::vector<std::vector<TrainedAgent>> tp;
  const double tss = best_ms(1, [&] { ts = train_seeds_serial(rooms, cfg, seeds); });
  const double tsp = best_ms(1, [&] { tp = train_seeds(rooms, cfg, seeds); });
  report("train_seeds", tss, tsp, same_teams(ts, tp));

  const ScenarioSpec coins = configure_scenario(build_coin_quadrant(12), AgentType::Tsp, true);
  const RewardModel rewards(coins.reward_mode);
  std::vector<Position> targets;
  for (const Target& t : coins.targets) targets.push_back(t.pos);
  CostGraph gs;
  CostGraph gp;
  const double gss = best_ms(repeats * 10, [&] { gs = build_cost_graph(coins.map, rewards, coins.agent_spawns[0], targets); });
  const double gsp =
      best_ms(repeats * 10, [&] { gp = build_cost_graph_parallel(coins.map, rewards, coins.agent_spawns[0], targets); });
  report("build_cost_graph", gss, gsp, gs.costs == gp.costs && gs.paths == gp.paths);
  return 0;
}
