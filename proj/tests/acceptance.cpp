// Acceptance checks: one PASS/FAIL line per criterion. Tolerances are pinned
// below. Exit status is 0 when the set of failing criteria equals the set
// declared with --known-failures (empty by default), 1 otherwise.
//
// usage: gridsafe_acceptance [--agents DIR] [--episodes N] [--known-failures N,...]
//   --agents DIR          reuse teams written by `gridsafe train` (agents_seed<S>.txt)
//                         instead of training the RL agents in-process
//   --known-failures N,.. criteria expected to fail; they are still reported as
//                         FAIL, but an unexpected pass is an error too

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gridsafe/batch.hpp"
#include "gridsafe/engine.hpp"
#include "gridsafe/harness.hpp"
#include "gridsafe/observation.hpp"
#include "gridsafe/planner.hpp"
#include "gridsafe/rl.hpp"
#include "gridsafe/scenarios.hpp"

using namespace gridsafe;

namespace {

// ---------------------------------------------------------------------------
// Pinned tolerances

constexpr int kBaselineSteps = 20;                // criterion 1, exact
constexpr int kSweepSettings = 20;                // criterion 3
constexpr int kSweepMinEmergent = 12;             // 15 +- 3, lower bound
constexpr double kSweepMinReduction = 4.0;        // firm
constexpr int kRoomsBudget = 30;                  // criterion 4, exact
constexpr int kRoomsRepetitions = 50;             // criterion 5
constexpr double kRoomsMeanTarget = 16.8;
constexpr double kRoomsMeanTolerance = 1.5;
constexpr double kRoomsCiWidthTarget = 1.48;      // "comparable": within a factor of 2
constexpr double kRoomsCiWidthFactor = 2.0;
constexpr int kRlSeeds = 10;                      // criterion 6
constexpr int kRlSteps = 13;
constexpr int kRlStepTolerance = 1;
constexpr int kRlSoftConverged = 5;               // soft target, reported only
constexpr double kGradRelTolerance = 1e-4;        // criterion 8
constexpr double kSoftmaxTolerance = 1e-9;
constexpr double kSpotTolerance = 1e-12;          // criterion 9

struct Line {
  int id;
  bool pass;
  std::string detail;
  double seconds;
};

std::vector<Line> g_lines;

template <typename F>
void criterion(int id, F&& body) {
  const auto t0 = std::chrono::steady_clock::now();
  std::ostringstream detail;
  bool pass = false;
  try {
    pass = body(detail);
  } catch (const std::exception& e) {
    detail << " exception: " << e.what();
    pass = false;
  }
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  g_lines.push_back({id, pass, detail.str(), s});
  std::printf("criterion %d: %s  %s  [%.2fs]\n", id, pass ? "PASS" : "FAIL", detail.str().c_str(), s);
  std::fflush(stdout);
}

const char* tf(bool b) { return b ? "true" : "false"; }

EmergenceReport tsp_report(const std::string& scenario, bool remediation, std::uint64_t seed) {
  const ScenarioSpec s = configure_scenario(resolve_scenario(scenario), AgentType::Tsp, remediation);
  return detect_emergence(s, tsp_team(s, remediation, seed));
}

// ---------------------------------------------------------------------------
// Criterion 8 helpers

double gradient_relative_error(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int hidden = 3 + static_cast<int>(seed % 4);
  const Mlp policy = Mlp::glorot({4, hidden, 4}, rng);
  const Mlp value = Mlp::glorot({4, hidden, 1}, rng);
  EpisodeBatch batch;
  const std::size_t T = 2 + seed % 6;
  for (std::size_t t = 0; t < T; ++t) {
    batch.features.push_back({u(rng), u(rng), u(rng), u(rng)});
    batch.actions.push_back(kActions[rng() % 4]);
    batch.rewards.push_back(t + 1 == T ? 49.0 : -1.0);
  }
  TrainConfig cfg;
  cfg.gamma = 0.95;
  cfg.entropy_coeff = 0.02;
  const auto returns = monte_carlo_returns(batch.rewards, cfg.gamma);
  std::vector<double> adv(T);
  for (std::size_t t = 0; t < T; ++t) adv[t] = returns[t] - value_forward(value, batch.features[t]);

  Mlp pg(policy.sizes());
  Mlp vg(value.sizes());
  a2c_gradients(policy, value, batch, cfg, pg, vg);

  auto check = [&](const Mlp& net, const std::vector<double>& analytic, bool is_policy) {
    Mlp probe = net;
    std::vector<double> flat = net.flatten();
    double diff2 = 0.0;
    double a2 = 0.0;
    double n2 = 0.0;
    const double h = 1e-6;
    for (std::size_t i = 0; i < flat.size(); ++i) {
      const double keep = flat[i];
      auto loss = [&](double v) {
        flat[i] = v;
        probe.assign(flat);
        const LossStats s = is_policy ? a2c_losses(probe, value, batch, returns, adv, cfg.entropy_coeff)
                                      : a2c_losses(policy, probe, batch, returns, adv, cfg.entropy_coeff);
        return is_policy ? s.policy_loss : s.value_loss;
      };
      const double numeric = (loss(keep + h) - loss(keep - h)) / (2 * h);
      flat[i] = keep;
      diff2 += (numeric - analytic[i]) * (numeric - analytic[i]);
      a2 += analytic[i] * analytic[i];
      n2 += numeric * numeric;
    }
    const double scale = std::max(std::sqrt(a2), std::sqrt(n2));
    return scale > 0 ? std::sqrt(diff2) / scale : 0.0;
  };
  return std::max(check(policy, pg.flatten(), true), check(value, vg.flatten(), false));
}

// Plain BFS hop counts from `src`.
std::vector<int> bfs_hops(const Grid& g, Position src) {
  std::vector<int> d(g.size(), -1);
  std::vector<Position> frontier{src};
  d[g.index(src)] = 0;
  for (std::size_t k = 0; k < frontier.size(); ++k) {
    const Position p = frontier[k];
    for (Action a : kActions) {
      const Position q = moved(p, a);
      if (!g.is_field(q) || d[g.index(q)] >= 0) continue;
      d[g.index(q)] = d[g.index(p)] + 1;
      frontier.push_back(q);
    }
  }
  return d;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app("acceptance checks");
  std::string agents_dir;
  int episodes = TrainConfig{}.episodes;
  app.add_option("--agents", agents_dir, "directory of agents_seed<S>.txt files from `gridsafe train`");
  app.add_option("--episodes", episodes, "training episodes per agent when training in-process");
  std::vector<int> known_failures;
  app.add_option("--known-failures", known_failures, "criteria expected to fail")->delimiter(',')->check(CLI::Range(1, 9));
  CLI11_PARSE(app, argc, argv);

  // 1. Baseline chasing on the canonical five-coin layout.
  criterion(1, [](std::ostream& d) {
    const EmergenceReport r = tsp_report("coin_quadrant", false, 0);
    const GridState& f = r.joint_trace.final_state;
    const int c1 = static_cast<int>(f.collected_count(0));
    const int c2 = static_cast<int>(f.collected_count(1));
    d << "coins " << c1 << "/" << c2 << " steps " << r.joint_trace.length() << " emergent " << tf(r.emergent)
      << " chasing " << tf(r.chasing.detected);
    return c1 == 0 && c2 == 5 && r.joint_trace.length() == kBaselineSteps && r.emergent && r.chasing.detected;
  });

  // 2. Coin-gradient remediation: agent 1 takes the two upper coins.
  criterion(2, [](std::ostream& d) {
    const EmergenceReport r = tsp_report("coin_quadrant", true, 0);
    const GridState& f = r.joint_trace.final_state;
    std::vector<Position> coins;
    for (const Target& t : build_coin_quadrant(5).targets) coins.push_back(t.pos);
    std::sort(coins.begin(), coins.end(), [](Position a, Position b) { return std::tie(a.y, a.x) < std::tie(b.y, b.x); });
    const std::set<Position> top(coins.begin(), coins.begin() + 2);
    const std::set<Position> got1(f.collected[0].begin(), f.collected[0].end());
    d << "agent1 " << got1.size() << " coins (top two: " << tf(got1 == top) << ") agent2 " << f.collected_count(1)
      << " steps " << r.joint_trace.length() << " emergent " << tf(r.emergent);
    return got1 == top && f.collected_count(1) == 3 && !r.emergent && r.joint_trace.length() < kBaselineSteps &&
           r.joint_trace.terminal == Terminal::AllTargetsCollected;
  });

  // 3. Randomized sweep.
  criterion(3, [](std::ostream& d) {
    ExperimentConfig cfg;
    cfg.sweep = SweepConfig{kSweepSettings, 2, 12};
    cfg.seeds = {0};
    const SweepSummary s = sweep_coin_settings(cfg);
    int deadlocked = 0;
    for (const SweepRow& row : s.rows) deadlocked += row.baseline.terminal == Terminal::StepBudgetExhausted ? 1 : 0;
    d << "emergent baseline " << s.emergent_baseline << "/" << kSweepSettings << " remediated "
      << s.emergent_remediated << "/" << kSweepSettings << " mean steps " << s.mean_steps_baseline << " -> "
      << s.mean_steps_remediated << " reduction " << s.mean_reduction << " (baseline deadlocks " << deadlocked << ")";
    return s.emergent_baseline >= kSweepMinEmergent && s.mean_reduction >= kSweepMinReduction;
  });

  // 4. Baseline blocking in two rooms.
  criterion(4, [](std::ostream& d) {
    const EmergenceReport r = tsp_report("two_rooms", false, 0);
    const GridState& f = r.joint_trace.final_state;
    const std::size_t flags = f.collected_count(0) + f.collected_count(1);
    d << "flags " << flags << " steps " << r.joint_trace.length() << " blocking " << tf(r.blocking.detected)
      << " emergent " << tf(r.emergent);
    return flags == 0 && r.joint_trace.length() == kRoomsBudget && r.blocking.detected && r.emergent &&
           r.joint_trace.terminal == Terminal::StepBudgetExhausted;
  });

  // 5. Contortion remediation over tie-randomized repetitions.
  criterion(5, [](std::ostream& d) {
    ExperimentConfig cfg;
    cfg.scenario = "two_rooms";
    cfg.remediation = true;
    for (int s = 0; s < kRoomsRepetitions; ++s) cfg.seeds.push_back(static_cast<std::uint64_t>(s));
    const ExperimentResult r = run_experiment(cfg);
    std::vector<double> steps;
    int finished = 0;
    int blocked = 0;
    for (const RunRecord& rec : r.records) {
      steps.push_back(rec.steps_total);
      finished += rec.terminal == Terminal::AllTargetsCollected ? 1 : 0;
      blocked += rec.blocking ? 1 : 0;
    }
    const Stats st = stats(steps);
    const bool mean_ok = std::abs(st.mean - kRoomsMeanTarget) <= kRoomsMeanTolerance;
    const bool width_ok = st.ci_width() >= kRoomsCiWidthTarget / kRoomsCiWidthFactor &&
                          st.ci_width() <= kRoomsCiWidthTarget * kRoomsCiWidthFactor;
    d << "finished " << finished << "/" << kRoomsRepetitions << " mean " << st.mean << " (target "
      << kRoomsMeanTarget << " +- " << kRoomsMeanTolerance << ") ci95 (" << st.ci_lo << ", " << st.ci_hi
      << ") width " << st.ci_width() << " (band " << kRoomsCiWidthTarget / kRoomsCiWidthFactor << ".."
      << kRoomsCiWidthTarget * kRoomsCiWidthFactor << ")";
    return finished == kRoomsRepetitions && blocked == 0 && mean_ok && width_ok;
  });

  // 6. RL coordination with the auxiliary-target observation.
  std::vector<std::vector<TrainedAgent>> teams;
  std::vector<std::uint64_t> rl_seeds;
  for (int s = 0; s < kRlSeeds; ++s) rl_seeds.push_back(static_cast<std::uint64_t>(s));
  criterion(6, [&](std::ostream& d) {
    const ScenarioSpec rooms = build_two_rooms();
    if (agents_dir.empty()) {
      TrainConfig cfg;
      cfg.episodes = episodes;
      teams = train_seeds(rooms, cfg, rl_seeds);
    } else {
      for (std::uint64_t s : rl_seeds) teams.push_back(load_team(agents_dir, s));
    }
    const ScenarioSpec remediated = configure_scenario(rooms, AgentType::Rl, true);
    int converged = 0;
    int within = 0;
    std::ostringstream per_seed;
    for (std::size_t i = 0; i < teams.size(); ++i) {
      bool ok = true;
      for (const TrainedAgent& a : teams[i]) ok = ok && a.converged;
      if (!ok) continue;
      ++converged;
      const EpisodeTrace t = run_joint(remediated, rl_factory(teams[i]));
      const bool hit = t.terminal == Terminal::AllTargetsCollected && std::abs(t.length() - kRlSteps) <= kRlStepTolerance;
      within += hit ? 1 : 0;
      per_seed << " s" << rl_seeds[i] << "=" << t.length() << (t.terminal == Terminal::AllTargetsCollected ? "" : "!");
    }
    d << "converged " << converged << "/" << kRlSeeds << " (soft target >= " << kRlSoftConverged << "), "
      << within << " of them reach both flags in " << kRlSteps << " +- " << kRlStepTolerance << " steps:"
      << per_seed.str();
    return converged > 0 && within == converged;
  });

  // 7. Predicate suite over scenario x remediation.
  criterion(7, [&](std::ostream& d) {
    bool ok = true;
    for (const char* scenario : {"coin_quadrant", "two_rooms"}) {
      for (bool remediation : {false, true}) {
        const EmergenceReport r = tsp_report(scenario, remediation, 0);
        const bool locals = r.joint_local_conjunction;
        const bool cell_ok = remediation ? (locals && r.joint_global && !r.emergent)
                                         : (locals && !r.joint_global && r.emergent);
        ok = ok && cell_ok && r.emergent == (r.joint_global != locals);
        d << scenario << (remediation ? "/on" : "/off") << " tsp local " << tf(locals) << " global "
          << tf(r.joint_global) << " emergent " << tf(r.emergent) << "; ";
      }
    }
    // Two-rooms RL cells for the converged teams of criterion 6.
    const ScenarioSpec rooms = build_two_rooms();
    int rl_cells = 0;
    int rl_ok = 0;
    for (const auto& team : teams) {
      bool conv = true;
      for (const TrainedAgent& a : team) conv = conv && a.converged;
      if (!conv) continue;
      for (bool remediation : {false, true}) {
        const ScenarioSpec s = configure_scenario(rooms, AgentType::Rl, remediation);
        const EmergenceReport r = detect_emergence(s, rl_factory(team));
        const bool locals = r.joint_local_conjunction;
        const bool cell_ok = remediation ? (locals && r.joint_global && !r.emergent)
                                         : (locals && !r.joint_global && r.emergent);
        ++rl_cells;
        rl_ok += cell_ok ? 1 : 0;
      }
    }
    d << "two_rooms rl cells " << rl_ok << "/" << rl_cells;
    return ok && rl_ok == rl_cells;
  });

  // 8. Numerical properties.
  criterion(8, [](std::ostream& d) {
    double worst_grad = 0.0;
    for (std::uint64_t s = 0; s < 10; ++s) worst_grad = std::max(worst_grad, gradient_relative_error(s));

    std::mt19937_64 rng(8);
    std::normal_distribution<double> n(0.0, 10.0);
    double worst_sum = 0.0;
    for (int i = 0; i < 1000; ++i) {
      const std::vector<double> l{n(rng), n(rng), n(rng), n(rng)};
      const auto p = softmax(l);
      worst_sum = std::max(worst_sum, std::abs(p[0] + p[1] + p[2] + p[3] - 1.0));
    }

    int hop_mismatch = 0;
    const RewardModel base(RewardMode::Base);
    for (const ScenarioSpec& spec : {build_coin_quadrant(5), build_two_rooms()}) {
      const Grid& g = spec.map;
      for (std::size_t i = 0; i < g.size(); ++i) {
        const Position src = g.position(i);
        if (!g.is_field(src)) continue;
        const ShortestPaths sp(g, base, src, true);
        const auto ref = bfs_hops(g, src);
        for (std::size_t j = 0; j < g.size(); ++j) {
          const Position p = g.position(j);
          if (!g.is_field(p)) continue;
          if (sp.hops(p) != ref[j] || std::abs(sp.cost(p) - ref[j]) > 1e-9) ++hop_mismatch;
        }
      }
    }

    int tour_violations = 0;
    const ScenarioSpec coins = build_coin_quadrant(5);
    const RewardModel gradient(RewardMode::CoinGradient);
    std::mt19937_64 trng(88);
    for (int inst = 0; inst < 100; ++inst) {
      std::set<Position> picks;
      const int k = 1 + static_cast<int>(trng() % 6);
      while (static_cast<int>(picks.size()) < k) {
        const Position p{1 + static_cast<int>(trng() % 12), 1 + static_cast<int>(trng() % 12)};
        if (p != coins.agent_spawns[0]) picks.insert(p);
      }
      const std::vector<Position> targets(picks.begin(), picks.end());
      const CostGraph g = build_cost_graph(coins.map, inst % 2 ? gradient : base, coins.agent_spawns[0], targets);
      if (greedy_hamiltonian(g).total_cost < brute_force_hamiltonian(g).total_cost - 1e-9) ++tour_violations;
    }
    d << "grad rel err " << worst_grad << " softmax |sum-1| " << worst_sum << " dijkstra/bfs mismatches "
      << hop_mismatch << " greedy<brute " << tour_violations;
    return worst_grad < kGradRelTolerance && worst_sum < kSoftmaxTolerance && hop_mismatch == 0 &&
           tour_violations == 0;
  });

  // 9. Parameterization spot values.
  criterion(9, [](std::ostream& d) {
    double worst = 0.0;
    for (int x = 1; x <= 12; ++x) {
      worst = std::max(worst, std::abs(coin_gradient_cost(x, 1) - (-0.60)));
      worst = std::max(worst, std::abs(coin_gradient_cost(x, 9) - (-1.00)));
    }
    for (int y = 1; y <= 12; ++y) worst = std::max(worst, std::abs(two_rooms_contortion_cost(4, y) - (-1.0)));
    worst = std::max(worst, std::abs(two_rooms_contortion_cost(12, 5) - (std::cbrt(2.0) - 1.0)));
    d << "max deviation " << worst;
    return worst <= kSpotTolerance;
  });

  std::set<int> failed;
  for (const Line& l : g_lines)
    if (!l.pass) failed.insert(l.id);
  std::printf("%d/%zu criteria passed\n", static_cast<int>(g_lines.size() - failed.size()), g_lines.size());
  const std::set<int> expected(known_failures.begin(), known_failures.end());
  if (!expected.empty()) {
    std::printf("known failures:");
    for (int id : expected) std::printf(" %d", id);
    std::printf(" -> %s\n", failed == expected ? "matched" : "MISMATCH");
  }
  return failed == expected ? 0 : 1;
}
