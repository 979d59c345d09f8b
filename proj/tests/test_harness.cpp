#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "gridsafe/batch.hpp"
#include "gridsafe/engine.hpp"
#include "gridsafe/harness.hpp"
#include "gridsafe/scenarios.hpp"

using namespace gridsafe;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::path(GRIDSAFE_TEST_TMP) / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

RunRecord sample_record(int id, std::string scenario) {
  RunRecord r;
  r.run_id = id;
  r.scenario = std::move(scenario);
  r.agent_type = id % 2 ? AgentType::Rl : AgentType::Tsp;
  r.remediation = id % 3 == 0;
  r.seed = 100 + static_cast<std::uint64_t>(id);
  r.steps_total = 17 + id;
  r.coins_agent1 = id;
  r.coins_agent2 = 5 - id;
  r.emergent = id % 2 == 0;
  r.chasing = id == 1;
  r.blocking = id == 2;
  r.terminal = id % 2 ? Terminal::StepBudgetExhausted : Terminal::AllTargetsCollected;
  return r;
}

}  // namespace

TEST_CASE("stats against a hand computation") {
  const std::vector<double> v{15, 16, 17, 18, 19};
  const Stats s = stats(v);
  CHECK(s.n == 5);
  CHECK(s.mean == doctest::Approx(17.0));
  // Sample variance: (4 + 1 + 0 + 1 + 4) / 4 = 2.5.
  CHECK(s.stddev == doctest::Approx(std::sqrt(2.5)));
  const double half = 1.96 * std::sqrt(2.5) / std::sqrt(5.0);
  CHECK(s.ci_lo == doctest::Approx(17.0 - half));
  CHECK(s.ci_hi == doctest::Approx(17.0 + half));
  CHECK(s.ci_width() == doctest::Approx(2 * half));

  const Stats one = stats(std::vector<double>{4.0});
  CHECK(one.stddev == 0.0);
  CHECK(one.ci_width() == 0.0);
  CHECK_THROWS_AS(stats(std::vector<double>{}), DomainError);

  const std::string w = whisker_summary("steps", v);
  CHECK(w.find("n=5 min=15.00 q1=16.00 median=17.00 q3=18.00 max=19.00") != std::string::npos);
  CHECK(w.find("mean=17.00") != std::string::npos);
}

TEST_CASE("csv round trip with quoting") {
  const std::vector<RunRecord> records{sample_record(0, "coin_quadrant"), sample_record(1, "has,comma"),
                                       sample_record(2, "say \"hi\""), sample_record(3, "two\nlines")};
  std::ostringstream out;
  write_csv(out, records);
  const std::string text = out.str();
  CHECK(text.rfind(std::string(kCsvHeader) + "\n", 0) == 0);
  CHECK(text.find('\r') == std::string::npos);
  CHECK(text.find("\"has,comma\"") != std::string::npos);
  CHECK(text.find("\"say \"\"hi\"\"\"") != std::string::npos);
  CHECK(text.find("0,coin_quadrant,tsp,on,100,17,0,5,true,false,false,all_targets_collected\n") != std::string::npos);
  std::istringstream in(text);
  CHECK(read_csv(in) == records);
}

TEST_CASE("csv parse errors") {
  auto parse = [](const std::string& text) {
    std::istringstream in(text);
    return read_csv(in);
  };
  const std::string h = std::string(kCsvHeader) + "\n";
  CHECK_THROWS_AS(parse(""), ParseError);
  CHECK_THROWS_AS(parse("run_id,scenario\n"), ParseError);
  CHECK_THROWS_AS(parse(h + "0,x,tsp,off,1,2,3,4,true,false,false\n"), ParseError);
  CHECK_THROWS_AS(parse(h + "0,x,tsp,maybe,1,2,3,4,true,false,false,all_targets_collected\n"), ParseError);
  CHECK_THROWS_AS(parse(h + "0,x,tsp,off,1,2,3,4,yes,false,false,all_targets_collected\n"), ParseError);
  CHECK_THROWS_AS(parse(h + "0,x,dqn,off,1,2,3,4,true,false,false,all_targets_collected\n"), ParseError);
  CHECK_THROWS_AS(parse(h + "0,\"x,tsp,off,1,2,3,4,true,false,false,all_targets_collected\n"), ParseError);
  try {
    parse(h + "0,x,tsp,off,1,2,3,4,true,false,false,all_targets_collected\n1,x,tsp,off,1,two,3,4,true,false,false,"
              "all_targets_collected\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line == 3);
  }
  CHECK(parse(h).empty());
}

TEST_CASE("configure_scenario selects modes per agent type and remediation") {
  const ScenarioSpec coins = build_coin_quadrant(5);
  const ScenarioSpec rooms = build_two_rooms();
  CHECK(configure_scenario(coins, AgentType::Tsp, false).reward_mode == RewardMode::Base);
  CHECK(configure_scenario(coins, AgentType::Tsp, true).reward_mode == RewardMode::CoinGradient);
  CHECK(configure_scenario(rooms, AgentType::Tsp, true).reward_mode == RewardMode::TwoRoomsContortion);
  CHECK(configure_scenario(coins, AgentType::Rl, true).reward_mode == RewardMode::Base);
  CHECK(configure_scenario(coins, AgentType::Rl, true).observation_mode == ObservationMode::IntersectionAware);
  CHECK(configure_scenario(rooms, AgentType::Rl, true).observation_mode == ObservationMode::AuxiliaryTarget);
  CHECK(configure_scenario(rooms, AgentType::Rl, false).observation_mode == ObservationMode::Manhattan);
  CHECK(agent_type_from_string("rl") == AgentType::Rl);
  CHECK_THROWS_AS(agent_type_from_string("ppo"), ValidationError);
}

TEST_CASE("run_experiment orders rows by seed and writes its files") {
  const fs::path dir = scratch("run_experiment");
  ExperimentConfig cfg;
  cfg.scenario = "two_rooms";
  cfg.remediation = true;
  cfg.seeds = {7, 2, 5};
  cfg.out_dir = dir.string();
  const ExperimentResult r = run_experiment(cfg);
  REQUIRE(r.records.size() == 3);
  CHECK(r.records[0].seed == 2);
  CHECK(r.records[1].seed == 5);
  CHECK(r.records[2].seed == 7);
  for (int i = 0; i < 3; ++i) CHECK(r.records[static_cast<std::size_t>(i)].run_id == i);

  CHECK(read_csv_file((dir / "runs.csv").string()) == r.records);
  CHECK(slurp(dir / "summary.txt").find("n=3") != std::string::npos);
  for (int i = 0; i < 3; ++i) {
    const StoredTrace t = load_trace((dir / "traces" / ("run_" + std::to_string(i) + ".json")).string());
    CHECK(t.steps_total == r.records[static_cast<std::size_t>(i)].steps_total);
    CHECK(t.terminal == to_string(r.records[static_cast<std::size_t>(i)].terminal));
    const auto frames = replay_frames(t);
    CHECK(frames.back() == render_ascii(r.reports[static_cast<std::size_t>(i)].joint_trace.final_state));
  }

  ExperimentConfig serial = cfg;
  serial.parallel = false;
  serial.out_dir.clear();
  CHECK(run_experiment(serial).records == r.records);

  ExperimentConfig none = cfg;
  none.seeds.clear();
  CHECK(run_experiment(none).records.empty());

  ExperimentConfig bad = cfg;
  bad.out_dir = (dir / "runs.csv" / "nested").string();
  CHECK_THROWS_AS(run_experiment(bad), IoError);
}

TEST_CASE("trace json round trip and validation") {
  const ScenarioSpec coins = configure_scenario(build_coin_quadrant(5), AgentType::Tsp, false);
  const EpisodeTrace trace = run_joint(coins, tsp_team(coins, false, 0));
  const StoredTrace t = trace_from_json(trace_to_json(coins, trace));
  CHECK(t.scenario == coins);
  CHECK(t.steps_total == trace.length());
  REQUIRE(t.actions.size() == trace.steps.size());
  for (std::size_t k = 0; k < t.actions.size(); ++k) CHECK(t.actions[k] == trace.steps[k].actions);
  const auto frames = replay_frames(t);
  CHECK(frames.size() == trace.steps.size() + 1);
  CHECK(frames.front() == render_ascii(reset(coins)));
  CHECK(frames.back() == render_ascii(trace.final_state));

  CHECK_THROWS_AS(trace_from_json("not json"), ValidationError);
  CHECK_THROWS_AS(trace_from_json(R"({"format":"other","version":1})"), ValidationError);
  CHECK_THROWS_AS(trace_from_json(R"({"format":"gridsafe-trace","version":1})"), ValidationError);
  CHECK_THROWS_AS(load_trace("/nonexistent/trace.json"), IoError);

  StoredTrace overlong = t;
  overlong.actions.push_back(overlong.actions.back());
  if (trace.terminal == Terminal::AllTargetsCollected) CHECK_THROWS_AS(replay_frames(overlong), ValidationError);
}

TEST_CASE("parallel batch evaluation equals the serial reference") {
  std::vector<BatchJob> jobs;
  for (const ScenarioSpec& s : coin_sweep_settings(6, 2, 12, 3)) {
    for (bool remediated : {false, true}) {
      const ScenarioSpec c = configure_scenario(s, AgentType::Tsp, remediated);
      jobs.push_back({c, tsp_team(c, remediated, 0)});
    }
  }
  const auto a = evaluate_batch(jobs);
  const auto b = evaluate_batch_serial(jobs);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].emergent == b[i].emergent);
    CHECK(a[i].local_results == b[i].local_results);
    CHECK(a[i].joint_trace.length() == b[i].joint_trace.length());
    CHECK(a[i].joint_trace.final_state.agents == b[i].joint_trace.final_state.agents);
    CHECK(a[i].chasing.steps == b[i].chasing.steps);
  }
  CHECK(parallel_threads() >= 1);
}

TEST_CASE("sweep pairs baseline and remediated runs") {
  const fs::path dir = scratch("sweep");
  ExperimentConfig cfg;
  cfg.sweep = SweepConfig{4, 2, 6};
  cfg.seeds = {10};
  cfg.out_dir = dir.string();
  const SweepSummary s = sweep_coin_settings(cfg);
  REQUIRE(s.rows.size() == 4);
  for (std::size_t k = 0; k < 4; ++k) {
    CHECK(s.rows[k].seed == 10 + k);
    CHECK_FALSE(s.rows[k].baseline.remediation);
    CHECK(s.rows[k].remediated.remediation);
  }
  const auto back = read_csv_file((dir / "sweep.csv").string());
  CHECK(back == s.records());
  const SweepSummary again = summarize_sweep(back);
  CHECK(again.emergent_baseline == s.emergent_baseline);
  CHECK(again.mean_reduction == doctest::Approx(s.mean_reduction));
  CHECK(fs::exists(dir / "sweep_summary.txt"));

  ExperimentConfig missing = cfg;
  missing.sweep.reset();
  CHECK_THROWS_AS(sweep_coin_settings(missing), ValidationError);
}

TEST_CASE("rl teams load from a file or a per-seed directory") {
  const fs::path dir = scratch("teams");
  const ScenarioSpec rooms = build_two_rooms();
  TrainConfig cfg;
  cfg.hidden_sizes = {4};
  for (std::uint64_t seed : {1, 2}) {
    cfg.seed = seed;
    save_agents((dir / team_file_name(seed)).string(), {init_agent(rooms, cfg), init_agent(rooms, cfg)}, cfg);
  }
  const auto t1 = load_team(dir.string(), 1);
  const auto t2 = load_team(dir.string(), 2);
  CHECK(t1.size() == 2);
  CHECK_FALSE(t1[0].policy == t2[0].policy);
  CHECK(load_team((dir / team_file_name(2)).string(), 99)[0].policy == t2[0].policy);
  CHECK_THROWS_AS(load_team(dir.string(), 3), IoError);
  CHECK_THROWS_AS(load_team("", 0), ValidationError);
}
