// Command-line front end: run, sweep, train, render.
//
// Exit codes: 0 success, 1 validation error, 2 I/O error.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gridsafe/batch.hpp"
#include "gridsafe/harness.hpp"
#include "gridsafe/rl.hpp"
#include "gridsafe/scenarios.hpp"

using namespace gridsafe;

namespace {

constexpr int kOk = 0;
constexpr int kValidation = 1;
constexpr int kIo = 2;

bool parse_switch(const std::string& s) {
  if (s == "on") return true;
  if (s == "off") return false;
  throw ValidationError("--remediation must be on or off");
}

std::uint64_t parse_seed(const std::string& s) {
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
    throw ValidationError("invalid seed '" + s + "'");
  try {
    return std::stoull(s);
  } catch (const std::out_of_range&) {
    throw ValidationError("seed out of range '" + s + "'");
  }
}

/// "0,3,7" or an inclusive range "0-9".
std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    const std::string item = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    const std::size_t dash = item.find('-');
    if (dash == std::string::npos) {
      out.push_back(parse_seed(item));
    } else {
      const std::uint64_t lo = parse_seed(item.substr(0, dash));
      const std::uint64_t hi = parse_seed(item.substr(dash + 1));
      if (hi < lo || hi - lo > 100000) throw ValidationError("invalid seed range '" + item + "'");
      for (std::uint64_t s = lo; s <= hi; ++s) out.push_back(s);
    }
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

void print_records(const std::vector<RunRecord>& records) {
  for (const RunRecord& r : records) {
    std::cout << "run " << r.run_id << " " << r.scenario << " seed " << r.seed << ": steps " << r.steps_total
              << ", targets " << r.coins_agent1 << "/" << r.coins_agent2 << ", emergent "
              << (r.emergent ? "true" : "false") << ", chasing " << (r.chasing ? "true" : "false") << ", blocking "
              << (r.blocking ? "true" : "false") << ", " << to_string(r.terminal) << '\n';
  }
}

struct RunOptions {
  std::string scenario = "coin_quadrant";
  std::string agent = "tsp";
  std::string remediation = "off";
  std::vector<std::string> seeds;
  std::string out;
  std::string agent_file;
  int settings = 20;
  int coins_min = 2;
  int coins_max = 12;
};

ExperimentConfig make_config(const RunOptions& o) {
  ExperimentConfig cfg;
  cfg.scenario = o.scenario;
  cfg.agent_type = agent_type_from_string(o.agent);
  cfg.remediation = parse_switch(o.remediation);
  for (const auto& s : o.seeds) cfg.seeds.push_back(parse_seed(s));
  cfg.out_dir = o.out;
  cfg.agent_file = o.agent_file;
  return cfg;
}

int cmd_run(const RunOptions& o) {
  ExperimentConfig cfg = make_config(o);
  if (cfg.seeds.empty()) cfg.seeds.push_back(0);
  const ExperimentResult result = run_experiment(cfg);
  print_records(result.records);
  if (result.reports.size() == 1) std::cout << describe(result.reports.front());
  std::vector<double> steps;
  for (const auto& r : result.records) steps.push_back(r.steps_total);
  if (steps.size() > 1) std::cout << whisker_summary("steps", steps);
  return kOk;
}

int cmd_sweep(const RunOptions& o) {
  ExperimentConfig cfg = make_config(o);
  cfg.sweep = SweepConfig{o.settings, o.coins_min, o.coins_max};
  const SweepSummary s = sweep_coin_settings(cfg);
  for (const SweepRow& row : s.rows) {
    std::cout << "setting " << row.setting << " seed " << row.seed << " coins " << row.n_coins << ": baseline "
              << row.baseline.steps_total << " steps (" << row.baseline.coins_agent1 << "/"
              << row.baseline.coins_agent2 << (row.baseline.emergent ? ", emergent" : "") << "), remediated "
              << row.remediated.steps_total << " steps (" << row.remediated.coins_agent1 << "/"
              << row.remediated.coins_agent2 << (row.remediated.emergent ? ", emergent" : "") << ")\n";
  }
  std::cout << "emergent: baseline " << s.emergent_baseline << "/" << s.rows.size() << ", remediated "
            << s.emergent_remediated << "/" << s.rows.size() << "\nmean steps: baseline " << s.mean_steps_baseline
            << ", remediated " << s.mean_steps_remediated << ", reduction " << s.mean_reduction << '\n';
  return kOk;
}

struct TrainOptions {
  std::string scenario = "two_rooms";
  std::string seeds = "0";
  int episodes = 20000;
  std::string out = "agents";
};

int cmd_train(const TrainOptions& o) {
  const ScenarioSpec scenario = resolve_scenario(o.scenario);
  const auto seeds = parse_seed_list(o.seeds);
  if (o.episodes < 1) throw ValidationError("--episodes must be positive");
  TrainConfig cfg;
  cfg.episodes = o.episodes;
  std::error_code ec;
  std::filesystem::create_directories(o.out, ec);
  if (ec || !std::filesystem::is_directory(o.out)) throw IoError("cannot create output directory '" + o.out + "'");

  const auto teams = train_seeds(scenario, cfg, seeds);
  const auto summary_path = std::filesystem::path(o.out) / "train.csv";
  std::ofstream summary(summary_path, std::ios::binary);
  if (!summary) throw IoError("cannot write '" + summary_path.string() + "'");
  summary << "seed,agent,converged,episodes,eval_return\n";
  int converged_teams = 0;
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    TrainConfig c = cfg;
    c.seed = seeds[i];
    save_agents((std::filesystem::path(o.out) / team_file_name(seeds[i])).string(), teams[i], c);
    bool all = true;
    for (std::size_t a = 0; a < teams[i].size(); ++a) {
      const TrainedAgent& t = teams[i][a];
      summary << seeds[i] << ',' << a + 1 << ',' << (t.converged ? "true" : "false") << ',' << t.episodes_run << ','
              << t.last_eval_return << '\n';
      all = all && t.converged;
    }
    converged_teams += all ? 1 : 0;
    std::cout << "seed " << seeds[i] << ": " << (all ? "converged" : "not converged") << '\n';
  }
  if (!summary) throw IoError("write failed for '" + summary_path.string() + "'");
  std::cout << converged_teams << "/" << seeds.size() << " seeds converged\n";
  return kOk;
}

int cmd_render(const std::string& path) {
  const StoredTrace trace = load_trace(path);
  const auto frames = replay_frames(trace);
  for (std::size_t k = 0; k < frames.size(); ++k) std::cout << "step " << k << '\n' << frames[k] << "\n\n";
  std::cout << trace.steps_total << " steps, " << trace.terminal << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-agent gridworld emergence experiments"};
  app.require_subcommand(1);

  RunOptions run_opts;
  auto add_common = [](CLI::App* sub, RunOptions& o) {
    sub->add_option("--scenario", o.scenario, "coin_quadrant, two_rooms or a scenario file");
    sub->add_option("--agent", o.agent, "tsp or rl");
    sub->add_option("--remediation", o.remediation, "on or off");
    sub->add_option("--seed", o.seeds, "seed (repeatable)");
    sub->add_option("--out", o.out, "output directory");
    sub->add_option("--agent-file", o.agent_file, "trained agents file or directory (rl)");
  };
  CLI::App* run = app.add_subcommand("run", "evaluate agents on a scenario, one run per seed");
  add_common(run, run_opts);

  RunOptions sweep_opts;
  CLI::App* sweep = app.add_subcommand("sweep", "randomized coin settings, baseline and remediated");
  add_common(sweep, sweep_opts);
  sweep->add_option("--settings", sweep_opts.settings, "number of settings");
  sweep->add_option("--coins-min", sweep_opts.coins_min, "fewest coins per setting");
  sweep->add_option("--coins-max", sweep_opts.coins_max, "most coins per setting");

  TrainOptions train_opts;
  CLI::App* train_cmd = app.add_subcommand("train", "train actor-critic agents solo, one team per seed");
  train_cmd->add_option("--scenario", train_opts.scenario, "coin_quadrant, two_rooms or a scenario file");
  train_cmd->add_option("--seeds", train_opts.seeds, "seeds, e.g. 0-9 or 1,4,7");
  train_cmd->add_option("--episodes", train_opts.episodes, "training episodes per agent");
  train_cmd->add_option("--out", train_opts.out, "output directory");

  std::string trace_path;
  CLI::App* render = app.add_subcommand("render", "replay a stored trace as ASCII frames");
  render->add_option("trace,--trace", trace_path, "trace file written by run")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kValidation;
  }

  try {
    if (*run) return cmd_run(run_opts);
    if (*sweep) return cmd_sweep(sweep_opts);
    if (*train_cmd) return cmd_train(train_opts);
    if (*render) return cmd_render(trace_path);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kValidation;
  }
  return kOk;
}
