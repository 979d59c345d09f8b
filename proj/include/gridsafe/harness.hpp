#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gridsafe/emergence.hpp"
#include "gridsafe/rl.hpp"
#include "gridsafe/rollout.hpp"
#include "gridsafe/scenario_spec.hpp"

namespace gridsafe {

enum class AgentType { Tsp, Rl };

std::string to_string(AgentType t);
AgentType agent_type_from_string(std::string_view s);

struct SweepConfig {
  int n_settings = 20;
  int coins_min = 2;
  int coins_max = 12;
};

struct ExperimentConfig {
  std::string scenario = "coin_quadrant";  // built-in id or scenario file
  AgentType agent_type = AgentType::Tsp;
  bool remediation = false;
  std::vector<std::uint64_t> seeds;
  std::optional<SweepConfig> sweep;
  std::string out_dir;     // empty: nothing is written
  std::string agent_file;  // rl: one agents file, or a directory of agents_seed<S>.txt
  bool parallel = true;
};

struct RunRecord {
  int run_id = 0;
  std::string scenario;
  AgentType agent_type = AgentType::Tsp;
  bool remediation = false;
  std::uint64_t seed = 0;
  int steps_total = 0;
  int coins_agent1 = 0;
  int coins_agent2 = 0;
  bool emergent = false;
  bool chasing = false;
  bool blocking = false;
  Terminal terminal = Terminal::NotTerminal;

  bool operator==(const RunRecord&) const = default;
};

/// Scenario with the reward parameterization and observation mode selected
/// by agent type and remediation:
///   coin quadrant, tsp: CoinGradient when remediated
///   two rooms,     tsp: TwoRoomsContortion when remediated
///   coin quadrant, rl:  intersection-aware observation when remediated
///   two rooms,     rl:  auxiliary-target observation when remediated
ScenarioSpec configure_scenario(const ScenarioSpec& base, AgentType agent, bool remediation);

/// TSP team for a configured scenario. In the coin quadrant agent 1 shapes
/// its routes bottom-right first, and in the baseline it also breaks its
/// initial target tie toward the bottom-right coin. Two-rooms teams draw
/// among equal-cost routes at random, seeded by `seed`.
ControllerFactory tsp_team(const ScenarioSpec& scenario, bool remediation, std::uint64_t seed);

/// Trained team for `seed` from an agents file or a directory of per-seed files.
std::vector<TrainedAgent> load_team(const std::string& agent_file, std::uint64_t seed);
std::string team_file_name(std::uint64_t seed);

struct ExperimentResult {
  std::vector<RunRecord> records;
  std::vector<EmergenceReport> reports;
};

/// One run per seed, ordered by seed. Writes runs.csv, summary.txt and one
/// trace file per run into cfg.out_dir when it is set and there are runs.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

struct Stats {
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  std::size_t n = 0;

  double ci_width() const { return ci_hi - ci_lo; }
};

/// Mean, sample standard deviation and the normal-approximation 95% interval
/// mean +- 1.96 s / sqrt(n). Throws DomainError on an empty list.
Stats stats(std::span<const double> values);

/// Five-number summary plus mean and interval, as plain text.
std::string whisker_summary(std::string_view label, std::span<const double> values);

struct SweepRow {
  int setting = 0;
  std::uint64_t seed = 0;
  int n_coins = 0;
  RunRecord baseline;
  RunRecord remediated;
};

struct SweepSummary {
  std::vector<SweepRow> rows;
  int emergent_baseline = 0;
  int emergent_remediated = 0;
  double mean_steps_baseline = 0.0;
  double mean_steps_remediated = 0.0;
  double mean_reduction = 0.0;

  std::vector<RunRecord> records() const;
};

/// Randomized coin settings (seed base = first configured seed, default 0),
/// each run with and without remediation. Writes sweep.csv and
/// sweep_summary.txt into cfg.out_dir when set.
SweepSummary sweep_coin_settings(const ExperimentConfig& cfg);

/// Summary statistics recomputed from records (e.g. read back from CSV).
SweepSummary summarize_sweep(std::span<const RunRecord> records);

// CSV with header
// run_id,scenario,agent_type,remediation,seed,steps_total,coins_agent1,coins_agent2,emergent,chasing,blocking,terminal
extern const char* const kCsvHeader;
void write_csv(std::ostream& out, std::span<const RunRecord> records);
std::vector<RunRecord> read_csv(std::istream& in);
void write_csv_file(const std::string& path, std::span<const RunRecord> records);
std::vector<RunRecord> read_csv_file(const std::string& path);

/// A stored episode: the scenario text and the joint actions, enough to
/// replay it through the deterministic engine.
struct StoredTrace {
  ScenarioSpec scenario;
  std::vector<JointAction> actions;
  int steps_total = 0;
  std::string terminal;
};

std::string trace_to_json(const ScenarioSpec& scenario, const EpisodeTrace& trace);
StoredTrace trace_from_json(std::string_view text);
void save_trace(const std::string& path, const ScenarioSpec& scenario, const EpisodeTrace& trace);
StoredTrace load_trace(const std::string& path);

/// ASCII frames of the replayed episode, initial state first.
std::vector<std::string> replay_frames(const StoredTrace& trace);

}  // namespace gridsafe
