#include "gridsafe/harness.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "gridsafe/batch.hpp"
#include "gridsafe/engine.hpp"
#include "gridsafe/scenarios.hpp"

namespace gridsafe {

namespace fs = std::filesystem;

std::string to_string(AgentType t) { return t == AgentType::Tsp ? "tsp" : "rl"; }

AgentType agent_type_from_string(std::string_view s) {
  if (s == "tsp") return AgentType::Tsp;
  if (s == "rl") return AgentType::Rl;
  throw ValidationError("unknown agent type '" + std::string(s) + "' (expected tsp or rl)");
}

// ---------------------------------------------------------------------------
// Teams

namespace {

// Owned targets mark the two-rooms family; shared targets the coin family.
bool is_rooms(const ScenarioSpec& s) { return s.has_owned_targets(); }

}  // namespace

ScenarioSpec configure_scenario(const ScenarioSpec& base, AgentType agent, bool remediation) {
  ScenarioSpec s = base;
  s.reward_mode = RewardMode::Base;
  s.observation_mode = ObservationMode::Manhattan;
  if (!remediation) return s;
  if (agent == AgentType::Tsp) {
    s.reward_mode = is_rooms(s) ? RewardMode::TwoRoomsContortion : RewardMode::CoinGradient;
  } else if (is_rooms(s)) {
    if (!s.auxiliary_target) throw ValidationError("auxiliary-target remediation needs an aux cell in the scenario");
    s.observation_mode = ObservationMode::AuxiliaryTarget;
  } else {
    s.observation_mode = ObservationMode::IntersectionAware;
  }
  return s;
}

ControllerFactory tsp_team(const ScenarioSpec& scenario, bool remediation, std::uint64_t seed) {
  PlannerOptions a1;
  PlannerOptions a2;
  if (is_rooms(scenario)) {
    if (remediation) {
      a1.tie_break = a2.tie_break = TieBreak::Random;
      a1.seed = 2 * seed;
      a2.seed = 2 * seed + 1;
    }
  } else {
    // Agent 1 walks its equal-length routes bottom-right first in both runs;
    // the baseline also forces its first target choice toward that coin.
    a1.route_tie = TieBreak::BottomRight;
    if (!remediation) a1.tie_break = TieBreak::BottomRight;
  }
  return tsp_factory({a1, a2});
}

std::string team_file_name(std::uint64_t seed) { return "agents_seed" + std::to_string(seed) + ".txt"; }

std::vector<TrainedAgent> load_team(const std::string& agent_file, std::uint64_t seed) {
  if (agent_file.empty()) throw ValidationError("rl agents need --agent-file (run `train` first)");
  std::error_code ec;
  if (fs::is_directory(agent_file, ec)) return load_agents((fs::path(agent_file) / team_file_name(seed)).string());
  return load_agents(agent_file);
}

// ---------------------------------------------------------------------------
// Runs

namespace {

RunRecord make_record(int run_id, const std::string& scenario, AgentType agent, bool remediation,
                      std::uint64_t seed, const EmergenceReport& r) {
  RunRecord rec;
  rec.run_id = run_id;
  rec.scenario = scenario;
  rec.agent_type = agent;
  rec.remediation = remediation;
  rec.seed = seed;
  rec.steps_total = r.joint_trace.length();
  const GridState& fin = r.joint_trace.final_state;
  rec.coins_agent1 = fin.agents.size() > 0 ? static_cast<int>(fin.collected_count(0)) : 0;
  rec.coins_agent2 = fin.agents.size() > 1 ? static_cast<int>(fin.collected_count(1)) : 0;
  rec.emergent = r.emergent;
  rec.chasing = r.chasing.detected;
  rec.blocking = r.blocking.detected;
  rec.terminal = r.joint_trace.terminal;
  return rec;
}

ControllerFactory team_for(const ExperimentConfig& cfg, const ScenarioSpec& scenario, std::uint64_t seed) {
  if (cfg.agent_type == AgentType::Tsp) return tsp_team(scenario, cfg.remediation, seed);
  return rl_factory(load_team(cfg.agent_file, seed));
}

std::vector<EmergenceReport> evaluate(const std::vector<BatchJob>& jobs, bool parallel) {
  return parallel ? evaluate_batch(jobs) : evaluate_batch_serial(jobs);
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory '" + dir + "'");
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

std::vector<double> steps_of(std::span<const RunRecord> records) {
  std::vector<double> v;
  for (const RunRecord& r : records) v.push_back(r.steps_total);
  return v;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  ExperimentResult result;
  if (cfg.seeds.empty()) return result;
  const ScenarioSpec scenario =
      configure_scenario(resolve_scenario(cfg.scenario), cfg.agent_type, cfg.remediation);
  std::vector<std::uint64_t> seeds = cfg.seeds;
  std::stable_sort(seeds.begin(), seeds.end());

  std::vector<BatchJob> jobs;
  for (std::uint64_t seed : seeds) jobs.push_back({scenario, team_for(cfg, scenario, seed)});
  result.reports = evaluate(jobs, cfg.parallel);
  for (std::size_t i = 0; i < seeds.size(); ++i)
    result.records.push_back(make_record(static_cast<int>(i), scenario.name, cfg.agent_type, cfg.remediation, seeds[i],
                                         result.reports[i]));

  if (!cfg.out_dir.empty()) {
    ensure_dir(cfg.out_dir);
    write_csv_file((fs::path(cfg.out_dir) / "runs.csv").string(), result.records);
    const std::string label = scenario.name + " " + to_string(cfg.agent_type) + " remediation " +
                              (cfg.remediation ? "on" : "off") + " steps";
    const auto steps = steps_of(result.records);
    write_text(fs::path(cfg.out_dir) / "summary.txt", whisker_summary(label, steps));
    const fs::path traces = fs::path(cfg.out_dir) / "traces";
    ensure_dir(traces.string());
    for (std::size_t i = 0; i < result.records.size(); ++i)
      save_trace((traces / ("run_" + std::to_string(i) + ".json")).string(), scenario, result.reports[i].joint_trace);
  }
  return result;
}

// ---------------------------------------------------------------------------
// Statistics

Stats stats(std::span<const double> values) {
  if (values.empty()) throw DomainError("stats of an empty list");
  Stats s;
  s.n = values.size();
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(s.n);
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.stddev = s.n > 1 ? std::sqrt(ss / static_cast<double>(s.n - 1)) : 0.0;
  const double half = 1.96 * s.stddev / std::sqrt(static_cast<double>(s.n));
  s.ci_lo = s.mean - half;
  s.ci_hi = s.mean + half;
  return s;
}

namespace {

double quantile(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

}  // namespace

std::string whisker_summary(std::string_view label, std::span<const double> values) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(2);
  out << label << '\n';
  if (values.empty()) {
    out << "  n=0\n";
    return out.str();
  }
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const Stats s = stats(values);
  out << "  n=" << s.n << " min=" << sorted.front() << " q1=" << quantile(sorted, 0.25)
      << " median=" << quantile(sorted, 0.5) << " q3=" << quantile(sorted, 0.75) << " max=" << sorted.back() << '\n';
  out << "  mean=" << s.mean << " sd=" << s.stddev << " ci95=(" << s.ci_lo << ", " << s.ci_hi << ")\n";
  return out.str();
}

// ---------------------------------------------------------------------------
// Sweep

std::vector<RunRecord> SweepSummary::records() const {
  std::vector<RunRecord> out;
  for (const SweepRow& r : rows) {
    out.push_back(r.baseline);
    out.push_back(r.remediated);
  }
  return out;
}

SweepSummary summarize_sweep(std::span<const RunRecord> records) {
  SweepSummary s;
  std::vector<double> base;
  std::vector<double> fix;
  for (const RunRecord& r : records) {
    (r.remediation ? fix : base).push_back(r.steps_total);
    if (r.emergent) ++(r.remediation ? s.emergent_remediated : s.emergent_baseline);
  }
  for (std::size_t i = 0; i + 1 < records.size(); i += 2) {
    SweepRow row;
    row.setting = static_cast<int>(i / 2);
    row.baseline = records[i];
    row.remediated = records[i + 1];
    row.seed = row.baseline.seed;
    row.n_coins = row.baseline.coins_agent1 + row.baseline.coins_agent2;
    s.rows.push_back(row);
  }
  if (!base.empty()) s.mean_steps_baseline = stats(base).mean;
  if (!fix.empty()) s.mean_steps_remediated = stats(fix).mean;
  s.mean_reduction = s.mean_steps_baseline - s.mean_steps_remediated;
  return s;
}

SweepSummary sweep_coin_settings(const ExperimentConfig& cfg) {
  if (!cfg.sweep) throw ValidationError("sweep settings missing");
  const SweepConfig& sw = *cfg.sweep;
  if (sw.n_settings < 1) throw ValidationError("sweep needs at least one setting");
  const std::uint64_t base_seed = cfg.seeds.empty() ? 0 : *std::min_element(cfg.seeds.begin(), cfg.seeds.end());
  const auto settings = coin_sweep_settings(sw.n_settings, sw.coins_min, sw.coins_max, base_seed);

  std::vector<BatchJob> jobs;
  std::vector<ScenarioSpec> configured;
  for (std::size_t k = 0; k < settings.size(); ++k) {
    const std::uint64_t seed = base_seed + k;
    for (bool remediated : {false, true}) {
      ExperimentConfig c = cfg;
      c.remediation = remediated;
      ScenarioSpec s = configure_scenario(settings[k], cfg.agent_type, remediated);
      s.name = settings[k].name + "_" + std::to_string(k);
      jobs.push_back({s, team_for(c, s, seed)});
      configured.push_back(std::move(s));
    }
  }
  const auto reports = evaluate(jobs, cfg.parallel);

  std::vector<RunRecord> records;
  for (std::size_t j = 0; j < jobs.size(); ++j)
    records.push_back(make_record(static_cast<int>(j), configured[j].name, cfg.agent_type, j % 2 == 1,
                                  base_seed + j / 2, reports[j]));
  SweepSummary summary = summarize_sweep(records);
  for (std::size_t k = 0; k < summary.rows.size(); ++k)
    summary.rows[k].n_coins = static_cast<int>(settings[k].targets.size());

  if (!cfg.out_dir.empty()) {
    ensure_dir(cfg.out_dir);
    write_csv_file((fs::path(cfg.out_dir) / "sweep.csv").string(), records);
    std::vector<double> base;
    std::vector<double> fix;
    for (const SweepRow& r : summary.rows) {
      base.push_back(r.baseline.steps_total);
      fix.push_back(r.remediated.steps_total);
    }
    std::ostringstream text;
    text << whisker_summary("baseline steps", base) << whisker_summary("remediated steps", fix);
    text << std::fixed << std::setprecision(2) << "emergent settings: baseline " << summary.emergent_baseline << "/"
         << summary.rows.size() << ", remediated " << summary.emergent_remediated << "/" << summary.rows.size()
         << "\nmean step reduction: " << summary.mean_reduction << '\n';
    write_text(fs::path(cfg.out_dir) / "sweep_summary.txt", text.str());
  }
  return summary;
}

// ---------------------------------------------------------------------------
// CSV

const char* const kCsvHeader =
    "run_id,scenario,agent_type,remediation,seed,steps_total,coins_agent1,coins_agent2,emergent,chasing,blocking,"
    "terminal";

namespace {

std::string quote(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

const char* flag(bool b) { return b ? "true" : "false"; }

/// Splits one CSV record; quoted fields may span lines.
bool read_record(std::istream& in, std::vector<std::string>& fields, int& line) {
  fields.clear();
  if (in.peek() == std::char_traits<char>::eof()) return false;
  std::string field;
  bool quoted = false;
  char c;
  while (in.get(c)) {
    if (quoted) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get(c);
          field += '"';
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line;
        field += c;
      }
    } else if (c == '"' && field.empty()) {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else if (c == '\n') {
      ++line;
      break;
    } else if (c != '\r') {
      field += c;
    }
  }
  if (quoted) throw ParseError(line, 0, "unterminated quoted CSV field");
  fields.push_back(std::move(field));
  return true;
}

bool parse_flag(const std::string& s, int line) {
  if (s == "true") return true;
  if (s == "false") return false;
  throw ParseError(line, 0, "expected true or false, got '" + s + "'");
}

template <typename T>
T parse_number(const std::string& s, int line) {
  T v{};
  std::istringstream is(s);
  if (!(is >> v) || !is.eof()) throw ParseError(line, 0, "expected a number, got '" + s + "'");
  return v;
}

Terminal terminal_from_string(const std::string& s, int line) {
  for (Terminal t : {Terminal::NotTerminal, Terminal::AllTargetsCollected, Terminal::StepBudgetExhausted})
    if (to_string(t) == s) return t;
  throw ParseError(line, 0, "unknown terminal reason '" + s + "'");
}

}  // namespace

void write_csv(std::ostream& out, std::span<const RunRecord> records) {
  out << kCsvHeader << '\n';
  for (const RunRecord& r : records) {
    out << r.run_id << ',' << quote(r.scenario) << ',' << to_string(r.agent_type) << ','
        << (r.remediation ? "on" : "off") << ',' << r.seed << ',' << r.steps_total << ',' << r.coins_agent1 << ','
        << r.coins_agent2 << ',' << flag(r.emergent) << ',' << flag(r.chasing) << ',' << flag(r.blocking) << ','
        << to_string(r.terminal) << '\n';
  }
}

std::vector<RunRecord> read_csv(std::istream& in) {
  std::vector<std::string> f;
  int line = 1;
  if (!read_record(in, f, line)) throw ParseError(1, 0, "missing CSV header");
  std::string header;
  for (std::size_t i = 0; i < f.size(); ++i) header += (i ? "," : "") + f[i];
  if (header != kCsvHeader) throw ParseError(1, 0, "unexpected CSV header");
  std::vector<RunRecord> records;
  while (true) {
    const int at = line;
    if (!read_record(in, f, line)) break;
    if (f.size() == 1 && f[0].empty()) continue;
    if (f.size() != 12) throw ParseError(at, 0, "expected 12 fields, got " + std::to_string(f.size()));
    RunRecord r;
    r.run_id = parse_number<int>(f[0], at);
    r.scenario = f[1];
    try {
      r.agent_type = agent_type_from_string(f[2]);
    } catch (const ValidationError& e) {
      throw ParseError(at, 0, e.what());
    }
    if (f[3] != "on" && f[3] != "off") throw ParseError(at, 0, "remediation must be on or off");
    r.remediation = f[3] == "on";
    r.seed = parse_number<std::uint64_t>(f[4], at);
    r.steps_total = parse_number<int>(f[5], at);
    r.coins_agent1 = parse_number<int>(f[6], at);
    r.coins_agent2 = parse_number<int>(f[7], at);
    r.emergent = parse_flag(f[8], at);
    r.chasing = parse_flag(f[9], at);
    r.blocking = parse_flag(f[10], at);
    r.terminal = terminal_from_string(f[11], at);
    records.push_back(std::move(r));
  }
  return records;
}

void write_csv_file(const std::string& path, std::span<const RunRecord> records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  write_csv(out, records);
  if (!out) throw IoError("write failed for '" + path + "'");
}

std::vector<RunRecord> read_csv_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read '" + path + "'");
  return read_csv(in);
}

// ---------------------------------------------------------------------------
// Traces

std::string trace_to_json(const ScenarioSpec& scenario, const EpisodeTrace& trace) {
  nlohmann::json j;
  j["format"] = "gridsafe-trace";
  j["version"] = 1;
  j["scenario"] = serialize_scenario(scenario);
  nlohmann::json actions = nlohmann::json::array();
  for (const TraceStep& st : trace.steps) {
    std::string joint;
    for (Action a : st.actions) joint += action_symbol(a);
    actions.push_back(joint);
  }
  j["actions"] = std::move(actions);
  j["steps_total"] = trace.length();
  j["terminal"] = to_string(trace.terminal);
  return j.dump(1) + "\n";
}

StoredTrace trace_from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(std::string("trace is not valid JSON: ") + e.what());
  }
  try {
    if (j.at("format").get<std::string>() != "gridsafe-trace" || j.at("version").get<int>() != 1)
      throw ValidationError("unsupported trace format");
    StoredTrace t;
    t.scenario = parse_scenario(j.at("scenario").get<std::string>());
    for (const auto& a : j.at("actions")) {
      const std::string joint = a.get<std::string>();
      if (static_cast<int>(joint.size()) != t.scenario.num_agents())
        throw ValidationError("trace step has " + std::to_string(joint.size()) + " actions for " +
                              std::to_string(t.scenario.num_agents()) + " agents");
      JointAction ja;
      for (char c : joint) ja.push_back(action_from_symbol(c));
      t.actions.push_back(std::move(ja));
    }
    t.steps_total = j.at("steps_total").get<int>();
    t.terminal = j.at("terminal").get<std::string>();
    if (t.steps_total != static_cast<int>(t.actions.size())) throw ValidationError("trace step count mismatch");
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed trace: ") + e.what());
  }
}

void save_trace(const std::string& path, const ScenarioSpec& scenario, const EpisodeTrace& trace) {
  write_text(path, trace_to_json(scenario, trace));
}

StoredTrace load_trace(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read trace '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return trace_from_json(buf.str());
}

std::vector<std::string> replay_frames(const StoredTrace& trace) {
  const RewardModel rewards(trace.scenario.reward_mode);
  GridState state = reset(trace.scenario);
  std::vector<std::string> frames{render_ascii(state)};
  for (const JointAction& a : trace.actions) {
    if (is_terminal(state) != Terminal::NotTerminal) throw ValidationError("trace continues past a terminal state");
    state = step(state, a, rewards).next;
    frames.push_back(render_ascii(state));
  }
  return frames;
}

}  // namespace gridsafe
