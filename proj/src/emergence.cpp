#include "gridsafe/emergence.hpp"

#include <sstream>

#include "gridsafe/scenarios.hpp"

namespace gridsafe {

namespace {

bool shares_targets(const ScenarioSpec& s) {
  for (const Target& t : s.targets)
    if (!t.owner) return true;
  return false;
}

}  // namespace

SpecPredicate global_spec(const ScenarioSpec& scenario) {
  const int n = scenario.num_agents();
  // Requiring a contribution from everyone only makes sense when the pool is
  // shared and large enough to split.
  const bool cooperate = n > 1 && shares_targets(scenario) && static_cast<int>(scenario.targets.size()) >= n;
  SpecPredicate spec;
  spec.kind = SpecKind::Global;
  spec.description = cooperate ? "all targets collected within budget, each agent collecting at least one"
                               : "all targets collected within budget";
  spec.predicate = [cooperate, n](const EpisodeTrace& trace) {
    if (trace.terminal != Terminal::AllTargetsCollected) return false;
    if (!cooperate) return true;
    for (int i = 0; i < n; ++i)
      if (trace.final_state.collected_count(i) == 0) return false;
    return true;
  };
  return spec;
}

SpecPredicate local_spec(const ScenarioSpec& scenario, int agent) {
  if (agent < 0 || agent >= scenario.num_agents()) throw ContractError("local_spec: agent index out of range");
  SpecPredicate spec;
  spec.kind = SpecKind::Local;
  spec.agent = agent;
  spec.description = "agent " + std::to_string(agent + 1) + " collects all of its targets alone within budget";
  spec.predicate = [](const EpisodeTrace& solo) { return solo.terminal == Terminal::AllTargetsCollected; };
  return spec;
}

std::string to_string(Pattern p) { return p == Pattern::Chasing ? "chasing" : "blocking"; }

namespace {

const GridState& state_after(const EpisodeTrace& trace, std::size_t k) {
  return k + 1 < trace.steps.size() ? trace.steps[k + 1].state : trace.final_state;
}

}  // namespace

PatternMatch detect_chasing(const EpisodeTrace& trace, int k) {
  PatternMatch m;
  const std::size_t T = trace.steps.size();
  const int n = static_cast<int>(trace.final_state.agents.size());
  if (n < 2 || T == 0 || k < 1) return m;
  for (int i = 0; i < n; ++i) {
    if (trace.final_state.collected_count(i) != 0) continue;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      // Maximal runs of steps ending with i close to j.
      std::size_t t = 0;
      while (t < T) {
        auto close = [&](std::size_t s) {
          const GridState& after = state_after(trace, s);
          return manhattan(after.agents[static_cast<std::size_t>(i)], after.agents[static_cast<std::size_t>(j)]) <= 2;
        };
        if (!close(t)) {
          ++t;
          continue;
        }
        std::size_t end = t;
        while (end + 1 < T && close(end + 1)) ++end;
        const std::size_t len = end - t + 1;
        const std::size_t before = trace.steps[t].state.collected_count(j);
        const std::size_t after = state_after(trace, end).collected_count(j);
        if (len >= static_cast<std::size_t>(k) && after > before) {
          m.detected = true;
          m.agent = i;
          for (std::size_t s = t; s <= end; ++s) m.steps.push_back(static_cast<int>(s) + 1);
          return m;
        }
        t = end + 1;
      }
    }
  }
  return m;
}

PatternMatch detect_blocking(const EpisodeTrace& trace, int j) {
  PatternMatch m;
  const int T = trace.length();
  if (j < 1 || T < j || trace.final_state.targets.empty()) return m;
  if (trace.final_state.agents.size() < 2) return m;
  for (int s = T - j; s < T; ++s) {
    const TraceStep& st = trace.steps[static_cast<std::size_t>(s)];
    const GridState& after = state_after(trace, static_cast<std::size_t>(s));
    if (st.state.agents != after.agents) return m;
    for (const EventSet& e : st.events)
      if (!e.has(Event::BlockedByAgent)) return m;
  }
  m.detected = true;
  for (int s = T - j; s < T; ++s) m.steps.push_back(s + 1);
  return m;
}

std::vector<Pattern> EmergenceReport::detectors() const {
  std::vector<Pattern> out;
  if (chasing.detected) out.push_back(Pattern::Chasing);
  if (blocking.detected) out.push_back(Pattern::Blocking);
  return out;
}

EmergenceReport make_report(std::vector<bool> local_results, bool joint_global, EpisodeTrace joint_trace,
                            std::vector<EpisodeTrace> solo_traces, DetectorWindows windows) {
  EmergenceReport r;
  r.local_results = std::move(local_results);
  r.joint_global = joint_global;
  r.joint_local_conjunction = true;
  for (bool b : r.local_results) r.joint_local_conjunction = r.joint_local_conjunction && b;
  r.emergent = r.joint_global != r.joint_local_conjunction;
  r.chasing = detect_chasing(joint_trace, windows.chasing);
  r.blocking = detect_blocking(joint_trace, windows.blocking);
  r.joint_trace = std::move(joint_trace);
  r.solo_traces = std::move(solo_traces);
  return r;
}

EmergenceReport detect_emergence(const ScenarioSpec& scenario, const ControllerFactory& agents,
                                 DetectorWindows windows) {
  validate_scenario(scenario);
  std::vector<bool> locals;
  std::vector<EpisodeTrace> solos;
  for (int i = 0; i < scenario.num_agents(); ++i) {
    EpisodeTrace solo = run_solo(scenario, i, agents);
    locals.push_back(local_spec(scenario, i)(solo));
    solos.push_back(std::move(solo));
  }
  EpisodeTrace joint = run_joint(scenario, agents);
  const bool global = global_spec(scenario)(joint);
  return make_report(std::move(locals), global, std::move(joint), std::move(solos), windows);
}

std::string describe(const EmergenceReport& r) {
  std::ostringstream out;
  out << "local specs (solo):";
  for (std::size_t i = 0; i < r.local_results.size(); ++i)
    out << " agent" << i + 1 << '=' << (r.local_results[i] ? "true" : "false");
  out << "\nglobal spec (joint): " << (r.joint_global ? "true" : "false") << "\nemergent: "
      << (r.emergent ? "true" : "false") << '\n';
  auto window = [&](const char* name, const PatternMatch& m) {
    out << name << ": " << (m.detected ? "detected" : "not detected");
    if (m.detected && !m.steps.empty()) out << " (steps " << m.steps.front() << "-" << m.steps.back() << ')';
    out << '\n';
  };
  window("chasing", r.chasing);
  window("blocking", r.blocking);
  return out.str();
}

}  // namespace gridsafe
