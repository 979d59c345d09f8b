#pragma once

#include <functional>
#include <string>
#include <vector>

#include "gridsafe/rollout.hpp"
#include "gridsafe/scenario_spec.hpp"
#include "gridsafe/types.hpp"

namespace gridsafe {

enum class SpecKind { Global, Local };

/// A boolean specification over episode traces.
struct SpecPredicate {
  SpecKind kind = SpecKind::Global;
  int agent = -1;  // Local only
  std::function<bool(const EpisodeTrace&)> predicate;
  std::string description;

  bool operator()(const EpisodeTrace& trace) const { return predicate(trace); }
};

/// Designer intent on the joint trace: every target is collected within the
/// budget, and when agents share a pool of targets each agent collects at
/// least one of them (no agent's effort is wasted).
SpecPredicate global_spec(const ScenarioSpec& scenario);

/// Approximated individual specification, evaluated on a solo trace: the agent
/// collects every target it may collect within the budget.
SpecPredicate local_spec(const ScenarioSpec& scenario, int agent);

enum class Pattern { Chasing, Blocking };

std::string to_string(Pattern p);

struct PatternMatch {
  bool detected = false;
  int agent = -1;               // the trailing agent for Chasing
  std::vector<int> steps;       // 1-based step numbers of the evidence window
};

/// Some agent collects nothing in the whole episode while ending each of at
/// least `k` consecutive steps within Manhattan distance 2 of another agent
/// that collects at least one target during that window.
PatternMatch detect_chasing(const EpisodeTrace& trace, int k = 5);

/// The last `j` steps leave every agent in place with BlockedByAgent events,
/// and targets remain.
PatternMatch detect_blocking(const EpisodeTrace& trace, int j = 3);

struct DetectorWindows {
  int chasing = 5;
  int blocking = 3;
};

struct EmergenceReport {
  std::vector<bool> local_results;
  bool joint_global = false;
  bool joint_local_conjunction = false;
  bool emergent = false;
  PatternMatch chasing;
  PatternMatch blocking;
  EpisodeTrace joint_trace;
  std::vector<EpisodeTrace> solo_traces;

  std::vector<Pattern> detectors() const;
};

/// Builds a report with emergent = (joint_global != conjunction of local results).
EmergenceReport make_report(std::vector<bool> local_results, bool joint_global, EpisodeTrace joint_trace,
                            std::vector<EpisodeTrace> solo_traces, DetectorWindows windows = {});

/// Runs each agent solo and all agents jointly, then applies the specifications
/// and the pattern detectors.
EmergenceReport detect_emergence(const ScenarioSpec& scenario, const ControllerFactory& agents,
                                 DetectorWindows windows = {});

/// Human-readable summary.
std::string describe(const EmergenceReport& report);

}  // namespace gridsafe
