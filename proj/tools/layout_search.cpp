// Exhaustive search for canonical layouts satisfying the scenario constraints.
// The results are frozen in src/layouts.cpp; this tool documents how they were found.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <numeric>
#include <set>
#include <string>

#include "gridsafe/emergence.hpp"
#include "gridsafe/engine.hpp"
#include "gridsafe/observation.hpp"
#include "gridsafe/planner.hpp"
#include "gridsafe/rollout.hpp"
#include "gridsafe/scenarios.hpp"

using namespace gridsafe;

namespace {

struct CoinRun {
  int steps;
  std::size_t coins1;
  std::size_t coins2;
  Terminal terminal;
  std::vector<Position> got1;
};

struct Shapes {
  TieBreak a1;
  TieBreak a2;
};

ControllerFactory coin_team(bool remediated, Shapes shapes) {
  PlannerOptions a1;
  PlannerOptions a2;
  a1.tie_break = remediated ? TieBreak::Lexicographic : TieBreak::BottomRight;
  a1.route_tie = shapes.a1;
  a2.route_tie = shapes.a2;
  return tsp_factory({a1, a2});
}

ScenarioSpec coin_mode(const ScenarioSpec& spec, bool remediated) {
  ScenarioSpec s = spec;
  s.reward_mode = remediated ? RewardMode::CoinGradient : RewardMode::Base;
  return s;
}

CoinRun run_coins(const ScenarioSpec& spec, bool remediated, Shapes shapes) {
  const auto trace = run_joint(coin_mode(spec, remediated), coin_team(remediated, shapes));
  return {trace.length(), trace.final_state.collected_count(0), trace.final_state.collected_count(1), trace.terminal,
          trace.final_state.collected[0]};
}

const char* shape_name(TieBreak t) { return t == TieBreak::Lexicographic ? "lex" : "br"; }

/// Searches square rooms for an arc, spawns and a 5-coin subset (both arc
/// ends included) meeting the canonical constraints, then scores the
/// randomized sweep on each hit.
int coin_search(int size, int rmin, int rmax) {
  int found = 0;
  long tried = 0;
  long baseline_ok = 0;
  const Shapes all_shapes[] = {{TieBreak::Lexicographic, TieBreak::Lexicographic},
                               {TieBreak::BottomRight, TieBreak::Lexicographic},
                               {TieBreak::Lexicographic, TieBreak::BottomRight},
                               {TieBreak::BottomRight, TieBreak::BottomRight}};
  for (int r = rmin; r <= rmax; ++r)
    for (int cy = 1; cy <= size; ++cy)
      for (int cx = 1; cx <= size; ++cx) {
        if (cx + r > size || cy - r < 1) continue;
        CoinQuadrantLayout base{size, size, {cx, cy}, r, {1, 1}, {1, 1}};
        const auto arc = quarter_circle_arc(base);
        if (arc.size() < 12) continue;
        const std::set<Position> arc_set(arc.begin(), arc.end());
        const Position ul = arc.front();
        const Position br = arc.back();
        for (int a1y = 1; a1y <= size; ++a1y)
          for (int a1x = 1; a1x <= size; ++a1x) {
            const Position a1{a1x, a1y};
            if (arc_set.count(a1) || manhattan(a1, ul) != manhattan(a1, br)) continue;
            for (int a2y = 1; a2y <= size; ++a2y)
              for (int a2x = a1x + 1; a2x <= size; ++a2x) {
                const Position a2{a2x, a2y};
                if (arc_set.count(a2) || manhattan(a1, br) - manhattan(a2, br) != 4) continue;
                CoinQuadrantLayout layout = base;
                layout.agent1 = a1;
                layout.agent2 = a2;
                for (std::size_t i1 = 1; i1 + 1 < arc.size(); ++i1)
                  for (std::size_t i2 = i1 + 1; i2 + 1 < arc.size(); ++i2)
                    for (std::size_t i3 = i2 + 1; i3 + 1 < arc.size(); ++i3) {
                      ScenarioSpec spec = build_coin_quadrant(5, layout);
                      spec.targets.clear();
                      std::vector<Position> coins;
                      for (auto idx : {std::size_t{0}, i1, i2, i3, arc.size() - 1}) {
                        spec.targets.push_back({arc[idx], std::nullopt});
                        coins.push_back(arc[idx]);
                      }
                      const auto g = build_cost_graph(spec.map, RewardModel(RewardMode::Base), a2, coins);
                      if (greedy_hamiltonian(g).route_length() != 20) continue;
                      for (const Shapes& sh : all_shapes) {
                        ++tried;
                        const auto b = run_coins(spec, false, sh);
                        if (b.steps != 20 || b.coins1 != 0 || b.coins2 != 5) continue;
                        const auto rep = detect_emergence(coin_mode(spec, false), coin_team(false, sh));
                        if (!rep.emergent || !rep.chasing.detected) continue;
                        ++baseline_ok;
                        const auto f = run_coins(spec, true, sh);
                        std::vector<Position> sorted = coins;
                        std::sort(sorted.begin(), sorted.end(), [](Position p, Position q) { return p.y < q.y; });
                        if (sorted[1].y == sorted[2].y) continue;  // "top two" must be well defined
                        const std::set<Position> top2{sorted[0], sorted[1]};
                        const std::set<Position> got1(f.got1.begin(), f.got1.end());
                        if (f.coins1 != 2 || got1 != top2 || f.steps >= 20 ||
                            f.terminal != Terminal::AllTargetsCollected)
                          continue;
                        if (detect_emergence(coin_mode(spec, true), coin_team(true, sh)).emergent) continue;
                        int emergent = 0;
                        double sum_base = 0;
                        double sum_fix = 0;
                        for (const auto& setting : coin_sweep_settings(20, 2, 12, 0, layout)) {
                          const auto rb = detect_emergence(coin_mode(setting, false), coin_team(false, sh));
                          const auto rf = detect_emergence(coin_mode(setting, true), coin_team(true, sh));
                          emergent += rb.emergent ? 1 : 0;
                          sum_base += rb.joint_trace.length();
                          sum_fix += rf.joint_trace.length();
                        }
                        const double reduction = (sum_base - sum_fix) / 20.0;
                        std::printf("size=%d c=(%d,%d) r=%d a1=%s a2=%s sub=%zu,%zu,%zu shapes=%s/%s fix_steps=%d "
                                    "sweep_emergent=%d reduction=%.2f%s\n",
                                    size, cx, cy, r, to_string(a1).c_str(), to_string(a2).c_str(), i1, i2, i3,
                                    shape_name(sh.a1), shape_name(sh.a2), f.steps, emergent, reduction,
                                    emergent >= 12 && reduction >= 4 ? " OK" : "");
                        ++found;
                      }
                    }
              }
          }
      }
  std::printf("tried=%ld baseline_ok=%ld\n", tried, baseline_ok);
  return found;
}

// ---------------------------------------------------------------------------
// Two rooms

/// Stationary shortest-path policy over (position, observed target): among the
/// optimal first moves it picks one by a hash of the state, modelling an
/// arbitrary converged learner.
class Follower : public Controller {
 public:
  Follower(int slot, Observer obs, std::uint64_t salt) : slot_(slot), obs_(std::move(obs)), salt_(salt) {}
  void reset(const GridState&) override { obs_.reset(); }
  Action act(const GridState& state) override {
    const auto o = obs_(state);
    if (!o) return idle_action(state, slot_);
    const Position pos = state.agents[static_cast<std::size_t>(slot_)];
    const auto dist = bfs_distances(state.map(), o->target());
    std::vector<Action> best;
    for (Action a : kActions) {
      const Position n = moved(pos, a);
      if (state.map().is_field(n) && dist[state.map().index(n)] == dist[state.map().index(pos)] - 1) best.push_back(a);
    }
    if (best.empty()) return idle_action(state, slot_);
    std::uint64_t h = salt_ ^ (static_cast<std::uint64_t>(pos.x) * 73856093u) ^ (static_cast<std::uint64_t>(pos.y) * 19349663u) ^
                      (static_cast<std::uint64_t>(o->target_x) * 83492791u) ^ (static_cast<std::uint64_t>(o->target_y) * 2654435761u);
    h ^= h >> 29;
    h *= 0xbf58476d1ce4e5b9ULL;
    h ^= h >> 32;
    return best[h % best.size()];
  }

 private:
  int slot_;
  Observer obs_;
  std::uint64_t salt_;
};

EpisodeTrace run_followers(const ScenarioSpec& spec, ObservationMode mode, std::uint64_t salt) {
  std::vector<std::unique_ptr<Controller>> cs;
  for (int i = 0; i < spec.num_agents(); ++i)
    cs.push_back(std::make_unique<Follower>(i, Observer(i, mode, spec.auxiliary_target), salt * 31 + static_cast<std::uint64_t>(i)));
  return run_episode(spec, cs);
}

bool blocked_tail(const EpisodeTrace& t, int j) {
  if (t.terminal != Terminal::StepBudgetExhausted || t.length() < j) return false;
  for (int k = t.length() - j; k < t.length(); ++k) {
    const auto& st = t.steps[static_cast<std::size_t>(k)];
    for (const auto& e : st.events)
      if (!e.has(Event::BlockedByAgent)) return false;
  }
  return true;
}

struct ContortionStats {
  bool all_done = true;
  int done = 0;
  double mean = 0, sd = 0, width = 0;
};

ContortionStats contortion_stats(const ScenarioSpec& base, int reps) {
  ScenarioSpec spec = base;
  spec.reward_mode = RewardMode::TwoRoomsContortion;
  ContortionStats st;
  std::vector<double> v;
  for (int r = 0; r < reps; ++r) {
    PlannerOptions o1, o2;
    o1.tie_break = o2.tie_break = TieBreak::Random;
    o1.seed = static_cast<std::uint64_t>(2 * r);
    o2.seed = static_cast<std::uint64_t>(2 * r + 1);
    const auto t = run_joint(spec, tsp_factory({o1, o2}));
    if (t.terminal != Terminal::AllTargetsCollected) st.all_done = false; else ++st.done;
    v.push_back(t.length());
  }
  st.mean = std::accumulate(v.begin(), v.end(), 0.0) / reps;
  double ss = 0;
  for (double x : v) ss += (x - st.mean) * (x - st.mean);
  st.sd = reps > 1 ? std::sqrt(ss / (reps - 1)) : 0.0;
  st.width = 2 * 1.96 * st.sd / std::sqrt(static_cast<double>(reps));
  return st;
}

/// geom 1: wall in column 3 above the door row and column 5 below; 2: the
/// mirror. (A straight one-cell wall leaves three separating cells.)
std::string rooms_map(int w, int h, int yd, int geom, Position a1, Position a2, Position fa, Position fb) {
  std::string out;
  for (int y = 1; y <= h; ++y) {
    for (int x = 1; x <= w; ++x) {
      const Position p{x, y};
      char c = '.';
      const int wall_x = (y == yd) ? -1 : ((y < yd) == (geom == 1) ? 3 : 5);
      if (x == wall_x) c = '#';
      if (p == a1) c = '1';
      if (p == a2) c = '2';
      if (p == fa) c = 'a';
      if (p == fb) c = 'b';
      out += c;
    }
    if (y < h) out += '\n';
  }
  return out;
}

int stage[8] = {0};

int rooms_search(int wmin, int wmax, int hmin, int hmax, bool require_followers = true) {
  int found = 0;
  for (int w = wmin; w <= wmax; ++w)
    for (int h = hmin; h <= hmax; ++h)
      for (int yd = 2; yd < h; ++yd)
        for (int geom : {1, 2}) {
          const std::string empty = rooms_map(w, h, yd, geom, {0, 0}, {0, 0}, {0, 0}, {0, 0});
          const auto grid = build_two_rooms_from_map("1" + empty.substr(1, empty.size() - 2) + "2");
          const Grid& g = grid.map;
          const Position door{4, yd};
          const auto ddoor = bfs_distances(g, door);
          auto left = [&](Position p) { return p.y == yd ? p.x < 4 : p.x < (((p.y < yd) == (geom == 1)) ? 3 : 5); };
          std::vector<Position> lefts, rights;
          for (int y = 1; y <= h; ++y)
            for (int x = 1; x <= w; ++x) {
              const Position p{x, y};
              if (!g.is_field(p) || p == door) continue;
              (left(p) ? lefts : rights).push_back(p);
            }
          const Position aux{1, 1};
          const auto daux = bfs_distances(g, aux);
          for (Position a1 : lefts) {
            if (a1 == aux) continue;
            const auto d1 = bfs_distances(g, a1);
            for (Position a2 : rights) {
              if (ddoor[g.index(a1)] != ddoor[g.index(a2)]) continue;
              for (Position fa : rights) {
                if (fa == a2) continue;
                if (d1[g.index(fa)] != 11 || daux[g.index(a1)] + daux[g.index(fa)] != 13) continue;
                for (Position fb : lefts) {
                  if (fb == a1 || fb == aux) continue;
                  if (manhattan(a1, fa) != manhattan(a2, fb)) continue;
                  ++stage[0];
                  ScenarioSpec spec;
                  try {
                    spec = build_two_rooms_from_map(rooms_map(w, h, yd, geom, a1, a2, fa, fb));
                  } catch (const std::exception& e) {
                    continue;
                  }
                  const auto base = run_joint(spec, tsp_factory({PlannerOptions{}, PlannerOptions{}}));
                  if (!blocked_tail(base, 3) || base.length() != 30 || base.final_state.targets.size() != 2) continue;
                  ++stage[1];
                  // Converged-learner stand-ins with the detour observation.
                  bool ok = true;
                  int rl_base_block = 0;
                  for (std::uint64_t salt = 0; salt < 24 && ok; ++salt) {
                    const auto t = run_followers(spec, ObservationMode::AuxiliaryTarget, salt);
                    if (t.terminal != Terminal::AllTargetsCollected || t.length() != 13) ok = false;
                    const auto b = run_followers(spec, ObservationMode::Manhattan, salt);
                    if (blocked_tail(b, 3) && b.final_state.targets.size() == 2) ++rl_base_block;
                  }
                  if (!ok && require_followers) continue;
                  ++stage[2];
                  const auto st = contortion_stats(spec, 50);
                  if (!require_followers && st.width < 0.74) continue;
                  if (!st.all_done) { std::printf("  contortion fail w=%d h=%d yd=%d geom=%d a1=%s a2=%s fa=%s fb=%s done=%d mean=%.2f\n", w, h, yd, geom, to_string(a1).c_str(), to_string(a2).c_str(), to_string(fa).c_str(), to_string(fb).c_str(), st.done, st.mean); continue; }
                  ++stage[3];
                  std::printf("w=%d h=%d yd=%d geom=%d a1=%s a2=%s fa=%s fb=%s contortion mean=%.2f sd=%.2f ciw=%.2f rlbase=%d/24 followers13=%d\n", w, h,
                              yd, geom, to_string(a1).c_str(), to_string(a2).c_str(), to_string(fa).c_str(),
                              to_string(fb).c_str(), st.mean, st.sd, st.width, rl_base_block, ok ? 1 : 0);
                  ++found;
                }
              }
            }
          }
        }
  for (int i = 0; i < 4; ++i) std::printf("stage%d=%d\n", i, stage[i]);
  return found;
}

}  // namespace

int main(int argc, char** argv) {
  std::setvbuf(stdout, nullptr, _IOLBF, 0);
  const std::string mode = argc > 1 ? argv[1] : "coin";
  if (mode == "show") {
    // show W cx cy r a1x a1y a2x a2y i1 i2 i3 remediated shape1 shape2 (0 lex, 1 br)
    auto arg = [&](int i) { return std::stoi(argv[i]); };
    const int size = arg(2);
    CoinQuadrantLayout layout{size, size, {arg(3), arg(4)}, arg(5), {arg(6), arg(7)}, {arg(8), arg(9)}};
    const auto arc = quarter_circle_arc(layout);
    ScenarioSpec spec = build_coin_quadrant(5, layout);
    spec.targets.clear();
    for (auto idx : {0, arg(10), arg(11), arg(12), static_cast<int>(arc.size()) - 1})
      spec.targets.push_back({arc[static_cast<std::size_t>(idx)], std::nullopt});
    const bool fix = argc > 13 && arg(13) != 0;
    auto shape = [&](int i) { return argc > i && arg(i) != 0 ? TieBreak::BottomRight : TieBreak::Lexicographic; };
    const auto trace = run_joint(coin_mode(spec, fix), coin_team(fix, {shape(14), shape(15)}));
    for (std::size_t k = 0; k < trace.steps.size() && k < 30; ++k)
      std::printf("step %zu\n%s\n", k, render_ascii(trace.steps[k].state).c_str());
    std::printf("final\n%s\n", render_ascii(trace.final_state).c_str());
    return 0;
  }
  if (mode == "rshow") {
    // rshow w h yd geom a1x a1y a2x a2y fax fay fbx fby mode(0 base,1 contortion,2 aux followers) seed
    auto arg = [&](int i) { return std::stoi(argv[i]); };
    ScenarioSpec spec = build_two_rooms_from_map(rooms_map(arg(2), arg(3), arg(4), arg(5), {arg(6), arg(7)},
                                                           {arg(8), arg(9)}, {arg(10), arg(11)}, {arg(12), arg(13)}));
    const int m = arg(14);
    EpisodeTrace t;
    if (m == 2) {
      t = run_followers(spec, ObservationMode::AuxiliaryTarget, static_cast<std::uint64_t>(arg(15)));
    } else {
      if (m == 1) spec.reward_mode = RewardMode::TwoRoomsContortion;
      PlannerOptions o1, o2;
      if (m == 1) {
        o1.tie_break = o2.tie_break = TieBreak::Random;
        o1.seed = static_cast<std::uint64_t>(2 * arg(15));
        o2.seed = o1.seed + 1;
      }
      t = run_joint(spec, tsp_factory({o1, o2}));
    }
    for (std::size_t k = 0; k < t.steps.size(); ++k) std::printf("step %zu\n%s\n", k, render_ascii(t.steps[k].state).c_str());
    std::printf("final (%d steps, %s)\n%s\n", t.length(), to_string(t.terminal).c_str(), render_ascii(t.final_state).c_str());
    return 0;
  }
  if (mode == "rooms") {
    const bool followers = argc <= 6 || std::stoi(argv[6]) != 0;
    std::printf("found %d\n", rooms_search(std::stoi(argv[2]), std::stoi(argv[3]), std::stoi(argv[4]), std::stoi(argv[5]), followers));
    return 0;
  }
  if (mode == "coin") {
    const int size = argc > 2 ? std::stoi(argv[2]) : 12;
    const int rmin = argc > 3 ? std::stoi(argv[3]) : 5;
    const int rmax = argc > 4 ? std::stoi(argv[4]) : 10;
    std::printf("found %d\n", coin_search(size, rmin, rmax));
  }
  return 0;
}
