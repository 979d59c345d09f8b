#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "gridsafe/engine.hpp"
#include "gridsafe/rl.hpp"
#include "gridsafe/scenarios.hpp"

using namespace gridsafe;

namespace {

EpisodeBatch random_batch(std::mt19937_64& rng, std::size_t T) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  EpisodeBatch b;
  for (std::size_t t = 0; t < T; ++t) {
    b.features.push_back({u(rng), u(rng), u(rng), u(rng)});
    b.actions.push_back(kActions[rng() % 4]);
    b.rewards.push_back(t + 1 == T ? 49.0 : -1.0);
  }
  return b;
}

// Central finite differences of `loss` over every parameter of `net`.
template <typename F>
std::vector<double> numeric_gradient(Mlp net, F&& loss) {
  std::vector<double> flat = net.flatten();
  std::vector<double> g(flat.size());
  const double h = 1e-6;
  for (std::size_t i = 0; i < flat.size(); ++i) {
    const double keep = flat[i];
    flat[i] = keep + h;
    net.assign(flat);
    const double up = loss(net);
    flat[i] = keep - h;
    net.assign(flat);
    const double down = loss(net);
    flat[i] = keep;
    g[i] = (up - down) / (2 * h);
  }
  return g;
}

}  // namespace

TEST_CASE("softmax") {
  const std::vector<double> l{1.0, 2.0, 3.0, 4.0};
  const auto p = softmax(l);
  double sum = 0.0;
  for (double v : p) sum += v;
  CHECK(sum == doctest::Approx(1.0));
  CHECK(p[3] / p[2] == doctest::Approx(std::exp(1.0)));
  const std::vector<double> shifted{1001.0, 1002.0, 1003.0, 1004.0};
  const auto q = softmax(shifted);
  for (std::size_t k = 0; k < 4; ++k) CHECK(q[k] == doctest::Approx(p[k]));
  CHECK_THROWS_AS(softmax(std::vector<double>{1.0}), ShapeError);
  CHECK(argmax_action({0.1, 0.4, 0.4, 0.1}) == Action::Right);
}

TEST_CASE("monte carlo returns") {
  const std::vector<double> r{-1.0, -1.0, 49.0};
  const auto g = monte_carlo_returns(r, 0.5);
  CHECK(g[2] == 49.0);
  CHECK(g[1] == doctest::Approx(-1.0 + 0.5 * 49.0));
  CHECK(g[0] == doctest::Approx(-1.0 + 0.5 * g[1]));
  CHECK(monte_carlo_returns(r, 1.0)[0] == doctest::Approx(47.0));
}

TEST_CASE("observation encoding") {
  const auto f = encode_observation({1, 1, 5, 3}, 5, 3);
  CHECK(f == std::array<double, 4>{0.0, 0.0, 1.0, 1.0});
  CHECK(encode_observation({3, 1, 1, 1}, 5, 1)[0] == doctest::Approx(0.5));
  CHECK(encode_observation({3, 1, 1, 1}, 5, 1)[1] == 0.0);
}

TEST_CASE("mlp shapes and parameter round trip") {
  std::mt19937_64 rng(1);
  Mlp net = Mlp::glorot({4, 8, 3}, rng);
  CHECK(net.parameter_count() == 4 * 8 + 8 + 8 * 3 + 3);
  const auto flat = net.flatten();
  Mlp copy({4, 8, 3});
  copy.assign(flat);
  CHECK(copy == net);
  CHECK_THROWS_AS(copy.assign(std::vector<double>(3)), ShapeError);
  CHECK_THROWS_AS(net.forward(std::vector<double>(2)), ShapeError);
  CHECK_THROWS_AS(Mlp({4}), ShapeError);
  // Zero parameters give a zero output.
  CHECK(Mlp({4, 8, 3}).forward(std::vector<double>{1, 2, 3, 4}) == std::vector<double>(3, 0.0));
}

TEST_CASE("analytic A2C gradients match finite differences") {
  std::mt19937_64 rng(21);
  TrainConfig cfg;
  cfg.gamma = 0.9;
  cfg.entropy_coeff = 0.05;
  const Mlp policy = Mlp::glorot({4, 6, 5, 4}, rng);
  const Mlp value = Mlp::glorot({4, 6, 1}, rng);
  const EpisodeBatch batch = random_batch(rng, 7);

  const auto returns = monte_carlo_returns(batch.rewards, cfg.gamma);
  std::vector<double> adv(returns.size());
  for (std::size_t t = 0; t < returns.size(); ++t) adv[t] = returns[t] - value_forward(value, batch.features[t]);

  Mlp pg(policy.sizes());
  Mlp vg(value.sizes());
  const LossStats analytic = a2c_gradients(policy, value, batch, cfg, pg, vg);
  const LossStats direct = a2c_losses(policy, value, batch, returns, adv, cfg.entropy_coeff);
  CHECK(analytic.policy_loss == doctest::Approx(direct.policy_loss));
  CHECK(analytic.value_loss == doctest::Approx(direct.value_loss));
  CHECK(analytic.entropy == doctest::Approx(direct.entropy));

  const auto np = numeric_gradient(policy, [&](const Mlp& p) {
    return a2c_losses(p, value, batch, returns, adv, cfg.entropy_coeff).policy_loss;
  });
  const auto nv = numeric_gradient(value, [&](const Mlp& v) {
    return a2c_losses(policy, v, batch, returns, adv, cfg.entropy_coeff).value_loss;
  });
  const auto ap = pg.flatten();
  const auto av = vg.flatten();
  REQUIRE(ap.size() == np.size());
  REQUIRE(av.size() == nv.size());
  for (std::size_t i = 0; i < ap.size(); ++i) CHECK(ap[i] == doctest::Approx(np[i]).epsilon(1e-5).scale(1.0));
  for (std::size_t i = 0; i < av.size(); ++i) CHECK(av[i] == doctest::Approx(nv[i]).epsilon(1e-5).scale(1.0));

  EpisodeBatch bad = batch;
  bad.actions.pop_back();
  CHECK_THROWS_AS(a2c_gradients(policy, value, bad, cfg, pg, vg), ShapeError);
}

TEST_CASE("adam first step moves each parameter by the learning rate") {
  Mlp net({4, 2});
  Mlp grad({4, 2});
  std::vector<double> g(grad.parameter_count());
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = (i % 2 ? 1.0 : -1.0) * static_cast<double>(i + 1);
  grad.assign(g);
  Adam opt(net, 0.01);
  opt.step(net, grad);
  const auto after = net.flatten();
  for (std::size_t i = 0; i < after.size(); ++i) CHECK(after[i] == doctest::Approx(g[i] > 0 ? -0.01 : 0.01));
}

TEST_CASE("agent files round trip") {
  const ScenarioSpec rooms = build_two_rooms();
  TrainConfig cfg;
  cfg.hidden_sizes = {5, 3};
  cfg.seed = 4;
  std::vector<TrainedAgent> team;
  for (int i = 0; i < 2; ++i) {
    TrainedAgent a = init_agent(rooms, cfg);
    a.converged = i == 1;
    a.episodes_run = 100 + i;
    a.last_eval_return = 36.5;
    team.push_back(a);
  }
  std::stringstream ss;
  write_agents(ss, team, cfg);
  const auto back = read_agents(ss);
  REQUIRE(back.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(back[i].policy == team[i].policy);
    CHECK(back[i].value == team[i].value);
    CHECK(back[i].converged == team[i].converged);
    CHECK(back[i].episodes_run == team[i].episodes_run);
    CHECK(back[i].width == rooms.map.width());
  }

  std::istringstream wrong_magic("nonsense v1");
  CHECK_THROWS_AS(read_agents(wrong_magic), ValidationError);
  std::string text = ss.str();
  std::istringstream truncated(text.substr(0, text.size() / 2));
  CHECK_THROWS_AS(read_agents(truncated), ValidationError);
  CHECK_THROWS_AS(load_agents("/nonexistent/dir/agents.txt"), IoError);
}

TEST_CASE("optimal solo returns") {
  const ScenarioSpec line = parse_scenario("name: line\n\n1..$");
  // Undiscounted: d - 1 plain steps, then the goal step.
  CHECK(optimal_solo_return(line, 0, false) == doctest::Approx(47.0));
  const ScenarioSpec rooms = build_two_rooms();
  for (int agent = 0; agent < 2; ++agent) {
    const int d = bfs_distance(rooms.map, rooms.agent_spawns[static_cast<std::size_t>(agent)],
                               rooms.targets[static_cast<std::size_t>(agent)].pos);
    CHECK(optimal_solo_return(rooms, agent, false) == doctest::Approx(50.0 - d));
  }
  // The detour leg also pays the goal weight on reaching the aux cell.
  const int aux = bfs_distance(rooms.map, rooms.agent_spawns[0], *rooms.auxiliary_target);
  CHECK(optimal_solo_return(rooms, 0, true) > 50.0 - aux);
}

TEST_CASE("training converges on a small solo task") {
  const ScenarioSpec line = parse_scenario("name: line\n\n1...\n....\n...$");
  TrainConfig cfg;
  cfg.episodes = 3000;
  cfg.learning_rate = 1e-3;
  cfg.seed = 3;
  const TrainedAgent a = train_agent(line, 0, cfg);
  CHECK(a.converged);
  CHECK(a.episodes_run <= cfg.episodes);
  CHECK(greedy_solo_return(a, line, 0, false) == doctest::Approx(optimal_solo_return(line, 0, false)));
  // Deterministic given the seed.
  const TrainedAgent again = train_agent(line, 0, cfg);
  CHECK(again.policy == a.policy);

  TrainConfig bad = cfg;
  bad.eval_interval = 0;
  CHECK_THROWS_AS(train_agent(line, 0, bad), ValidationError);
  CHECK_THROWS_AS(train_agent(line, 1, cfg), ContractError);
}
