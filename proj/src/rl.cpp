#include "gridsafe/rl.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include "gridsafe/engine.hpp"
#include "gridsafe/planner.hpp"
#include "gridsafe/scenarios.hpp"

namespace gridsafe {

// ---------------------------------------------------------------------------
// Network

Mlp::Mlp(std::vector<int> sizes, Activation act) : sizes_(std::move(sizes)), act_(act) {
  if (sizes_.size() < 2) throw ShapeError("network needs at least an input and an output layer");
  for (int s : sizes_)
    if (s < 1) throw ShapeError("layer sizes must be positive");
  for (std::size_t i = 0; i + 1 < sizes_.size(); ++i) {
    DenseLayer layer;
    layer.in = sizes_[i];
    layer.out = sizes_[i + 1];
    layer.weights.assign(static_cast<std::size_t>(layer.in * layer.out), 0.0);
    layer.bias.assign(static_cast<std::size_t>(layer.out), 0.0);
    layers_.push_back(std::move(layer));
  }
}

Mlp Mlp::glorot(std::vector<int> sizes, std::mt19937_64& rng, double output_gain) {
  Mlp net(std::move(sizes));
  for (std::size_t i = 0; i < net.layers_.size(); ++i) {
    DenseLayer& layer = net.layers_[i];
    double limit = std::sqrt(6.0 / (layer.in + layer.out));
    if (i + 1 == net.layers_.size()) limit *= output_gain;
    std::uniform_real_distribution<double> dist(-limit, limit);
    for (double& w : layer.weights) w = dist(rng);
  }
  return net;
}

std::vector<double> Mlp::forward(std::span<const double> input) const {
  Cache cache;
  return forward(input, cache);
}

std::vector<double> Mlp::forward(std::span<const double> input, Cache& cache) const {
  if (static_cast<int>(input.size()) != sizes_.front()) throw ShapeError("input size does not match network");
  cache.activations.resize(layers_.size() + 1);
  cache.activations[0].assign(input.begin(), input.end());
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const DenseLayer& layer = layers_[l];
    const std::vector<double>& x = cache.activations[l];
    std::vector<double>& y = cache.activations[l + 1];
    y.assign(static_cast<std::size_t>(layer.out), 0.0);
    for (int o = 0; o < layer.out; ++o) {
      const double* row = layer.weights.data() + static_cast<std::size_t>(o * layer.in);
      double sum = layer.bias[static_cast<std::size_t>(o)];
      for (int i = 0; i < layer.in; ++i) sum += row[i] * x[static_cast<std::size_t>(i)];
      y[static_cast<std::size_t>(o)] = (l + 1 < layers_.size()) ? std::tanh(sum) : sum;
    }
  }
  return cache.activations.back();
}

void Mlp::backward(const Cache& cache, std::span<const double> grad_output, Mlp& grad) const {
  if (grad.sizes_ != sizes_) throw ShapeError("gradient network shape mismatch");
  if (static_cast<int>(grad_output.size()) != sizes_.back()) throw ShapeError("output gradient size mismatch");
  std::vector<double> delta(grad_output.begin(), grad_output.end());
  for (std::size_t l = layers_.size(); l-- > 0;) {
    const DenseLayer& layer = layers_[l];
    DenseLayer& g = grad.layers_[l];
    const std::vector<double>& x = cache.activations[l];
    for (int o = 0; o < layer.out; ++o) {
      const double d = delta[static_cast<std::size_t>(o)];
      double* grow = g.weights.data() + static_cast<std::size_t>(o * layer.in);
      for (int i = 0; i < layer.in; ++i) grow[i] += d * x[static_cast<std::size_t>(i)];
      g.bias[static_cast<std::size_t>(o)] += d;
    }
    if (l == 0) break;
    std::vector<double> prev(static_cast<std::size_t>(layer.in), 0.0);
    for (int o = 0; o < layer.out; ++o) {
      const double d = delta[static_cast<std::size_t>(o)];
      const double* row = layer.weights.data() + static_cast<std::size_t>(o * layer.in);
      for (int i = 0; i < layer.in; ++i) prev[static_cast<std::size_t>(i)] += row[i] * d;
    }
    for (std::size_t i = 0; i < prev.size(); ++i) prev[i] *= 1.0 - x[i] * x[i];  // tanh'
    delta = std::move(prev);
  }
}

std::size_t Mlp::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers_) n += l.weights.size() + l.bias.size();
  return n;
}

std::vector<double> Mlp::flatten() const {
  std::vector<double> flat;
  flat.reserve(parameter_count());
  for (const auto& l : layers_) {
    flat.insert(flat.end(), l.weights.begin(), l.weights.end());
    flat.insert(flat.end(), l.bias.begin(), l.bias.end());
  }
  return flat;
}

void Mlp::assign(std::span<const double> flat) {
  if (flat.size() != parameter_count()) throw ShapeError("parameter vector size mismatch");
  std::size_t k = 0;
  for (auto& l : layers_) {
    for (double& w : l.weights) w = flat[k++];
    for (double& b : l.bias) b = flat[k++];
  }
}

bool Mlp::all_finite() const {
  for (const auto& l : layers_) {
    for (double w : l.weights)
      if (!std::isfinite(w)) return false;
    for (double b : l.bias)
      if (!std::isfinite(b)) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Policy helpers

std::array<double, 4> encode_observation(const Observation& obs, int width, int height) {
  auto scale = [](int v, int extent) { return extent > 1 ? static_cast<double>(v - 1) / (extent - 1) : 0.0; };
  return {scale(obs.agent_x, width), scale(obs.agent_y, height), scale(obs.target_x, width),
          scale(obs.target_y, height)};
}

std::array<double, 4> softmax(std::span<const double> logits) {
  if (logits.size() != 4) throw ShapeError("softmax expects four logits");
  const double m = *std::max_element(logits.begin(), logits.end());
  std::array<double, 4> p{};
  double sum = 0.0;
  for (std::size_t k = 0; k < 4; ++k) sum += p[k] = std::exp(logits[k] - m);
  for (double& v : p) v /= sum;
  return p;
}

namespace {

std::array<double, 4> log_softmax(std::span<const double> logits) {
  const double m = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (double l : logits) sum += std::exp(l - m);
  const double lse = m + std::log(sum);
  std::array<double, 4> out{};
  for (std::size_t k = 0; k < 4; ++k) out[k] = logits[k] - lse;
  return out;
}

}  // namespace

std::array<double, 4> policy_forward(const Mlp& policy, std::span<const double> features) {
  return softmax(policy.forward(features));
}

double value_forward(const Mlp& value, std::span<const double> features) { return value.forward(features).at(0); }

Action argmax_action(const std::array<double, 4>& probs) {
  return kActions[static_cast<std::size_t>(std::max_element(probs.begin(), probs.end()) - probs.begin())];
}

// ---------------------------------------------------------------------------
// A2C

std::vector<double> monte_carlo_returns(std::span<const double> rewards, double gamma) {
  std::vector<double> g(rewards.size());
  double acc = 0.0;
  for (std::size_t t = rewards.size(); t-- > 0;) g[t] = acc = rewards[t] + gamma * acc;
  return g;
}

LossStats a2c_losses(const Mlp& policy, const Mlp& value, const EpisodeBatch& batch, std::span<const double> returns,
                     std::span<const double> advantages, double entropy_coeff) {
  LossStats s;
  const std::size_t T = batch.features.size();
  if (T == 0) return s;
  for (std::size_t t = 0; t < T; ++t) {
    const auto logp = log_softmax(policy.forward(batch.features[t]));
    double h = 0.0;
    for (double lp : logp) h -= std::exp(lp) * lp;
    const double v = value_forward(value, batch.features[t]);
    s.policy_loss -= advantages[t] * logp[static_cast<std::size_t>(batch.actions[t])] + entropy_coeff * h;
    s.value_loss += 0.5 * (returns[t] - v) * (returns[t] - v);
    s.entropy += h;
  }
  s.policy_loss /= static_cast<double>(T);
  s.value_loss /= static_cast<double>(T);
  s.entropy /= static_cast<double>(T);
  return s;
}

LossStats a2c_gradients(const Mlp& policy, const Mlp& value, const EpisodeBatch& batch, const TrainConfig& cfg,
                        Mlp& policy_grad, Mlp& value_grad) {
  LossStats s;
  const std::size_t T = batch.features.size();
  if (batch.actions.size() != T || batch.rewards.size() != T) throw ShapeError("episode batch fields differ in length");
  if (T == 0) return s;
  const std::vector<double> returns = monte_carlo_returns(batch.rewards, cfg.gamma);
  const double inv_t = 1.0 / static_cast<double>(T);
  Mlp::Cache pc;
  Mlp::Cache vc;
  for (std::size_t t = 0; t < T; ++t) {
    const std::vector<double> logits = policy.forward(batch.features[t], pc);
    const double v = value.forward(batch.features[t], vc)[0];
    const double adv = returns[t] - v;
    const auto logp = log_softmax(logits);
    std::array<double, 4> p{};
    double h = 0.0;
    for (std::size_t k = 0; k < 4; ++k) {
      p[k] = std::exp(logp[k]);
      h -= p[k] * logp[k];
    }
    const auto a = static_cast<std::size_t>(batch.actions[t]);
    // d/dl_k of -(A log p_a + beta H): -A (1[k=a] - p_k) - beta (-p_k (log p_k + H))
    std::array<double, 4> dl{};
    for (std::size_t k = 0; k < 4; ++k) {
      const double dlogp = (k == a ? 1.0 : 0.0) - p[k];
      const double dh = -p[k] * (logp[k] + h);
      dl[k] = -(adv * dlogp + cfg.entropy_coeff * dh) * inv_t;
    }
    policy.backward(pc, dl, policy_grad);
    const double dv = (v - returns[t]) * inv_t;
    value.backward(vc, std::span<const double>(&dv, 1), value_grad);

    s.policy_loss -= (adv * logp[a] + cfg.entropy_coeff * h) * inv_t;
    s.value_loss += 0.5 * adv * adv * inv_t;
    s.entropy += h * inv_t;
  }
  return s;
}

Adam::Adam(const Mlp& net, double learning_rate)
    : lr_(learning_rate), m_(net.parameter_count(), 0.0), v_(net.parameter_count(), 0.0) {}

void Adam::step(Mlp& net, const Mlp& grad) {
  constexpr double beta1 = 0.9;
  constexpr double beta2 = 0.999;
  constexpr double eps = 1e-8;
  ++t_;
  const double c1 = 1.0 - std::pow(beta1, t_);
  const double c2 = 1.0 - std::pow(beta2, t_);
  std::size_t k = 0;
  auto update = [&](std::vector<double>& params, const std::vector<double>& g) {
    for (std::size_t i = 0; i < params.size(); ++i, ++k) {
      m_[k] = beta1 * m_[k] + (1.0 - beta1) * g[i];
      v_[k] = beta2 * v_[k] + (1.0 - beta2) * g[i] * g[i];
      params[i] -= lr_ * (m_[k] / c1) / (std::sqrt(v_[k] / c2) + eps);
    }
  };
  for (std::size_t l = 0; l < net.layers().size(); ++l) {
    update(net.layers()[l].weights, grad.layers()[l].weights);
    update(net.layers()[l].bias, grad.layers()[l].bias);
  }
}

LossStats a2c_episode_update(TrainedAgent& agent, Adam& policy_opt, Adam& value_opt, const EpisodeBatch& batch,
                             const TrainConfig& cfg) {
  Mlp pg(agent.policy.sizes());
  Mlp vg(agent.value.sizes());
  const LossStats s = a2c_gradients(agent.policy, agent.value, batch, cfg, pg, vg);
  if (!pg.all_finite() || !vg.all_finite()) throw NumericError("non-finite gradient during A2C update");
  policy_opt.step(agent.policy, pg);
  value_opt.step(agent.value, vg);
  return s;
}

// ---------------------------------------------------------------------------
// Training

namespace {

std::vector<int> layer_sizes(const TrainConfig& cfg, int outputs) {
  std::vector<int> sizes{4};
  sizes.insert(sizes.end(), cfg.hidden_sizes.begin(), cfg.hidden_sizes.end());
  sizes.push_back(outputs);
  return sizes;
}

// The left agent practises the detour whenever the scenario defines an aux
// cell, so one trained team serves both baseline and remediated evaluation.
bool is_detour_agent(const ScenarioSpec& spec, int agent) {
  return spec.auxiliary_target && spec.num_agents() > 1 && agent == 0;
}

/// Observer for a solo episode. Normal episodes never trigger the detour
/// (in a solo run the equal-distance condition would hold trivially); detour
/// episodes start with the aux cell as target.
Observer solo_observer(const ScenarioSpec& spec, bool detour) {
  if (!detour) {
    const ObservationMode mode =
        spec.observation_mode == ObservationMode::AuxiliaryTarget ? ObservationMode::Manhattan : spec.observation_mode;
    return Observer(0, mode, std::nullopt);
  }
  Observer obs(0, ObservationMode::AuxiliaryTarget, spec.auxiliary_target);
  obs.set_latch(AuxLatch::Active);
  return obs;
}

/// Solo episode. `policy_action` maps features to an action. Reaching the
/// aux cell while it is the observed target pays the goal weight.
template <typename Choose>
EpisodeBatch solo_episode(const ScenarioSpec& solo, const RewardModel& rewards, bool detour, const TrainedAgent& agent,
                          Choose&& choose) {
  EpisodeBatch batch;
  GridState state = reset(solo);
  Observer observer = solo_observer(solo, detour);
  while (is_terminal(state) == Terminal::NotTerminal) {
    const auto obs = observer(state);
    if (!obs) break;
    const auto features = encode_observation(*obs, agent.width, agent.height);
    const Action a = choose(features);
    const bool chasing_aux = detour && observer.latch() == AuxLatch::Active;
    StepOutcome out = step(state, {a}, rewards);
    double r = out.rewards[0];
    if (chasing_aux && out.next.agents[0] == *solo.auxiliary_target) r += rewards.goal_weight();
    batch.features.push_back(features);
    batch.actions.push_back(a);
    batch.rewards.push_back(r);
    state = std::move(out.next);
  }
  return batch;
}

double total(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

}  // namespace

TrainedAgent init_agent(const ScenarioSpec& spec, const TrainConfig& cfg) {
  std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32)};
  std::mt19937_64 rng(seq);
  TrainedAgent agent;
  agent.policy = Mlp::glorot(layer_sizes(cfg, 4), rng, 0.01);
  agent.value = Mlp::glorot(layer_sizes(cfg, 1), rng, 1.0);
  agent.width = spec.map.width();
  agent.height = spec.map.height();
  return agent;
}

double greedy_solo_return(const TrainedAgent& trained, const ScenarioSpec& spec, int agent, bool detour) {
  const ScenarioSpec solo = solo_scenario(spec, agent);
  const RewardModel rewards(solo.reward_mode);
  const EpisodeBatch b = solo_episode(solo, rewards, detour, trained, [&](const std::array<double, 4>& f) {
    return argmax_action(policy_forward(trained.policy, f));
  });
  return total(b.rewards);
}

double optimal_solo_return(const ScenarioSpec& spec, int agent, bool detour) {
  const ScenarioSpec solo = solo_scenario(spec, agent);
  const RewardModel rewards(solo.reward_mode);
  GridState state = reset(solo);
  Observer observer = solo_observer(solo, detour);
  double ret = 0.0;
  std::vector<Position> leg;
  while (is_terminal(state) == Terminal::NotTerminal) {
    const auto obs = observer(state);
    if (!obs) break;
    const Position pos = state.agents[0];
    if (obs->target() == pos) break;  // nothing left to reach
    const ShortestPaths sp(state.map(), rewards, pos, true);
    leg = sp.route(obs->target());
    const bool chasing_aux = detour && observer.latch() == AuxLatch::Active;
    StepOutcome out = step(state, {next_action_on_route(leg, pos)}, rewards);
    ret += out.rewards[0];
    if (chasing_aux && out.next.agents[0] == *solo.auxiliary_target) ret += rewards.goal_weight();
    state = std::move(out.next);
  }
  return ret;
}

TrainedAgent train_agent(const ScenarioSpec& spec, int agent, const TrainConfig& cfg) {
  if (agent < 0 || agent >= spec.num_agents()) throw ContractError("train_agent: agent index out of range");
  if (cfg.episodes < 0 || cfg.eval_interval < 1 || cfg.window < 1) throw ValidationError("invalid training config");
  TrainConfig agent_cfg = cfg;
  agent_cfg.seed = cfg.seed * 1000003ULL + static_cast<std::uint64_t>(agent);
  TrainedAgent trained = init_agent(spec, agent_cfg);
  std::mt19937_64 rng(agent_cfg.seed ^ 0xd1b54a32d192ed03ULL);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  const ScenarioSpec solo = solo_scenario(spec, agent);
  const RewardModel rewards(solo.reward_mode);
  const bool detour = is_detour_agent(spec, agent);
  const double threshold =
      std::isnan(cfg.return_threshold)
          ? optimal_solo_return(spec, agent, false) + (detour ? optimal_solo_return(spec, agent, true) : 0.0)
          : cfg.return_threshold;

  Adam policy_opt(trained.policy, cfg.learning_rate);
  Adam value_opt(trained.value, cfg.learning_rate);
  std::vector<double> evals;

  auto sample = [&](const std::array<double, 4>& f) {
    const auto p = policy_forward(trained.policy, f);
    double u = unit(rng);
    for (std::size_t k = 0; k < 3; ++k) {
      if (u < p[k]) return kActions[k];
      u -= p[k];
    }
    return kActions[3];
  };

  for (int ep = 0; ep < cfg.episodes; ++ep) {
    const bool detour_episode = detour && (ep % 2 == 1);
    const EpisodeBatch batch = solo_episode(solo, rewards, detour_episode, trained, sample);
    a2c_episode_update(trained, policy_opt, value_opt, batch, cfg);
    trained.episodes_run = ep + 1;

    if ((ep + 1) % cfg.eval_interval == 0) {
      double ret = greedy_solo_return(trained, spec, agent, false);
      if (detour) ret += greedy_solo_return(trained, spec, agent, true);
      trained.last_eval_return = ret;
      evals.push_back(ret);
      if (static_cast<int>(evals.size()) >= cfg.window) {
        double mean = 0.0;
        for (std::size_t k = evals.size() - static_cast<std::size_t>(cfg.window); k < evals.size(); ++k)
          mean += evals[k];
        mean /= cfg.window;
        if (mean >= threshold - 1e-9) {
          trained.converged = true;
          break;
        }
      }
    }
  }
  return trained;
}

std::vector<TrainedAgent> train(const ScenarioSpec& spec, const TrainConfig& cfg) {
  validate_scenario(spec);
  std::vector<TrainedAgent> out;
  for (int i = 0; i < spec.num_agents(); ++i) out.push_back(train_agent(spec, i, cfg));
  return out;
}

Action act_greedy(const TrainedAgent& agent, const Observation& obs) {
  return argmax_action(policy_forward(agent.policy, encode_observation(obs, agent.width, agent.height)));
}

// ---------------------------------------------------------------------------
// Controller

RlController::RlController(int slot, TrainedAgent agent, Observer observer)
    : slot_(slot), agent_(std::move(agent)), observer_(std::move(observer)) {}

void RlController::reset(const GridState&) { observer_.reset(); }

Action RlController::act(const GridState& state) {
  const auto obs = observer_(state);
  if (!obs) return idle_action(state, slot_);
  return act_greedy(agent_, *obs);
}

ControllerFactory rl_factory(std::vector<TrainedAgent> agents) {
  return [agents = std::move(agents)](const ScenarioSpec& spec, int slot, int identity) {
    if (identity < 0 || identity >= static_cast<int>(agents.size()))
      throw ValidationError("no trained agent for agent " + std::to_string(identity + 1));
    // The detour belongs to the left agent of the joint scenario only.
    const bool joint = spec.num_agents() > 1;
    const ObservationMode mode = (spec.observation_mode == ObservationMode::AuxiliaryTarget && !joint)
                                     ? ObservationMode::Manhattan
                                     : spec.observation_mode;
    Observer observer(slot, mode, spec.auxiliary_target);
    return std::unique_ptr<Controller>(
        std::make_unique<RlController>(slot, agents[static_cast<std::size_t>(identity)], std::move(observer)));
  };
}

// ---------------------------------------------------------------------------
// Persistence

namespace {

constexpr const char* kMagic = "gridsafe-agents";
constexpr int kVersion = 1;

void write_net(std::ostream& out, const char* tag, const Mlp& net) {
  out << "net " << tag << ' ' << net.sizes().size();
  for (int s : net.sizes()) out << ' ' << s;
  out << '\n';
  for (const auto& layer : net.layers()) {
    for (int o = 0; o < layer.out; ++o) {
      for (int i = 0; i < layer.in; ++i)
        out << (i ? " " : "") << layer.weights[static_cast<std::size_t>(o * layer.in + i)];
      out << '\n';
    }
    for (int o = 0; o < layer.out; ++o) out << (o ? " " : "") << layer.bias[static_cast<std::size_t>(o)];
    out << '\n';
  }
}

template <typename T>
T expect_value(std::istream& in, const char* what) {
  T v{};
  if (!(in >> v)) throw ValidationError(std::string("agent file: malformed ") + what);
  return v;
}

void expect_word(std::istream& in, const std::string& word) {
  std::string w;
  if (!(in >> w) || w != word) throw ValidationError("agent file: expected '" + word + "', got '" + w + "'");
}

Mlp read_net(std::istream& in, const std::string& tag) {
  expect_word(in, "net");
  expect_word(in, tag);
  const auto n = expect_value<std::size_t>(in, "layer count");
  if (n < 2 || n > 64) throw ValidationError("agent file: bad layer count");
  std::vector<int> sizes(n);
  for (auto& s : sizes) {
    s = expect_value<int>(in, "layer size");
    if (s < 1 || s > 4096) throw ValidationError("agent file: bad layer size");
  }
  Mlp net(sizes);
  for (auto& layer : net.layers()) {
    for (double& w : layer.weights) w = expect_value<double>(in, "weight");
    for (double& b : layer.bias) b = expect_value<double>(in, "bias");
  }
  if (!net.all_finite()) throw ValidationError("agent file: non-finite parameter");
  return net;
}

}  // namespace

void write_agents(std::ostream& out, const std::vector<TrainedAgent>& agents, const TrainConfig& cfg) {
  out << std::setprecision(17);
  out << kMagic << " v" << kVersion << '\n';
  out << "config gamma " << cfg.gamma << " lr " << cfg.learning_rate << " entropy " << cfg.entropy_coeff << " seed "
      << cfg.seed << '\n';
  out << "agents " << agents.size() << '\n';
  for (std::size_t i = 0; i < agents.size(); ++i) {
    const TrainedAgent& a = agents[i];
    out << "agent " << i << " width " << a.width << " height " << a.height << " converged " << (a.converged ? 1 : 0)
        << " episodes " << a.episodes_run << " eval " << a.last_eval_return << '\n';
    write_net(out, "policy", a.policy);
    write_net(out, "value", a.value);
  }
}

std::vector<TrainedAgent> read_agents(std::istream& in) {
  expect_word(in, kMagic);
  expect_word(in, "v" + std::to_string(kVersion));
  expect_word(in, "config");
  for (const char* key : {"gamma", "lr", "entropy"}) {
    expect_word(in, key);
    expect_value<double>(in, key);
  }
  expect_word(in, "seed");
  expect_value<std::uint64_t>(in, "seed");
  expect_word(in, "agents");
  const auto n = expect_value<std::size_t>(in, "agent count");
  if (n > 64) throw ValidationError("agent file: too many agents");
  std::vector<TrainedAgent> agents;
  for (std::size_t i = 0; i < n; ++i) {
    TrainedAgent a;
    expect_word(in, "agent");
    if (expect_value<std::size_t>(in, "agent index") != i) throw ValidationError("agent file: agents out of order");
    expect_word(in, "width");
    a.width = expect_value<int>(in, "width");
    expect_word(in, "height");
    a.height = expect_value<int>(in, "height");
    expect_word(in, "converged");
    a.converged = expect_value<int>(in, "converged") != 0;
    expect_word(in, "episodes");
    a.episodes_run = expect_value<int>(in, "episodes");
    expect_word(in, "eval");
    a.last_eval_return = expect_value<double>(in, "eval");
    a.policy = read_net(in, "policy");
    a.value = read_net(in, "value");
    if (a.policy.sizes().front() != 4 || a.policy.sizes().back() != 4 || a.value.sizes().front() != 4 ||
        a.value.sizes().back() != 1)
      throw ValidationError("agent file: unexpected network shape");
    agents.push_back(std::move(a));
  }
  return agents;
}

void save_agents(const std::string& path, const std::vector<TrainedAgent>& agents, const TrainConfig& cfg) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write agent file: " + path);
  write_agents(out, agents, cfg);
  if (!out) throw IoError("failed writing agent file: " + path);
}

std::vector<TrainedAgent> load_agents(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read agent file: " + path);
  return read_agents(in);
}

}  // namespace gridsafe
