#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "gridsafe/observation.hpp"
#include "gridsafe/rollout.hpp"
#include "gridsafe/scenario_spec.hpp"

namespace gridsafe {

struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ShapeError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

enum class Activation { Tanh };

struct DenseLayer {
  int in = 0;
  int out = 0;
  std::vector<double> weights;  // out x in, row-major
  std::vector<double> bias;     // out

  bool operator==(const DenseLayer&) const = default;
};

/// Feed-forward network: tanh on hidden layers, linear output.
class Mlp {
 public:
  Mlp() = default;
  /// All-zero parameters.
  explicit Mlp(std::vector<int> sizes, Activation act = Activation::Tanh);

  /// Glorot-uniform weights, zero biases; the output layer is scaled by `output_gain`.
  static Mlp glorot(std::vector<int> sizes, std::mt19937_64& rng, double output_gain = 1.0);

  struct Cache {
    std::vector<std::vector<double>> activations;  // input, hidden..., output
  };

  std::vector<double> forward(std::span<const double> input) const;
  std::vector<double> forward(std::span<const double> input, Cache& cache) const;

  /// Accumulates d(loss)/d(params) into `grad` given d(loss)/d(output).
  void backward(const Cache& cache, std::span<const double> grad_output, Mlp& grad) const;

  const std::vector<int>& sizes() const { return sizes_; }
  Activation activation() const { return act_; }
  std::vector<DenseLayer>& layers() { return layers_; }
  const std::vector<DenseLayer>& layers() const { return layers_; }

  std::size_t parameter_count() const;
  /// Flat views in layer order (weights then bias per layer).
  std::vector<double> flatten() const;
  void assign(std::span<const double> flat);
  bool all_finite() const;

  bool operator==(const Mlp&) const = default;

 private:
  std::vector<int> sizes_;
  Activation act_ = Activation::Tanh;
  std::vector<DenseLayer> layers_;
};

/// Observation coordinates scaled to [0, 1] by the grid extent.
std::array<double, 4> encode_observation(const Observation& obs, int width, int height);

std::array<double, 4> softmax(std::span<const double> logits);

/// Action distribution in Up, Right, Down, Left order.
std::array<double, 4> policy_forward(const Mlp& policy, std::span<const double> features);
double value_forward(const Mlp& value, std::span<const double> features);

/// Index of the largest probability; ties go to the earliest action.
Action argmax_action(const std::array<double, 4>& probs);

struct TrainConfig {
  double gamma = 0.99;
  double learning_rate = 3e-4;
  std::vector<int> hidden_sizes{64, 64};
  double entropy_coeff = 0.01;
  int episodes = 20000;
  int eval_interval = 50;
  std::uint64_t seed = 0;
  // Converged when the mean greedy return over the last `window` evaluations
  // reaches `return_threshold`. NaN selects the optimal solo return.
  int window = 3;
  double return_threshold = std::numeric_limits<double>::quiet_NaN();
};

/// One solo episode as seen by the learner.
struct EpisodeBatch {
  std::vector<std::array<double, 4>> features;
  std::vector<Action> actions;
  std::vector<double> rewards;
};

struct LossStats {
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
};

/// Monte-Carlo returns G_t = r_t + gamma G_{t+1}.
std::vector<double> monte_carlo_returns(std::span<const double> rewards, double gamma);

/// Losses for fixed advantages:
///   policy = -(1/T) sum_t [A_t log pi(a_t|z_t) + beta H(pi(.|z_t))]
///   value  = (1/T) sum_t 0.5 (G_t - V(z_t))^2
LossStats a2c_losses(const Mlp& policy, const Mlp& value, const EpisodeBatch& batch, std::span<const double> returns,
                     std::span<const double> advantages, double entropy_coeff);

/// Analytic gradients of a2c_losses with advantages A_t = G_t - V(z_t) held fixed.
/// Returns the losses; gradients are written into zero-initialised `policy_grad`, `value_grad`.
LossStats a2c_gradients(const Mlp& policy, const Mlp& value, const EpisodeBatch& batch, const TrainConfig& cfg,
                        Mlp& policy_grad, Mlp& value_grad);

/// Adam state for one network.
class Adam {
 public:
  explicit Adam(const Mlp& net, double learning_rate);
  /// Descends along `grad`.
  void step(Mlp& net, const Mlp& grad);

 private:
  double lr_;
  int t_ = 0;
  std::vector<double> m_;
  std::vector<double> v_;
};

struct TrainedAgent {
  Mlp policy;
  Mlp value;
  int width = 1;
  int height = 1;
  bool converged = false;
  int episodes_run = 0;
  double last_eval_return = 0.0;
};

/// One gradient step on a complete episode. Throws NumericError on non-finite gradients.
LossStats a2c_episode_update(TrainedAgent& agent, Adam& policy_opt, Adam& value_opt, const EpisodeBatch& batch,
                             const TrainConfig& cfg);

/// Fresh, untrained agent for a scenario.
TrainedAgent init_agent(const ScenarioSpec& spec, const TrainConfig& cfg);

/// Trains agent `agent` alone in its own copy of the scenario. When the
/// scenario defines an auxiliary target, the detour agent (index 0) also
/// practises the detour leg: every other episode starts with the aux cell as
/// target, and reaching it pays the goal weight.
TrainedAgent train_agent(const ScenarioSpec& spec, int agent, const TrainConfig& cfg);

/// One independently trained agent per scenario agent.
std::vector<TrainedAgent> train(const ScenarioSpec& spec, const TrainConfig& cfg);

Action act_greedy(const TrainedAgent& agent, const Observation& obs);

/// Greedy solo return of `agent` (with the aux leg first when `detour`).
double greedy_solo_return(const TrainedAgent& trained, const ScenarioSpec& spec, int agent, bool detour);

/// Best achievable greedy solo return (shortest paths).
double optimal_solo_return(const ScenarioSpec& spec, int agent, bool detour);

class RlController : public Controller {
 public:
  RlController(int slot, TrainedAgent agent, Observer observer);
  void reset(const GridState& state) override;
  Action act(const GridState& state) override;

 private:
  int slot_;
  TrainedAgent agent_;
  Observer observer_;
};

/// Controllers driven by trained agents, indexed by identity.
ControllerFactory rl_factory(std::vector<TrainedAgent> agents);

// Versioned text format: layer sizes plus row-major weights, one file per team.
void write_agents(std::ostream& out, const std::vector<TrainedAgent>& agents, const TrainConfig& cfg);
std::vector<TrainedAgent> read_agents(std::istream& in);
void save_agents(const std::string& path, const std::vector<TrainedAgent>& agents, const TrainConfig& cfg);
std::vector<TrainedAgent> load_agents(const std::string& path);

}  // namespace gridsafe
