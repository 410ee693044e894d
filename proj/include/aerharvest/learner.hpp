#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "aerharvest/net.hpp"
#include "aerharvest/obsmap.hpp"
#include "aerharvest/rng.hpp"

namespace aerharvest {

struct Hyperparams {
  std::size_t capacity = 50000;
  int minibatch = 128;
  double tau = 0.005;
  double gamma = 0.95;
  double temperature = 0.1;
  double learning_rate = 3e-4;
  std::int64_t max_steps = 3'000'000;
  int local_size = 17;
  int global_pooling = 3;
  int conv_filters = 16;
  int conv_kernel = 5;
  int conv_layers = 2;
  std::vector<int> hidden = {256, 256, 256};
  std::int64_t checkpoint_interval = 100'000;
};

// One decentralized transition; observations are stored flattened and
// normalized, float32 to keep the buffer small.
struct Experience {
  std::vector<float> obs;
  std::vector<float> next_obs;
  int action = 0;
  float reward = 0.0f;
  bool terminal = false;
};

// FIFO ring buffer with combined experience replay sampling: each minibatch
// is m-1 uniform draws plus the most recent transition.
class ReplayMemory {
 public:
  explicit ReplayMemory(std::size_t capacity);

  void push(Experience e);
  std::size_t size() const { return items_.size(); }
  std::size_t capacity() const { return capacity_; }
  const Experience& latest() const;
  const Experience& at(std::size_t i) const { return items_[i]; }

  // Indices into the buffer; requires size >= 1.
  std::vector<std::size_t> sample_cer(int minibatch, Rng& rng) const;

 private:
  std::size_t capacity_;
  std::size_t next_ = 0;        // ring write position
  std::size_t latest_ = 0;      // most recent write
  std::vector<Experience> items_;
};

// Flatten an observation into the network input layout
// [local stack | global stack | scalar], normalizing data and flying-time
// channels by the constants carried in the net config.
std::vector<float> flatten_observation(const Observation& obs, const NetConfig& cfg);

int greedy_action(const std::vector<double>& q);
int softmax_action(const std::vector<double>& q, double temperature, Rng& rng);

int greedy_action(const QNetwork& net, const Observation& obs);
int softmax_action(const QNetwork& net, const Observation& obs, double temperature, Rng& rng);

double ddqn_target(double reward, bool terminal, const std::vector<double>& q_next_online,
                   const std::vector<double>& q_next_target, double gamma);

class Adam {
 public:
  Adam(std::size_t n, double lr);
  void step(std::vector<double>& params, const std::vector<double>& grad);
  double learning_rate() const { return lr_; }

 private:
  double lr_;
  double beta1_ = 0.9, beta2_ = 0.999, eps_ = 1e-8;
  std::int64_t t_ = 0;
  std::vector<double> m_, v_;
};

// Online network, target network, optimizer, and replay buffer for one run.
class Learner {
 public:
  Learner(const NetConfig& net_config, const Hyperparams& hyper, Rng init_rng);

  QNetwork& online() { return online_; }
  const QNetwork& online() const { return online_; }
  QNetwork& target() { return target_; }
  const Hyperparams& hyper() const { return hyper_; }
  ReplayMemory& memory() { return memory_; }

  void push(Experience e) { memory_.push(std::move(e)); }

  // One DDQN gradient step on a CER minibatch followed by a soft target
  // update. Returns the minibatch loss, or nothing if the buffer is still
  // shorter than the minibatch.
  std::optional<double> train_step(Rng& rng);

  std::int64_t steps_trained() const { return steps_; }

  // Mean loss since the previous call (0 if no step ran); for progress logs.
  double take_mean_loss();

 private:
  Hyperparams hyper_;
  QNetwork online_;
  QNetwork target_;
  Adam opt_;
  ReplayMemory memory_;
  NetWorkspace ws_;
  std::vector<double> grad_, batch_in_, batch_next_, q_, q_next_online_, q_next_target_, dq_;
  std::int64_t steps_ = 0;
  double loss_sum_ = 0.0;
  std::int64_t loss_count_ = 0;
};

}  // namespace aerharvest
