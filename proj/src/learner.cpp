#include "aerharvest/learner.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "aerharvest/errors.hpp"
#include "aerharvest/threads.hpp"

namespace aerharvest {

ReplayMemory::ReplayMemory(std::size_t capacity) : capacity_(capacity) {
  if (capacity_ == 0) throw UsageError("replay capacity must be positive");
  items_.reserve(std::min<std::size_t>(capacity_, 1 << 16));
}

void ReplayMemory::push(Experience e) {
  if (items_.size() < capacity_) {
    items_.push_back(std::move(e));
    latest_ = items_.size() - 1;
  } else {
    items_[next_] = std::move(e);
    latest_ = next_;
    next_ = (next_ + 1) % capacity_;
  }
}

const Experience& ReplayMemory::latest() const {
  if (items_.empty()) throw std::runtime_error("replay memory is empty");
  return items_[latest_];
}

std::vector<std::size_t> ReplayMemory::sample_cer(int minibatch, Rng& rng) const {
  if (items_.empty()) throw std::runtime_error("replay memory is empty");
  std::vector<std::size_t> idx(minibatch);
  for (int i = 0; i + 1 < minibatch; ++i) idx[i] = rng.index(items_.size());
  idx[minibatch - 1] = latest_;
  return idx;
}

std::vector<float> flatten_observation(const Observation& obs, const NetConfig& cfg) {
  const std::size_t ll = obs.local.data.size();
  const std::size_t gl = obs.global_map.data.size();
  std::vector<float> out(ll + gl + 1);
  const std::size_t plane_l = std::size_t(obs.local.rows) * obs.local.cols;
  const std::size_t plane_g = std::size_t(obs.global_map.rows) * obs.global_map.cols;
  // channel order: [landing, nfz, obstacle, data, flying time, operational]
  auto norm = [&](int c) {
    if (c == 3) return cfg.norm_data;
    if (c == 4) return cfg.norm_flying_time;
    return 1.0;
  };
  for (int c = 0; c < obs.local.channels; ++c) {
    const double inv = 1.0 / norm(c);
    for (std::size_t i = 0; i < plane_l; ++i)
      out[c * plane_l + i] = float(obs.local.data[c * plane_l + i] * inv);
  }
  for (int c = 0; c < obs.global_map.channels; ++c) {
    const double inv = 1.0 / norm(c);
    for (std::size_t i = 0; i < plane_g; ++i)
      out[ll + c * plane_g + i] = float(obs.global_map.data[c * plane_g + i] * inv);
  }
  out[ll + gl] = float(obs.scalar_b / cfg.norm_flying_time);
  return out;
}

int greedy_action(const std::vector<double>& q) {
  int best = 0;
  for (std::size_t a = 0; a < q.size(); ++a) {
    if (!std::isfinite(q[a])) throw std::runtime_error("non-finite action value");
    if (q[a] > q[best]) best = int(a);
  }
  return best;
}

int softmax_action(const std::vector<double>& q, double temperature, Rng& rng) {
  if (temperature <= 0.0) throw UsageError("softmax temperature must be positive");
  double mx = q[0];
  for (double v : q) {
    if (!std::isfinite(v)) throw std::runtime_error("non-finite action value");
    mx = std::max(mx, v);
  }
  std::vector<double> p(q.size());
  double total = 0.0;
  for (std::size_t a = 0; a < q.size(); ++a) total += p[a] = std::exp((q[a] - mx) / temperature);
  const double u = rng.uniform() * total;
  double acc = 0.0;
  for (std::size_t a = 0; a < q.size(); ++a) {
    acc += p[a];
    if (u < acc) return int(a);
  }
  return int(q.size()) - 1;
}

static std::vector<double> to_double(const std::vector<float>& v) {
  return {v.begin(), v.end()};
}

int greedy_action(const QNetwork& net, const Observation& obs) {
  return greedy_action(net.forward(to_double(flatten_observation(obs, net.config()))));
}

int softmax_action(const QNetwork& net, const Observation& obs, double temperature, Rng& rng) {
  return softmax_action(net.forward(to_double(flatten_observation(obs, net.config()))), temperature,
                        rng);
}

double ddqn_target(double reward, bool terminal, const std::vector<double>& q_next_online,
                   const std::vector<double>& q_next_target, double gamma) {
  if (terminal) return reward;
  return reward + gamma * q_next_target[greedy_action(q_next_online)];
}

Adam::Adam(std::size_t n, double lr) : lr_(lr), m_(n, 0.0), v_(n, 0.0) {}

void Adam::step(std::vector<double>& params, const std::vector<double>& grad) {
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, double(t_));
  const double c2 = 1.0 - std::pow(beta2_, double(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grad[i];
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grad[i] * grad[i];
    params[i] -= lr_ * (m_[i] / c1) / (std::sqrt(v_[i] / c2) + eps_);
  }
}

Learner::Learner(const NetConfig& net_config, const Hyperparams& hyper, Rng init_rng)
    : hyper_(hyper),
      online_(net_config),
      target_(net_config),
      opt_(online_.num_params(), hyper.learning_rate),
      memory_(hyper.capacity) {
  online_.init(init_rng);
  target_.params() = online_.params();
}

std::optional<double> Learner::train_step(Rng& rng) {
  const int m = hyper_.minibatch;
  if (memory_.size() < std::size_t(m)) return std::nullopt;

  const std::vector<std::size_t> idx = memory_.sample_cer(m, rng);
  const int in_sz = online_.config().input_size();
  const int na = online_.config().actions;
  batch_in_.resize(std::size_t(m) * in_sz);
  batch_next_.resize(std::size_t(m) * in_sz);
  for (int b = 0; b < m; ++b) {
    const Experience& e = memory_.at(idx[b]);
    for (int i = 0; i < in_sz; ++i) {
      batch_in_[std::size_t(b) * in_sz + i] = e.obs[i];
      batch_next_[std::size_t(b) * in_sz + i] = e.next_obs[i];
    }
  }

  const bool par = threads_enabled();
  q_next_online_.resize(std::size_t(m) * na);
  q_next_target_.resize(std::size_t(m) * na);
  online_.forward_batch(batch_next_.data(), m, q_next_online_.data(), par);
  target_.forward_batch(batch_next_.data(), m, q_next_target_.data(), par);

  q_.resize(std::size_t(m) * na);
  online_.forward_batch(batch_in_.data(), m, q_.data(), par, &ws_);

  // Mean squared TD error; targets are constants.
  dq_.assign(std::size_t(m) * na, 0.0);
  double loss = 0.0;
  for (int b = 0; b < m; ++b) {
    const Experience& e = memory_.at(idx[b]);
    double best = q_next_online_[std::size_t(b) * na];
    int best_a = 0;
    for (int a = 1; a < na; ++a)
      if (q_next_online_[std::size_t(b) * na + a] > best) {
        best = q_next_online_[std::size_t(b) * na + a];
        best_a = a;
      }
    const double y = e.terminal
                         ? double(e.reward)
                         : double(e.reward) + hyper_.gamma * q_next_target_[std::size_t(b) * na + best_a];
    const double diff = q_[std::size_t(b) * na + e.action] - y;
    loss += diff * diff;
    dq_[std::size_t(b) * na + e.action] = 2.0 * diff / m;
  }
  loss /= m;
  if (!std::isfinite(loss)) throw std::runtime_error("training loss is not finite");

  online_.backward_batch(batch_in_.data(), dq_.data(), ws_, grad_, par);
  opt_.step(online_.params(), grad_);
  soft_update(target_.params(), online_.params(), hyper_.tau);
  ++steps_;
  loss_sum_ += loss;
  ++loss_count_;
  return loss;
}

double Learner::take_mean_loss() {
  const double mean = loss_count_ > 0 ? loss_sum_ / loss_count_ : 0.0;
  loss_sum_ = 0.0;
  loss_count_ = 0;
  return mean;
}

}  // namespace aerharvest
