#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "aerharvest/rng.hpp"

namespace aerharvest {

// Architecture of the dual-branch Q-network: two identical convolutional
// branches over the local and global map stacks, flattened and concatenated
// with the scalar flying-time input, followed by fully connected rectifier
// layers and a linear action-value head.
struct NetConfig {
  int local_size = 17;   // spatial side of the local stack
  int global_size = 21;  // spatial side of the pooled global stack
  int channels = 6;
  int conv_filters = 16;
  int conv_kernel = 5;
  int conv_layers = 2;
  std::vector<int> hidden = {256, 256, 256};
  int actions = 6;

  // Input normalization constants, baked into saved models so evaluation
  // does not depend on the training config being present.
  double norm_data = 1.0;         // divides device-data inputs
  double norm_flying_time = 1.0;  // divides flying-time inputs and the scalar

  std::string to_json_text() const;
  static NetConfig from_json_text(const std::string& text);

  int conv_out_size(int in_size) const;  // after all conv layers, valid padding
  int local_flat() const;
  int global_flat() const;
  int input_size() const;  // local stack + global stack + scalar, flattened
};

class QNetwork;

// Per-batch activation storage reused across training steps.
struct NetWorkspace {
  int batch = 0;
  std::vector<std::vector<double>> local_acts, global_acts;  // post-ReLU conv outputs
  std::vector<std::vector<double>> local_grads, global_grads;
  std::vector<double> concat, concat_grad;
  std::vector<std::vector<double>> fc_acts, fc_grads;  // last entry: linear Q values
};

class QNetwork {
 public:
  explicit QNetwork(const NetConfig& config);

  const NetConfig& config() const { return config_; }
  std::vector<double>& params() { return params_; }
  const std::vector<double>& params() const { return params_; }
  std::size_t num_params() const { return params_.size(); }

  // Fan-in-scaled uniform init, one draw per parameter in layout order.
  void init(Rng& rng);

  // Q values for one flattened, normalized input vector.
  std::vector<double> forward(std::span<const double> input) const;

  // Batched forward; inputs is row-major [batch][input_size], q_out is
  // [batch][actions]. When ws is given, activations are kept for backward.
  void forward_batch(const double* inputs, int batch, double* q_out, bool parallel,
                     NetWorkspace* ws = nullptr) const;

  // Gradient of a scalar loss w.r.t. the parameters given dL/dQ for the batch
  // held in ws (which must come from forward_batch on the same inputs).
  // grad is overwritten. Bitwise deterministic at any thread count.
  void backward_batch(const double* inputs, const double* dq, NetWorkspace& ws,
                      std::vector<double>& grad, bool parallel) const;

  void save(const std::string& path) const;
  static QNetwork load(const std::string& path);

 private:
  struct Layer {
    bool conv = false;
    int in_ch = 0, out_ch = 0, kernel = 0;  // conv
    int in_size = 0, out_size = 0;          // conv spatial / fc widths
    std::size_t w_off = 0, b_off = 0;
    std::size_t w_len() const;
    int fan_in() const;
  };

  void conv_branch_forward(const double* inputs, int batch, int input_offset,
                           const std::vector<Layer>& layers,
                           std::vector<std::vector<double>>& acts, bool parallel) const;
  void conv_branch_backward(const double* inputs, int batch, int input_offset,
                            const std::vector<Layer>& layers,
                            const std::vector<std::vector<double>>& acts,
                            std::vector<std::vector<double>>& grads, std::vector<double>& grad,
                            bool parallel) const;

  NetConfig config_;
  std::vector<Layer> local_convs_, global_convs_, fcs_;
  int concat_len_ = 0;
  std::vector<double> params_;
};

// Elementwise theta_bar <- (1 - tau) * theta_bar + tau * theta.
void soft_update(std::vector<double>& target, const std::vector<double>& online, double tau);

}  // namespace aerharvest
