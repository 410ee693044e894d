#include "aerharvest/net.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include "json.hpp"

#include "aerharvest/errors.hpp"
#include "aerharvest/jsonio.hpp"

namespace aerharvest {

using nlohmann::json;

int NetConfig::conv_out_size(int in_size) const { return in_size - conv_layers * (conv_kernel - 1); }

int NetConfig::local_flat() const {
  const int n = conv_out_size(local_size);
  return (conv_layers > 0 ? conv_filters : channels) * n * n;
}

int NetConfig::global_flat() const {
  const int n = conv_out_size(global_size);
  return (conv_layers > 0 ? conv_filters : channels) * n * n;
}

int NetConfig::input_size() const {
  return channels * (local_size * local_size + global_size * global_size) + 1;
}

std::string NetConfig::to_json_text() const {
  json j;
  j["local_size"] = local_size;
  j["global_size"] = global_size;
  j["channels"] = channels;
  j["conv_filters"] = conv_filters;
  j["conv_kernel"] = conv_kernel;
  j["conv_layers"] = conv_layers;
  j["hidden"] = hidden;
  j["actions"] = actions;
  j["norm_data"] = norm_data;
  j["norm_flying_time"] = norm_flying_time;
  return j.dump();
}

NetConfig NetConfig::from_json_text(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw UsageError("model descriptor is not valid JSON");
  require_keys(j,
               {"local_size", "global_size", "channels", "conv_filters", "conv_kernel",
                "conv_layers", "hidden", "actions", "norm_data", "norm_flying_time"},
               "model descriptor");
  NetConfig c;
  c.local_size = j.at("local_size").get<int>();
  c.global_size = j.at("global_size").get<int>();
  c.channels = j.at("channels").get<int>();
  c.conv_filters = j.at("conv_filters").get<int>();
  c.conv_kernel = j.at("conv_kernel").get<int>();
  c.conv_layers = j.at("conv_layers").get<int>();
  c.hidden = j.at("hidden").get<std::vector<int>>();
  c.actions = j.at("actions").get<int>();
  c.norm_data = j.at("norm_data").get<double>();
  c.norm_flying_time = j.at("norm_flying_time").get<double>();
  return c;
}

std::size_t QNetwork::Layer::w_len() const {
  if (conv) return std::size_t(out_ch) * in_ch * kernel * kernel;
  return std::size_t(out_size) * in_size;
}

int QNetwork::Layer::fan_in() const { return conv ? in_ch * kernel * kernel : in_size; }

QNetwork::QNetwork(const NetConfig& config) : config_(config) {
  if (config_.conv_kernel < 1 || config_.conv_layers < 0 || config_.conv_filters < 1 ||
      config_.channels < 1 || config_.actions < 1 || config_.hidden.empty())
    throw UsageError("invalid network architecture");
  if (config_.conv_out_size(config_.local_size) < 1 ||
      config_.conv_out_size(config_.global_size) < 1)
    throw UsageError("convolution stack does not fit the observation size");

  std::size_t off = 0;
  auto add_branch = [&](int in_size) {
    std::vector<Layer> layers;
    int ch = config_.channels;
    int n = in_size;
    for (int l = 0; l < config_.conv_layers; ++l) {
      Layer lay;
      lay.conv = true;
      lay.in_ch = ch;
      lay.out_ch = config_.conv_filters;
      lay.kernel = config_.conv_kernel;
      lay.in_size = n;
      lay.out_size = n - config_.conv_kernel + 1;
      lay.w_off = off;
      off += lay.w_len();
      lay.b_off = off;
      off += lay.out_ch;
      ch = lay.out_ch;
      n = lay.out_size;
      layers.push_back(lay);
    }
    return layers;
  };
  local_convs_ = add_branch(config_.local_size);
  global_convs_ = add_branch(config_.global_size);
  concat_len_ = config_.local_flat() + config_.global_flat() + 1;

  int in = concat_len_;
  auto add_fc = [&](int out) {
    Layer lay;
    lay.in_size = in;
    lay.out_size = out;
    lay.w_off = off;
    off += lay.w_len();
    lay.b_off = off;
    off += out;
    in = out;
    fcs_.push_back(lay);
  };
  for (int h : config_.hidden) add_fc(h);
  add_fc(config_.actions);

  params_.assign(off, 0.0);
}

void QNetwork::init(Rng& rng) {
  auto fill = [&](const Layer& lay) {
    const double bound = 1.0 / std::sqrt(double(lay.fan_in()));
    for (std::size_t i = 0; i < lay.w_len(); ++i) params_[lay.w_off + i] = rng.uniform(-bound, bound);
    const int nb = lay.conv ? lay.out_ch : lay.out_size;
    for (int i = 0; i < nb; ++i) params_[lay.b_off + i] = rng.uniform(-bound, bound);
  };
  for (const Layer& l : local_convs_) fill(l);
  for (const Layer& l : global_convs_) fill(l);
  for (const Layer& l : fcs_) fill(l);
}

void QNetwork::conv_branch_forward(const double* inputs, int batch, int input_offset,
                                   const std::vector<Layer>& layers,
                                   std::vector<std::vector<double>>& acts, bool parallel) const {
  const double* p = params_.data();
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const Layer& lay = layers[l];
    const int n = lay.in_size, m = lay.out_size, k = lay.kernel;
    const double* src = l == 0 ? inputs + input_offset : acts[l - 1].data();
    const std::size_t src_stride = l == 0 ? config_.input_size() : std::size_t(lay.in_ch) * n * n;
    acts[l].resize(std::size_t(batch) * lay.out_ch * m * m);
    double* dst = acts[l].data();
#pragma omp parallel for collapse(2) schedule(static) if (parallel)
    for (int b = 0; b < batch; ++b) {
      for (int f = 0; f < lay.out_ch; ++f) {
        const double* in_b = src + b * src_stride;
        double* out = dst + (std::size_t(b) * lay.out_ch + f) * m * m;
        const double* wf = p + lay.w_off + std::size_t(f) * lay.in_ch * k * k;
        const double bias = p[lay.b_off + f];
        for (int i = 0; i < m; ++i)
          for (int j = 0; j < m; ++j) {
            double sum = bias;
            for (int c = 0; c < lay.in_ch; ++c) {
              const double* in_c = in_b + std::size_t(c) * n * n;
              const double* w = wf + std::size_t(c) * k * k;
              for (int u = 0; u < k; ++u)
                for (int v = 0; v < k; ++v) sum += w[u * k + v] * in_c[(i + u) * n + j + v];
            }
            out[i * m + j] = sum > 0.0 ? sum : 0.0;
          }
      }
    }
  }
}

void QNetwork::forward_batch(const double* inputs, int batch, double* q_out, bool parallel,
                             NetWorkspace* ws) const {
  NetWorkspace local_ws;
  NetWorkspace& w = ws ? *ws : local_ws;
  w.batch = batch;
  w.local_acts.resize(local_convs_.size());
  w.global_acts.resize(global_convs_.size());
  w.fc_acts.resize(fcs_.size());

  conv_branch_forward(inputs, batch, 0, local_convs_, w.local_acts, parallel);
  conv_branch_forward(inputs, batch, config_.channels * config_.local_size * config_.local_size,
                      global_convs_, w.global_acts, parallel);

  // concat: [local flat | global flat | scalar]
  const int lf = config_.local_flat(), gf = config_.global_flat();
  const int in_sz = config_.input_size();
  w.concat.resize(std::size_t(batch) * concat_len_);
  const double* lsrc = config_.conv_layers > 0 ? w.local_acts.back().data() : inputs;
  const double* gsrc = config_.conv_layers > 0
                           ? w.global_acts.back().data()
                           : inputs + config_.channels * config_.local_size * config_.local_size;
  const std::size_t lstride = config_.conv_layers > 0 ? lf : in_sz;
  const std::size_t gstride = config_.conv_layers > 0 ? gf : in_sz;
  for (int b = 0; b < batch; ++b) {
    double* row = w.concat.data() + std::size_t(b) * concat_len_;
    std::memcpy(row, lsrc + b * lstride, sizeof(double) * lf);
    std::memcpy(row + lf, gsrc + b * gstride, sizeof(double) * gf);
    row[lf + gf] = inputs[std::size_t(b) * in_sz + in_sz - 1];
  }

  const double* p = params_.data();
  for (std::size_t l = 0; l < fcs_.size(); ++l) {
    const Layer& lay = fcs_[l];
    const double* src = l == 0 ? w.concat.data() : w.fc_acts[l - 1].data();
    const bool last = l + 1 == fcs_.size();
    w.fc_acts[l].resize(std::size_t(batch) * lay.out_size);
    double* dst = last && !ws ? q_out : w.fc_acts[l].data();
#pragma omp parallel for collapse(2) schedule(static) if (parallel)
    for (int b = 0; b < batch; ++b) {
      for (int o = 0; o < lay.out_size; ++o) {
        const double* in_b = src + std::size_t(b) * lay.in_size;
        const double* wrow = p + lay.w_off + std::size_t(o) * lay.in_size;
        double sum = p[lay.b_off + o];
        for (int i = 0; i < lay.in_size; ++i) sum += wrow[i] * in_b[i];
        dst[std::size_t(b) * lay.out_size + o] = (!last && sum < 0.0) ? 0.0 : sum;
      }
    }
  }
  if (ws && q_out)
    std::memcpy(q_out, w.fc_acts.back().data(), sizeof(double) * batch * config_.actions);
}

std::vector<double> QNetwork::forward(std::span<const double> input) const {
  if (int(input.size()) != config_.input_size())
    throw UsageError("observation size does not match the network architecture");
  std::vector<double> q(config_.actions);
  forward_batch(input.data(), 1, q.data(), false);
  return q;
}

void QNetwork::conv_branch_backward(const double* inputs, int batch, int input_offset,
                                    const std::vector<Layer>& layers,
                                    const std::vector<std::vector<double>>& acts,
                                    std::vector<std::vector<double>>& grads,
                                    std::vector<double>& grad, bool parallel) const {
  const double* p = params_.data();
  // grads[l] on entry to layer l holds dL/d(pre-activation) of that layer.
  for (int l = int(layers.size()) - 1; l >= 0; --l) {
    const Layer& lay = layers[l];
    const int n = lay.in_size, m = lay.out_size, k = lay.kernel;
    const double* src = l == 0 ? inputs + input_offset : acts[l - 1].data();
    const std::size_t src_stride = l == 0 ? config_.input_size() : std::size_t(lay.in_ch) * n * n;
    const double* dpre = grads[l].data();

#pragma omp parallel for schedule(static) if (parallel)
    for (int f = 0; f < lay.out_ch; ++f) {
      double* dw = grad.data() + lay.w_off + std::size_t(f) * lay.in_ch * k * k;
      double db = 0.0;
      for (int b = 0; b < batch; ++b) {
        const double* dp = dpre + (std::size_t(b) * lay.out_ch + f) * m * m;
        const double* in_b = src + b * src_stride;
        for (int i = 0; i < m; ++i)
          for (int j = 0; j < m; ++j) {
            const double d = dp[i * m + j];
            if (d == 0.0) continue;
            db += d;
            for (int c = 0; c < lay.in_ch; ++c) {
              const double* in_c = in_b + std::size_t(c) * n * n;
              double* dwc = dw + std::size_t(c) * k * k;
              for (int u = 0; u < k; ++u)
                for (int v = 0; v < k; ++v) dwc[u * k + v] += d * in_c[(i + u) * n + j + v];
            }
          }
      }
      grad[lay.b_off + f] = db;
    }

    if (l == 0) break;  // input gradient not needed
    grads[l - 1].assign(std::size_t(batch) * lay.in_ch * n * n, 0.0);
    double* dst = grads[l - 1].data();
    const double* prev_act = acts[l - 1].data();
#pragma omp parallel for collapse(2) schedule(static) if (parallel)
    for (int b = 0; b < batch; ++b) {
      for (int c = 0; c < lay.in_ch; ++c) {
        double* d_in = dst + (std::size_t(b) * lay.in_ch + c) * n * n;
        const double* a_in = prev_act + (std::size_t(b) * lay.in_ch + c) * n * n;
        for (int y = 0; y < n; ++y)
          for (int x = 0; x < n; ++x) {
            if (a_in[y * n + x] <= 0.0) continue;  // ReLU mask of the previous layer
            double sum = 0.0;
            for (int f = 0; f < lay.out_ch; ++f) {
              const double* dp = dpre + (std::size_t(b) * lay.out_ch + f) * m * m;
              const double* w = p + lay.w_off + (std::size_t(f) * lay.in_ch + c) * k * k;
              const int u0 = std::max(0, y - m + 1), u1 = std::min(k - 1, y);
              for (int u = u0; u <= u1; ++u) {
                const int i = y - u;
                const int v0 = std::max(0, x - m + 1), v1 = std::min(k - 1, x);
                for (int v = v0; v <= v1; ++v) sum += w[u * k + v] * dp[i * m + (x - v)];
              }
            }
            d_in[y * n + x] = sum;
          }
      }
    }
  }
}

void QNetwork::backward_batch(const double* inputs, const double* dq, NetWorkspace& ws,
                              std::vector<double>& grad, bool parallel) const {
  const int batch = ws.batch;
  const double* p = params_.data();
  grad.assign(params_.size(), 0.0);
  ws.fc_grads.resize(fcs_.size());
  ws.local_grads.resize(local_convs_.size());
  ws.global_grads.resize(global_convs_.size());

  // Head is linear: dPre = dq directly.
  ws.fc_grads.back().assign(dq, dq + std::size_t(batch) * config_.actions);

  for (int l = int(fcs_.size()) - 1; l >= 0; --l) {
    const Layer& lay = fcs_[l];
    const double* src = l == 0 ? ws.concat.data() : ws.fc_acts[l - 1].data();
    const double* dpre = ws.fc_grads[l].data();

#pragma omp parallel for schedule(static) if (parallel)
    for (int o = 0; o < lay.out_size; ++o) {
      double* dw = grad.data() + lay.w_off + std::size_t(o) * lay.in_size;
      double db = 0.0;
      for (int b = 0; b < batch; ++b) {
        const double d = dpre[std::size_t(b) * lay.out_size + o];
        if (d == 0.0) continue;
        db += d;
        const double* in_b = src + std::size_t(b) * lay.in_size;
        for (int i = 0; i < lay.in_size; ++i) dw[i] += d * in_b[i];
      }
      grad[lay.b_off + o] = db;
    }

    // Propagate into the layer input; mask by that input's ReLU unless it is
    // the concat vector (conv outputs are already post-ReLU; the scalar and
    // the concat itself carry no activation).
    std::vector<double>& dst =
        l == 0 ? ws.concat_grad : ws.fc_grads[l - 1];
    dst.assign(std::size_t(batch) * lay.in_size, 0.0);
    const double* mask = l == 0 ? nullptr : ws.fc_acts[l - 1].data();
#pragma omp parallel for collapse(2) schedule(static) if (parallel)
    for (int b = 0; b < batch; ++b) {
      for (int i = 0; i < lay.in_size; ++i) {
        if (mask && mask[std::size_t(b) * lay.in_size + i] <= 0.0) continue;
        double sum = 0.0;
        const double* dp = dpre + std::size_t(b) * lay.out_size;
        for (int o = 0; o < lay.out_size; ++o) sum += p[lay.w_off + std::size_t(o) * lay.in_size + i] * dp[o];
        dst[std::size_t(b) * lay.in_size + i] = sum;
      }
    }
  }

  if (config_.conv_layers == 0) return;

  // Split concat gradient back into the two conv branches, applying each
  // branch's final ReLU mask.
  const int lf = config_.local_flat(), gf = config_.global_flat();
  auto seed_branch = [&](std::vector<std::vector<double>>& grads,
                         const std::vector<std::vector<double>>& acts, int offset, int flat) {
    grads.back().resize(std::size_t(batch) * flat);
    const double* a = acts.back().data();
    double* g = grads.back().data();
    for (int b = 0; b < batch; ++b)
      for (int i = 0; i < flat; ++i) {
        const std::size_t idx = std::size_t(b) * flat + i;
        g[idx] = a[idx] > 0.0 ? ws.concat_grad[std::size_t(b) * concat_len_ + offset + i] : 0.0;
      }
  };
  seed_branch(ws.local_grads, ws.local_acts, 0, lf);
  seed_branch(ws.global_grads, ws.global_acts, lf, gf);

  conv_branch_backward(inputs, batch, 0, local_convs_, ws.local_acts, ws.local_grads, grad,
                       parallel);
  conv_branch_backward(inputs, batch, config_.channels * config_.local_size * config_.local_size,
                       global_convs_, ws.global_acts, ws.global_grads, grad, parallel);
}

void soft_update(std::vector<double>& target, const std::vector<double>& online, double tau) {
  if (target.size() != online.size()) throw UsageError("parameter shape mismatch in soft update");
  for (std::size_t i = 0; i < target.size(); ++i)
    target[i] = (1.0 - tau) * target[i] + tau * online[i];
}

static constexpr char kNetMagic[8] = {'A', 'H', 'N', 'E', 'T', 0, 0, 1};

void QNetwork::save(const std::string& path) const {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open model file for writing: " + path);
  f.write(kNetMagic, 8);
  const std::string desc = config_.to_json_text();
  const std::uint32_t len = std::uint32_t(desc.size());
  char lenb[4] = {char(len & 0xff), char((len >> 8) & 0xff), char((len >> 16) & 0xff),
                  char((len >> 24) & 0xff)};
  f.write(lenb, 4);
  f.write(desc.data(), desc.size());
  std::vector<float> fp(params_.size());
  for (std::size_t i = 0; i < params_.size(); ++i) fp[i] = float(params_[i]);
  f.write(reinterpret_cast<const char*>(fp.data()), std::streamsize(fp.size() * sizeof(float)));
  if (!f) throw std::runtime_error("failed writing model file: " + path);
}

QNetwork QNetwork::load(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw UsageError("cannot open model file: " + path);
  char magic[8];
  f.read(magic, 8);
  if (!f || std::memcmp(magic, kNetMagic, 8) != 0)
    throw UsageError("not a model file (bad magic): " + path);
  char lenb[4];
  f.read(lenb, 4);
  if (!f) throw UsageError("truncated model file: " + path);
  const std::uint32_t len = std::uint32_t(std::uint8_t(lenb[0])) |
                            std::uint32_t(std::uint8_t(lenb[1])) << 8 |
                            std::uint32_t(std::uint8_t(lenb[2])) << 16 |
                            std::uint32_t(std::uint8_t(lenb[3])) << 24;
  std::string desc(len, '\0');
  f.read(desc.data(), len);
  if (!f) throw UsageError("truncated model file: " + path);
  QNetwork net(NetConfig::from_json_text(desc));
  std::vector<float> fp(net.num_params());
  f.read(reinterpret_cast<char*>(fp.data()), std::streamsize(fp.size() * sizeof(float)));
  if (!f || f.gcount() != std::streamsize(fp.size() * sizeof(float)))
    throw UsageError("model file parameter block does not match its descriptor: " + path);
  f.peek();
  if (!f.eof()) throw UsageError("trailing bytes in model file: " + path);
  for (std::size_t i = 0; i < fp.size(); ++i) net.params_[i] = double(fp[i]);
  return net;
}

}  // namespace aerharvest
