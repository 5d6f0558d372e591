#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <limits>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pawnprint/encode/planes.hpp"
#include "pawnprint/nn/config.hpp"
#include "pawnprint/nn/gemm.hpp"

namespace pawnprint::nn {

// Residual-SE policy/value network with hand-written forward and backward
// passes. Templated on the scalar type: production runs float, the
// finite-difference test oracle instantiates the identical math in double.
//
// Activations are channel-major [C][batch*64] so convolutions, batch norm
// and the squeeze block all reduce to row operations and small GEMMs.
//
// Freezing: gradient flow stops below the top `stop_depth` residual blocks.
// Frozen layers keep their parameters and their batch-norm running
// statistics untouched and normalize with running stats, exactly like an
// inference pass through that part of the tower.
template <typename T>
class BasicNet {
 public:
  static constexpr T kBnEpsilon = T(1e-5);
  static constexpr T kBnMomentum = T(0.99);

  explicit BasicNet(const NetConfig& config)
      : config_(config), specs_(param_specs(config)) {
    params_.resize(specs_.size());
    grads_.resize(specs_.size());
    velocity_.resize(specs_.size());
    for (std::size_t i = 0; i < specs_.size(); ++i) {
      params_[i].assign(specs_[i].size(), T(0));
      grads_[i].assign(specs_[i].size(), T(0));
      if (!specs_[i].is_state() ) velocity_[i].assign(specs_[i].size(), T(0));
    }
    build_index();
  }

  const NetConfig& config() const { return config_; }
  const std::vector<ParamSpec>& specs() const { return specs_; }
  std::vector<std::vector<T>>& params() { return params_; }
  const std::vector<std::vector<T>>& params() const { return params_; }
  std::vector<std::vector<T>>& grads() { return grads_; }
  std::vector<std::vector<T>>& velocity() { return velocity_; }

  std::size_t param_index(const std::string& name) const {
    const auto it = index_.find(name);
    if (it == index_.end()) {
      throw std::invalid_argument("unknown parameter: " + name);
    }
    return it->second;
  }

  bool trainable(std::size_t param, int stop_depth) const {
    const ParamSpec& s = specs_[param];
    if (s.is_state()) return false;
    if (s.block == -2) return true;                       // heads
    if (s.block == -1) return stop_depth >= config_.blocks;  // input conv
    return s.block >= config_.blocks - stop_depth;
  }

  struct Output {
    std::vector<T> policy;  // batch x 1858, row-major per sample
    std::vector<T> value;   // batch, in [-1, 1]
  };

  // Pure function of (weights, input): eval mode normalizes with running
  // statistics, train mode with batch statistics. Neither updates state.
  Output forward(const T* planes, int batch, bool train_mode) const {
    Cache cache;
    const_cast<BasicNet*>(this)->run_forward(planes, batch, train_mode,
                                             /*update_stats=*/false,
                                             config_.blocks, cache);
    Output out;
    const int slots = NetConfig::kPolicySlots;
    out.policy.resize(static_cast<std::size_t>(batch) * slots);
    for (int s = 0; s < slots; ++s) {
      for (int b = 0; b < batch; ++b) {
        out.policy[static_cast<std::size_t>(b) * slots + s] =
            cache.logits[static_cast<std::size_t>(s) * batch + b];
      }
    }
    out.value.assign(cache.value.begin(), cache.value.end());
    return out;
  }

  // Training step: batch-stat forward (running stats updated on unfrozen
  // layers), masked softmax cross-entropy on the policy head, backward down
  // to the gradient stop. Value head is excluded from the loss, so its
  // parameters keep zero gradients. Returns the mean loss.
  T train_loss_and_grad(const T* planes, int batch,
                        const std::uint16_t* targets,
                        const encode::LegalMask* masks, int stop_depth) {
    if (batch <= 0) throw std::invalid_argument("empty batch");
    if (stop_depth < 0 || stop_depth > config_.blocks) {
      throw std::invalid_argument("stop depth out of range");
    }
    Cache& c = scratch_;
    run_forward(planes, batch, /*train_mode=*/true, /*update_stats=*/true,
                stop_depth, c);

    // Masked softmax + cross-entropy, fused with the logit gradient.
    const int slots = NetConfig::kPolicySlots;
    c.dlogits.assign(static_cast<std::size_t>(slots) * batch, T(0));
    T loss = T(0);
    for (int b = 0; b < batch; ++b) {
      const encode::LegalMask& mask = masks[static_cast<std::size_t>(b)];
      if (mask.popcount() == 0) {
        throw std::invalid_argument("all-zero legality mask in batch");
      }
      if (!mask.test(targets[static_cast<std::size_t>(b)])) {
        throw std::invalid_argument("target move is illegal under the mask");
      }
      T max_logit = -std::numeric_limits<T>::infinity();
      for (int s = 0; s < slots; ++s) {
        if (mask.test(s)) {
          max_logit =
              std::max(max_logit, c.logits[static_cast<std::size_t>(s) * batch + b]);
        }
      }
      T denom = T(0);
      for (int s = 0; s < slots; ++s) {
        if (mask.test(s)) {
          denom += std::exp(c.logits[static_cast<std::size_t>(s) * batch + b] -
                            max_logit);
        }
      }
      const std::size_t target = targets[static_cast<std::size_t>(b)];
      const T target_logit = c.logits[target * batch + b];
      loss += -(target_logit - max_logit - std::log(denom));
      const T inv_batch = T(1) / static_cast<T>(batch);
      for (int s = 0; s < slots; ++s) {
        if (!mask.test(s)) continue;
        const T p = std::exp(c.logits[static_cast<std::size_t>(s) * batch + b] -
                             max_logit) /
                    denom;
        c.dlogits[static_cast<std::size_t>(s) * batch + b] =
            (p - (static_cast<std::size_t>(s) == target ? T(1) : T(0))) *
            inv_batch;
      }
    }
    loss /= static_cast<T>(batch);

    run_backward(batch, stop_depth, c);
    return loss;
  }

  void zero_grads() {
    for (auto& g : grads_) std::fill(g.begin(), g.end(), T(0));
  }

  // Batch-statistics forward that only refreshes the running normalization
  // statistics. Used to calibrate a freshly initialized model on sample
  // positions before it is served in eval mode.
  void update_norm_stats(const T* planes, int batch) {
    Cache cache;
    run_forward(planes, batch, /*train_mode=*/true, /*update_stats=*/true,
                config_.blocks, cache);
  }

  // v <- momentum * v + g; w <- w - lr * v, on parameters with any gradient
  // flow (velocity buffers persist in checkpoints).
  void sgd_momentum_step(T lr, T momentum) {
    if (!(lr > T(0))) throw std::invalid_argument("lr must be positive");
    if (momentum < T(0) || momentum >= T(1)) {
      throw std::invalid_argument("momentum must be in [0, 1)");
    }
    for (std::size_t i = 0; i < params_.size(); ++i) {
      if (specs_[i].is_state()) continue;
      auto& w = params_[i];
      auto& g = grads_[i];
      auto& v = velocity_[i];
      for (std::size_t j = 0; j < w.size(); ++j) {
        if (!std::isfinite(static_cast<double>(g[j]))) {
          throw std::runtime_error("non-finite gradient in " + specs_[i].name);
        }
        v[j] = momentum * v[j] + g[j];
        w[j] -= lr * v[j];
      }
    }
  }

 private:
  struct Cache {
    int batch = 0;
    std::vector<T> planes;           // [112][N]
    std::vector<T> xhat0, a0;        // input stage
    std::vector<T> inv_std0;
    struct BlockCache {
      std::vector<T> in;             // block input (shared with prev a, copied)
      std::vector<T> xhat1, r1;
      std::vector<T> inv_std1;
      std::vector<T> xhat2, y2;      // y2: bn2 output, pre-SE
      std::vector<T> inv_std2;
      std::vector<T> pool, h, gate;  // SE internals
      std::vector<T> a_out;
      bool frozen = false;
    };
    std::vector<BlockCache> blocks;
    std::vector<T> zp_hat, ap;       // policy head bn/relu
    std::vector<T> inv_stdp;
    std::vector<T> feat_p;           // [ph*64][B]
    std::vector<T> logits;           // [1858][B]
    std::vector<T> zv_hat, av;       // value head
    std::vector<T> inv_stdv;
    std::vector<T> feat_v;
    std::vector<T> v1;               // post-relu dense
    std::vector<T> v2;               // pre-tanh
    std::vector<T> value;            // tanh output [B]
    std::vector<T> dlogits;
    // scratch
    std::vector<T> col, dcol, da, db_buf, dtmp;
  };

  void build_index() {
    for (std::size_t i = 0; i < specs_.size(); ++i) index_[specs_[i].name] = i;
  }

  const T* p(const char* name) const {
    return params_[index_.at(name)].data();
  }
  T* g(const char* name) { return grads_[index_.at(name)].data(); }

  // ---- kernels ------------------------------------------------------

  // im2col for 3x3 same-padding conv on 8x8 boards, channel-major input.
  // col layout: [ci*9 + tap][n] where n indexes batch*cells.
  static void im2col3(const T* in, int channels, int batch, std::vector<T>& col) {
    const int n = batch * 64;
    col.assign(static_cast<std::size_t>(channels) * 9 * n, T(0));
    for (int c = 0; c < channels; ++c) {
      const T* src = in + static_cast<std::size_t>(c) * n;
      for (int tap = 0; tap < 9; ++tap) {
        const int dr = tap / 3 - 1;
        const int dc = tap % 3 - 1;
        T* dst = col.data() + (static_cast<std::size_t>(c) * 9 + tap) * n;
        for (int b = 0; b < batch; ++b) {
          const T* s = src + static_cast<std::size_t>(b) * 64;
          T* d = dst + static_cast<std::size_t>(b) * 64;
          for (int r = 0; r < 8; ++r) {
            const int sr = r + dr;
            if (sr < 0 || sr > 7) continue;
            const int c0 = std::max(0, -dc), c1 = std::min(8, 8 - dc);
            for (int cc = c0; cc < c1; ++cc) {
              d[r * 8 + cc] = s[sr * 8 + cc + dc];
            }
          }
        }
      }
    }
  }

  // Transposed scatter of col gradients back onto the input gradient.
  static void col2im3(const std::vector<T>& dcol, int channels, int batch,
                      T* din) {
    const int n = batch * 64;
    std::memset(din, 0, sizeof(T) * static_cast<std::size_t>(channels) * n);
    for (int c = 0; c < channels; ++c) {
      T* dst = din + static_cast<std::size_t>(c) * n;
      for (int tap = 0; tap < 9; ++tap) {
        const int dr = tap / 3 - 1;
        const int dc = tap % 3 - 1;
        const T* src = dcol.data() + (static_cast<std::size_t>(c) * 9 + tap) * n;
        for (int b = 0; b < batch; ++b) {
          const T* s = src + static_cast<std::size_t>(b) * 64;
          T* d = dst + static_cast<std::size_t>(b) * 64;
          for (int r = 0; r < 8; ++r) {
            const int sr = r + dr;
            if (sr < 0 || sr > 7) continue;
            const int c0 = std::max(0, -dc), c1 = std::min(8, 8 - dc);
            for (int cc = c0; cc < c1; ++cc) {
              d[sr * 8 + cc + dc] += s[r * 8 + cc];
            }
          }
        }
      }
    }
  }

  // Batch norm over channel rows. Train mode returns xhat and inv_std for
  // backward; eval mode normalizes with running stats.
  void bn_forward(const char* prefix, const T* in, T* out, int channels,
                  int n, bool train_mode, bool update_stats,
                  std::vector<T>* xhat, std::vector<T>* inv_std) {
    const std::size_t base = index_.at(std::string(prefix) + "/gamma");
    const T* gamma = params_[base].data();
    const T* beta = params_[base + 1].data();
    T* mean = params_[base + 2].data();
    T* var = params_[base + 3].data();
    if (train_mode) {
      xhat->assign(static_cast<std::size_t>(channels) * n, T(0));
      inv_std->assign(static_cast<std::size_t>(channels), T(0));
    }
    for (int c = 0; c < channels; ++c) {
      const T* x = in + static_cast<std::size_t>(c) * n;
      T* y = out + static_cast<std::size_t>(c) * n;
      T mu, istd;
      if (train_mode) {
        T sum = T(0);
        for (int i = 0; i < n; ++i) sum += x[i];
        mu = sum / static_cast<T>(n);
        T ss = T(0);
        for (int i = 0; i < n; ++i) {
          const T d = x[i] - mu;
          ss += d * d;
        }
        const T sigma2 = ss / static_cast<T>(n);
        istd = T(1) / std::sqrt(sigma2 + kBnEpsilon);
        if (update_stats) {
          mean[c] = kBnMomentum * mean[c] + (T(1) - kBnMomentum) * mu;
          var[c] = kBnMomentum * var[c] + (T(1) - kBnMomentum) * sigma2;
        }
        (*inv_std)[static_cast<std::size_t>(c)] = istd;
        T* xh = xhat->data() + static_cast<std::size_t>(c) * n;
        for (int i = 0; i < n; ++i) {
          xh[i] = (x[i] - mu) * istd;
          y[i] = gamma[c] * xh[i] + beta[c];
        }
      } else {
        mu = mean[c];
        istd = T(1) / std::sqrt(var[c] + kBnEpsilon);
        for (int i = 0; i < n; ++i) {
          y[i] = gamma[c] * (x[i] - mu) * istd + beta[c];
        }
      }
    }
  }

  // dyn is consumed in place; din may alias dyn.
  void bn_backward(const char* prefix, const std::vector<T>& xhat,
                   const std::vector<T>& inv_std, const T* dy, T* din,
                   int channels, int n) {
    const std::size_t base = index_.at(std::string(prefix) + "/gamma");
    const T* gamma = params_[base].data();
    T* dgamma = grads_[base].data();
    T* dbeta = grads_[base + 1].data();
    for (int c = 0; c < channels; ++c) {
      const T* xh = xhat.data() + static_cast<std::size_t>(c) * n;
      const T* dyc = dy + static_cast<std::size_t>(c) * n;
      T* dx = din + static_cast<std::size_t>(c) * n;
      T sum_dy = T(0), sum_dy_xhat = T(0);
      for (int i = 0; i < n; ++i) {
        sum_dy += dyc[i];
        sum_dy_xhat += dyc[i] * xh[i];
      }
      dgamma[c] += sum_dy_xhat;
      dbeta[c] += sum_dy;
      const T scale = gamma[c] * inv_std[static_cast<std::size_t>(c)];
      const T mean_dy = sum_dy / static_cast<T>(n);
      const T mean_dy_xhat = sum_dy_xhat / static_cast<T>(n);
      for (int i = 0; i < n; ++i) {
        dx[i] = scale * (dyc[i] - mean_dy - xh[i] * mean_dy_xhat);
      }
    }
  }

  static void relu_inplace(T* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) x[i] = x[i] > T(0) ? x[i] : T(0);
  }
  // dx = dy where the stored output was positive.
  static void relu_backward(const T* out, const T* dy, T* dx, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) dx[i] = out[i] > T(0) ? dy[i] : T(0);
  }

  // ---- forward ------------------------------------------------------

  void run_forward(const T* planes, int batch, bool train_mode,
                   bool update_stats, int stop_depth, Cache& c) {
    const int f = config_.filters;
    const int n = batch * 64;
    c.batch = batch;

    {
      // Basic input hygiene: the rest of the pass assumes finite numbers.
      const std::size_t total =
          static_cast<std::size_t>(NetConfig::kInputPlanes) * n;
      T probe = T(0);
      for (std::size_t i = 0; i < total; ++i) probe += planes[i];
      if (!std::isfinite(static_cast<double>(probe))) {
        throw std::invalid_argument("non-finite values in input planes");
      }
    }

    const bool input_frozen = stop_depth < config_.blocks;
    c.planes.assign(planes,
                    planes + static_cast<std::size_t>(NetConfig::kInputPlanes) * n);

    // Input conv + bn + relu.
    im2col3(planes, NetConfig::kInputPlanes, batch, c.col);
    c.a0.assign(static_cast<std::size_t>(f) * n, T(0));
    gemm_nn(static_cast<std::size_t>(f), static_cast<std::size_t>(n),
            static_cast<std::size_t>(NetConfig::kInputPlanes) * 9,
            p("input/conv/w"), c.col.data(), c.a0.data());
    std::vector<T>& bn0_out = c.a0;  // in place
    bn_forward("input/bn", c.a0.data(), bn0_out.data(), f, n,
               train_mode && !input_frozen, update_stats && !input_frozen,
               &c.xhat0, &c.inv_std0);
    relu_inplace(c.a0.data(), c.a0.size());

    // Residual tower.
    c.blocks.resize(static_cast<std::size_t>(config_.blocks));
    const std::vector<T>* prev = &c.a0;
    for (int b = 0; b < config_.blocks; ++b) {
      auto& blk = c.blocks[static_cast<std::size_t>(b)];
      blk.frozen = b < config_.blocks - stop_depth;
      const bool bn_train = train_mode && !blk.frozen;
      const bool bn_update = update_stats && !blk.frozen;
      const std::string pre = "block" + std::to_string(b);
      blk.in = *prev;

      im2col3(blk.in.data(), f, batch, c.col);
      blk.r1.assign(static_cast<std::size_t>(f) * n, T(0));
      gemm_nn(static_cast<std::size_t>(f), static_cast<std::size_t>(n),
              static_cast<std::size_t>(f) * 9,
              p((pre + "/conv1/w").c_str()), c.col.data(), blk.r1.data());
      bn_forward((pre + "/bn1").c_str(), blk.r1.data(), blk.r1.data(), f, n,
                 bn_train, bn_update, &blk.xhat1, &blk.inv_std1);
      relu_inplace(blk.r1.data(), blk.r1.size());

      im2col3(blk.r1.data(), f, batch, c.col);
      blk.y2.assign(static_cast<std::size_t>(f) * n, T(0));
      gemm_nn(static_cast<std::size_t>(f), static_cast<std::size_t>(n),
              static_cast<std::size_t>(f) * 9,
              p((pre + "/conv2/w").c_str()), c.col.data(), blk.y2.data());
      bn_forward((pre + "/bn2").c_str(), blk.y2.data(), blk.y2.data(), f, n,
                 bn_train, bn_update, &blk.xhat2, &blk.inv_std2);

      // Squeeze-excite: global average pool, two dense layers, sigmoid gate.
      const int squeeze = f / config_.se_ratio;
      blk.pool.assign(static_cast<std::size_t>(f) * batch, T(0));
      for (int ch = 0; ch < f; ++ch) {
        const T* src = blk.y2.data() + static_cast<std::size_t>(ch) * n;
        for (int bb = 0; bb < batch; ++bb) {
          T sum = T(0);
          const T* cell = src + static_cast<std::size_t>(bb) * 64;
          for (int i = 0; i < 64; ++i) sum += cell[i];
          blk.pool[static_cast<std::size_t>(ch) * batch + bb] =
              sum / T(64);
        }
      }
      blk.h.assign(static_cast<std::size_t>(squeeze) * batch, T(0));
      gemm_nn(static_cast<std::size_t>(squeeze),
              static_cast<std::size_t>(batch), static_cast<std::size_t>(f),
              p((pre + "/se/fc1/w").c_str()), blk.pool.data(), blk.h.data());
      {
        const T* bias = p((pre + "/se/fc1/b").c_str());
        for (int r = 0; r < squeeze; ++r) {
          T* row = blk.h.data() + static_cast<std::size_t>(r) * batch;
          for (int bb = 0; bb < batch; ++bb) row[bb] += bias[r];
        }
      }
      relu_inplace(blk.h.data(), blk.h.size());
      blk.gate.assign(static_cast<std::size_t>(f) * batch, T(0));
      gemm_nn(static_cast<std::size_t>(f), static_cast<std::size_t>(batch),
              static_cast<std::size_t>(squeeze),
              p((pre + "/se/fc2/w").c_str()), blk.h.data(), blk.gate.data());
      {
        const T* bias = p((pre + "/se/fc2/b").c_str());
        for (int r = 0; r < f; ++r) {
          T* row = blk.gate.data() + static_cast<std::size_t>(r) * batch;
          for (int bb = 0; bb < batch; ++bb) {
            row[bb] = T(1) / (T(1) + std::exp(-(row[bb] + bias[r])));
          }
        }
      }

      // Scale, add skip, relu.
      blk.a_out.assign(static_cast<std::size_t>(f) * n, T(0));
      for (int ch = 0; ch < f; ++ch) {
        const T* y = blk.y2.data() + static_cast<std::size_t>(ch) * n;
        const T* skip = blk.in.data() + static_cast<std::size_t>(ch) * n;
        T* out = blk.a_out.data() + static_cast<std::size_t>(ch) * n;
        for (int bb = 0; bb < batch; ++bb) {
          const T gate = blk.gate[static_cast<std::size_t>(ch) * batch + bb];
          const std::size_t off = static_cast<std::size_t>(bb) * 64;
          for (int i = 0; i < 64; ++i) {
            const T v = y[off + i] * gate + skip[off + i];
            out[off + i] = v > T(0) ? v : T(0);
          }
        }
      }
      prev = &blk.a_out;
    }
    const std::vector<T>& tower = *prev;

    // Policy head.
    const int ph = config_.policy_hidden;
    c.ap.assign(static_cast<std::size_t>(ph) * n, T(0));
    gemm_nn(static_cast<std::size_t>(ph), static_cast<std::size_t>(n),
            static_cast<std::size_t>(f), p("policy/conv/w"), tower.data(),
            c.ap.data());
    bn_forward("policy/bn", c.ap.data(), c.ap.data(), ph, n, train_mode,
               update_stats, &c.zp_hat, &c.inv_stdp);
    relu_inplace(c.ap.data(), c.ap.size());
    // Gather [ph][B*64] into feature-major [ph*64][B].
    c.feat_p.assign(static_cast<std::size_t>(ph) * 64 * batch, T(0));
    for (int ch = 0; ch < ph; ++ch) {
      for (int bb = 0; bb < batch; ++bb) {
        const T* src =
            c.ap.data() + static_cast<std::size_t>(ch) * n + bb * 64;
        for (int i = 0; i < 64; ++i) {
          c.feat_p[(static_cast<std::size_t>(ch) * 64 + i) * batch + bb] =
              src[i];
        }
      }
    }
    const int slots = NetConfig::kPolicySlots;
    c.logits.assign(static_cast<std::size_t>(slots) * batch, T(0));
    gemm_nn(static_cast<std::size_t>(slots), static_cast<std::size_t>(batch),
            static_cast<std::size_t>(ph) * 64, p("policy/fc/w"),
            c.feat_p.data(), c.logits.data());
    {
      const T* bias = p("policy/fc/b");
      for (int s = 0; s < slots; ++s) {
        T* row = c.logits.data() + static_cast<std::size_t>(s) * batch;
        for (int bb = 0; bb < batch; ++bb) row[bb] += bias[s];
      }
    }

    // Value head (kept for topology compatibility; not part of the policy
    // loss).
    const int vc = NetConfig::kValueConvChannels;
    c.av.assign(static_cast<std::size_t>(vc) * n, T(0));
    gemm_nn(static_cast<std::size_t>(vc), static_cast<std::size_t>(n),
            static_cast<std::size_t>(f), p("value/conv/w"), tower.data(),
            c.av.data());
    bn_forward("value/bn", c.av.data(), c.av.data(), vc, n, train_mode,
               update_stats, &c.zv_hat, &c.inv_stdv);
    relu_inplace(c.av.data(), c.av.size());
    c.feat_v.assign(static_cast<std::size_t>(vc) * 64 * batch, T(0));
    for (int ch = 0; ch < vc; ++ch) {
      for (int bb = 0; bb < batch; ++bb) {
        const T* src =
            c.av.data() + static_cast<std::size_t>(ch) * n + bb * 64;
        for (int i = 0; i < 64; ++i) {
          c.feat_v[(static_cast<std::size_t>(ch) * 64 + i) * batch + bb] =
              src[i];
        }
      }
    }
    const int vh = config_.value_hidden;
    c.v1.assign(static_cast<std::size_t>(vh) * batch, T(0));
    gemm_nn(static_cast<std::size_t>(vh), static_cast<std::size_t>(batch),
            static_cast<std::size_t>(vc) * 64, p("value/fc1/w"),
            c.feat_v.data(), c.v1.data());
    {
      const T* bias = p("value/fc1/b");
      for (int r = 0; r < vh; ++r) {
        T* row = c.v1.data() + static_cast<std::size_t>(r) * batch;
        for (int bb = 0; bb < batch; ++bb) row[bb] += bias[r];
      }
    }
    relu_inplace(c.v1.data(), c.v1.size());
    c.v2.assign(static_cast<std::size_t>(batch), T(0));
    gemm_nn(1, static_cast<std::size_t>(batch), static_cast<std::size_t>(vh),
            p("value/fc2/w"), c.v1.data(), c.v2.data());
    c.value.assign(static_cast<std::size_t>(batch), T(0));
    const T vbias = p("value/fc2/b")[0];
    for (int bb = 0; bb < batch; ++bb) {
      c.value[static_cast<std::size_t>(bb)] =
          std::tanh(c.v2[static_cast<std::size_t>(bb)] + vbias);
    }
  }

  // ---- backward -----------------------------------------------------

  void run_backward(int batch, int stop_depth, Cache& c) {
    const int f = config_.filters;
    const int n = batch * 64;
    const int ph = config_.policy_hidden;
    const int slots = NetConfig::kPolicySlots;

    // Policy dense.
    gemm_nt(static_cast<std::size_t>(slots),
            static_cast<std::size_t>(ph) * 64, static_cast<std::size_t>(batch),
            c.dlogits.data(), c.feat_p.data(), g("policy/fc/w"));
    {
      T* db = g("policy/fc/b");
      for (int s = 0; s < slots; ++s) {
        const T* row = c.dlogits.data() + static_cast<std::size_t>(s) * batch;
        T acc = T(0);
        for (int bb = 0; bb < batch; ++bb) acc += row[bb];
        db[s] += acc;
      }
    }
    c.dtmp.assign(static_cast<std::size_t>(ph) * 64 * batch, T(0));
    gemm_tn(static_cast<std::size_t>(ph) * 64, static_cast<std::size_t>(batch),
            static_cast<std::size_t>(slots), p("policy/fc/w"),
            c.dlogits.data(), c.dtmp.data());

    // Scatter features back to [ph][B*64], through the relu and bn.
    c.da.assign(static_cast<std::size_t>(ph) * n, T(0));
    for (int ch = 0; ch < ph; ++ch) {
      for (int bb = 0; bb < batch; ++bb) {
        T* dst = c.da.data() + static_cast<std::size_t>(ch) * n + bb * 64;
        for (int i = 0; i < 64; ++i) {
          dst[i] = c.dtmp[(static_cast<std::size_t>(ch) * 64 + i) * batch + bb];
        }
      }
    }
    relu_backward(c.ap.data(), c.da.data(), c.da.data(), c.da.size());
    bn_backward("policy/bn", c.zp_hat, c.inv_stdp, c.da.data(), c.da.data(),
                ph, n);

    // Policy 1x1 conv: dW += dz * tower^T ; dtower = W^T * dz.
    const std::vector<T>& tower = config_.blocks > 0
                                      ? c.blocks.back().a_out
                                      : c.a0;
    gemm_nt(static_cast<std::size_t>(ph), static_cast<std::size_t>(f),
            static_cast<std::size_t>(n), c.da.data(), tower.data(),
            g("policy/conv/w"));
    c.db_buf.assign(static_cast<std::size_t>(f) * n, T(0));
    gemm_tn(static_cast<std::size_t>(f), static_cast<std::size_t>(n),
            static_cast<std::size_t>(ph), p("policy/conv/w"), c.da.data(),
            c.db_buf.data());
    std::vector<T>& dtower = c.db_buf;

    // Residual blocks, top down, until the gradient stop.
    std::vector<T>& dout = dtower;
    for (int b = config_.blocks - 1; b >= 0; --b) {
      auto& blk = c.blocks[static_cast<std::size_t>(b)];
      if (blk.frozen) return;  // nothing below is trainable
      const std::string pre = "block" + std::to_string(b);
      const int squeeze = f / config_.se_ratio;

      // Through the final relu: mask by a_out.
      relu_backward(blk.a_out.data(), dout.data(), dout.data(), dout.size());
      // dout is now d(sum); skip path keeps a copy, conv path continues.
      c.da.assign(dout.begin(), dout.end());  // d(skip) accumulator

      // SE backward: scaled = y2 * gate (per channel/batch).
      // dgate and dy2 first.
      std::vector<T>& dscaled = dout;
      std::vector<T> dgate(static_cast<std::size_t>(f) * batch, T(0));
      for (int ch = 0; ch < f; ++ch) {
        const T* y = blk.y2.data() + static_cast<std::size_t>(ch) * n;
        const T* ds = dscaled.data() + static_cast<std::size_t>(ch) * n;
        for (int bb = 0; bb < batch; ++bb) {
          T acc = T(0);
          const std::size_t off = static_cast<std::size_t>(bb) * 64;
          for (int i = 0; i < 64; ++i) acc += ds[off + i] * y[off + i];
          dgate[static_cast<std::size_t>(ch) * batch + bb] = acc;
        }
      }
      // dy2 (in place over dscaled): dy2 = dscaled * gate, plus the pooled
      // path added below.
      for (int ch = 0; ch < f; ++ch) {
        T* ds = dscaled.data() + static_cast<std::size_t>(ch) * n;
        for (int bb = 0; bb < batch; ++bb) {
          const T gate = blk.gate[static_cast<std::size_t>(ch) * batch + bb];
          const std::size_t off = static_cast<std::size_t>(bb) * 64;
          for (int i = 0; i < 64; ++i) ds[off + i] *= gate;
        }
      }
      // Sigmoid backward.
      std::vector<T> dsig(static_cast<std::size_t>(f) * batch, T(0));
      for (std::size_t i = 0; i < dsig.size(); ++i) {
        const T gate = blk.gate[i];
        dsig[i] = dgate[i] * gate * (T(1) - gate);
      }
      {
        T* db = g((pre + "/se/fc2/b").c_str());
        for (int r = 0; r < f; ++r) {
          const T* row = dsig.data() + static_cast<std::size_t>(r) * batch;
          T acc = T(0);
          for (int bb = 0; bb < batch; ++bb) acc += row[bb];
          db[r] += acc;
        }
      }
      gemm_nt(static_cast<std::size_t>(f), static_cast<std::size_t>(squeeze),
              static_cast<std::size_t>(batch), dsig.data(), blk.h.data(),
              g((pre + "/se/fc2/w").c_str()));
      std::vector<T> dh(static_cast<std::size_t>(squeeze) * batch, T(0));
      gemm_tn(static_cast<std::size_t>(squeeze),
              static_cast<std::size_t>(batch), static_cast<std::size_t>(f),
              p((pre + "/se/fc2/w").c_str()), dsig.data(), dh.data());
      relu_backward(blk.h.data(), dh.data(), dh.data(), dh.size());
      {
        T* db = g((pre + "/se/fc1/b").c_str());
        for (int r = 0; r < squeeze; ++r) {
          const T* row = dh.data() + static_cast<std::size_t>(r) * batch;
          T acc = T(0);
          for (int bb = 0; bb < batch; ++bb) acc += row[bb];
          db[r] += acc;
        }
      }
      gemm_nt(static_cast<std::size_t>(squeeze), static_cast<std::size_t>(f),
              static_cast<std::size_t>(batch), dh.data(), blk.pool.data(),
              g((pre + "/se/fc1/w").c_str()));
      std::vector<T> dpool(static_cast<std::size_t>(f) * batch, T(0));
      gemm_tn(static_cast<std::size_t>(f), static_cast<std::size_t>(batch),
              static_cast<std::size_t>(squeeze),
              p((pre + "/se/fc1/w").c_str()), dh.data(), dpool.data());
      // Pooled gradient spreads evenly over the 64 cells.
      for (int ch = 0; ch < f; ++ch) {
        T* ds = dscaled.data() + static_cast<std::size_t>(ch) * n;
        for (int bb = 0; bb < batch; ++bb) {
          const T add =
              dpool[static_cast<std::size_t>(ch) * batch + bb] / T(64);
          const std::size_t off = static_cast<std::size_t>(bb) * 64;
          for (int i = 0; i < 64; ++i) ds[off + i] += add;
        }
      }

      // bn2 + conv2.
      bn_backward((pre + "/bn2").c_str(), blk.xhat2, blk.inv_std2,
                  dscaled.data(), dscaled.data(), f, n);
      im2col3(blk.r1.data(), f, batch, c.col);
      gemm_nt(static_cast<std::size_t>(f), static_cast<std::size_t>(f) * 9,
              static_cast<std::size_t>(n), dscaled.data(), c.col.data(),
              g((pre + "/conv2/w").c_str()));
      c.dcol.assign(static_cast<std::size_t>(f) * 9 * n, T(0));
      gemm_tn(static_cast<std::size_t>(f) * 9, static_cast<std::size_t>(n),
              static_cast<std::size_t>(f), p((pre + "/conv2/w").c_str()),
              dscaled.data(), c.dcol.data());
      std::vector<T> dr1(static_cast<std::size_t>(f) * n, T(0));
      col2im3(c.dcol, f, batch, dr1.data());

      // relu + bn1 + conv1.
      relu_backward(blk.r1.data(), dr1.data(), dr1.data(), dr1.size());
      bn_backward((pre + "/bn1").c_str(), blk.xhat1, blk.inv_std1, dr1.data(),
                  dr1.data(), f, n);
      im2col3(blk.in.data(), f, batch, c.col);
      gemm_nt(static_cast<std::size_t>(f), static_cast<std::size_t>(f) * 9,
              static_cast<std::size_t>(n), dr1.data(), c.col.data(),
              g((pre + "/conv1/w").c_str()));

      const bool lower_needed =
          b > 0 ? !c.blocks[static_cast<std::size_t>(b - 1)].frozen
                : stop_depth >= config_.blocks;
      if (!lower_needed) return;

      c.dcol.assign(static_cast<std::size_t>(f) * 9 * n, T(0));
      gemm_tn(static_cast<std::size_t>(f) * 9, static_cast<std::size_t>(n),
              static_cast<std::size_t>(f), p((pre + "/conv1/w").c_str()),
              dr1.data(), c.dcol.data());
      std::vector<T> din(static_cast<std::size_t>(f) * n, T(0));
      col2im3(c.dcol, f, batch, din.data());
      for (std::size_t i = 0; i < din.size(); ++i) c.da[i] += din[i];
      dout = c.da;  // becomes d(a_out) of the block below
    }

    // Input stage (only when gradients flow the full depth).
    if (stop_depth >= config_.blocks) {
      relu_backward(c.a0.data(), dout.data(), dout.data(), dout.size());
      bn_backward("input/bn", c.xhat0, c.inv_std0, dout.data(), dout.data(),
                  f, n);
      im2col3(c.planes.data(), NetConfig::kInputPlanes, batch, c.col);
      gemm_nt(static_cast<std::size_t>(f),
              static_cast<std::size_t>(NetConfig::kInputPlanes) * 9,
              static_cast<std::size_t>(n), dout.data(), c.col.data(),
              g("input/conv/w"));
    }
  }

  NetConfig config_;
  std::vector<ParamSpec> specs_;
  std::vector<std::vector<T>> params_;
  std::vector<std::vector<T>> grads_;
  std::vector<std::vector<T>> velocity_;
  std::map<std::string, std::size_t> index_;
  Cache scratch_;
};

using PolicyValueNet = BasicNet<float>;

// Masked policy distribution: softmax over legal slots, exactly zero on
// illegal ones. Throws on an all-zero mask.
std::vector<float> masked_policy(std::span<const float> logits,
                                 const encode::LegalMask& mask);

}  // namespace pawnprint::nn
