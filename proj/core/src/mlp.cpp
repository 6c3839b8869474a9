#include "evosteer/mlp.hpp"

#include <cmath>

#include "evosteer/errors.hpp"

namespace evosteer {

namespace {

double activate(double z, Activation act) {
  return act == Activation::tanh_fn ? std::tanh(z) : (z > 0.0 ? z : 0.0);
}

// Derivative in terms of the pre-activation z. relu uses subgradient 0 at 0.
double activate_grad(double z, Activation act) {
  if (act == Activation::tanh_fn) {
    const double t = std::tanh(z);
    return 1.0 - t * t;
  }
  return z > 0.0 ? 1.0 : 0.0;
}

// z = W a + b
void affine(const Mat& w, const Vec& b, const Vec& a, Vec& z) {
  z.assign(b.begin(), b.end());
  for (int i = 0; i < w.rows; ++i) {
    const double* row = &w.data[static_cast<std::size_t>(i) * w.cols];
    double s = 0.0;
    for (int j = 0; j < w.cols; ++j) s += row[j] * a[j];
    z[i] += s;
  }
}

struct ForwardCache {
  std::vector<Vec> pre;   // z_l per layer
  std::vector<Vec> post;  // a_l per layer (post[last] is the linear output)
};

void forward_cached(const Mlp& m, const Vec& x, ForwardCache& cache) {
  const int layers = m.layer_count();
  cache.pre.resize(layers);
  cache.post.resize(layers);
  const Vec* in = &x;
  for (int l = 0; l < layers; ++l) {
    affine(m.weights[l], m.biases[l], *in, cache.pre[l]);
    if (l + 1 < layers) {
      const Activation act = m.hidden_act[l];
      cache.post[l].resize(cache.pre[l].size());
      for (std::size_t i = 0; i < cache.pre[l].size(); ++i)
        cache.post[l][i] = activate(cache.pre[l][i], act);
    } else {
      cache.post[l] = cache.pre[l];
    }
    in = &cache.post[l];
  }
}

}  // namespace

std::size_t Mlp::parameter_count() const {
  std::size_t n = 0;
  for (int l = 0; l < layer_count(); ++l)
    n += weights[l].data.size() + biases[l].size();
  return n;
}

Mlp make_mlp(const std::vector<int>& sizes, Activation act, RngStream& rng) {
  if (sizes.size() < 2) throw DimensionError("make_mlp: need at least input and output layers");
  for (int s : sizes)
    if (s < 1) throw DimensionError("make_mlp: layer sizes must be positive");

  Mlp m;
  m.sizes = sizes;
  m.hidden_act.assign(sizes.size() - 2, act);
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    const int fan_in = sizes[l];
    const int fan_out = sizes[l + 1];
    const double gain = act == Activation::relu ? 2.0 : 1.0;
    const double sd = std::sqrt(gain / fan_in);
    Mat w(fan_out, fan_in);
    for (double& v : w.data) v = sd * rng.next_gauss();
    m.weights.push_back(std::move(w));
    m.biases.emplace_back(fan_out, 0.0);
  }
  return m;
}

Vec mlp_forward(const Mlp& m, const Vec& x) {
  if (static_cast<int>(x.size()) != m.input_size())
    throw DimensionError("mlp_forward: input size mismatch");
  ForwardCache cache;
  forward_cached(m, x, cache);
  return cache.post.back();
}

MlpGrads zero_grads(const Mlp& m) {
  MlpGrads g;
  for (int l = 0; l < m.layer_count(); ++l) {
    g.weights.emplace_back(m.weights[l].rows, m.weights[l].cols);
    g.biases.emplace_back(m.biases[l].size(), 0.0);
  }
  return g;
}

void mlp_backward(const Mlp& m, const Vec& x, const Vec& grad_out, MlpGrads& grads) {
  if (static_cast<int>(x.size()) != m.input_size())
    throw DimensionError("mlp_backward: input size mismatch");
  if (static_cast<int>(grad_out.size()) != m.output_size())
    throw DimensionError("mlp_backward: grad_out size mismatch");

  ForwardCache cache;
  forward_cached(m, x, cache);

  const int layers = m.layer_count();
  Vec delta = grad_out;
  for (int l = layers - 1; l >= 0; --l) {
    const Vec& input = l == 0 ? x : cache.post[l - 1];
    Mat& dw = grads.weights[l];
    Vec& db = grads.biases[l];
    for (int i = 0; i < dw.rows; ++i) {
      const double d = delta[i];
      db[i] += d;
      double* row = &dw.data[static_cast<std::size_t>(i) * dw.cols];
      for (int j = 0; j < dw.cols; ++j) row[j] += d * input[j];
    }
    if (l == 0) break;
    const Mat& w = m.weights[l];
    Vec prev(w.cols, 0.0);
    for (int i = 0; i < w.rows; ++i) {
      const double d = delta[i];
      const double* row = &w.data[static_cast<std::size_t>(i) * w.cols];
      for (int j = 0; j < w.cols; ++j) prev[j] += d * row[j];
    }
    const Activation act = m.hidden_act[l - 1];
    for (int j = 0; j < w.cols; ++j) prev[j] *= activate_grad(cache.pre[l - 1][j], act);
    delta = std::move(prev);
  }
}

MlpGrads mlp_backward(const Mlp& m, const Vec& x, const Vec& grad_out) {
  MlpGrads g = zero_grads(m);
  mlp_backward(m, x, grad_out, g);
  return g;
}

AdamState make_adam(const Mlp& m) {
  AdamState s;
  for (int l = 0; l < m.layer_count(); ++l) {
    s.m_w.emplace_back(m.weights[l].rows, m.weights[l].cols);
    s.v_w.emplace_back(m.weights[l].rows, m.weights[l].cols);
    s.m_b.emplace_back(m.biases[l].size(), 0.0);
    s.v_b.emplace_back(m.biases[l].size(), 0.0);
  }
  return s;
}

void adam_step(Mlp& m, const MlpGrads& grads, AdamState& state, double lr) {
  ++state.step;
  const double bc1 = 1.0 - std::pow(state.beta1, state.step);
  const double bc2 = 1.0 - std::pow(state.beta2, state.step);
  auto update = [&](double& param, double g, double& mm, double& vv) {
    mm = state.beta1 * mm + (1.0 - state.beta1) * g;
    vv = state.beta2 * vv + (1.0 - state.beta2) * g * g;
    param -= lr * (mm / bc1) / (std::sqrt(vv / bc2) + state.eps);
  };
  for (int l = 0; l < m.layer_count(); ++l) {
    Mat& w = m.weights[l];
    for (std::size_t i = 0; i < w.data.size(); ++i)
      update(w.data[i], grads.weights[l].data[i], state.m_w[l].data[i], state.v_w[l].data[i]);
    Vec& b = m.biases[l];
    for (std::size_t i = 0; i < b.size(); ++i)
      update(b[i], grads.biases[l][i], state.m_b[l][i], state.v_b[l][i]);
  }
}

}  // namespace evosteer
