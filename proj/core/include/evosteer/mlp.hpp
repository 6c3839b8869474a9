#pragma once

#include <vector>

#include "evosteer/linalg.hpp"
#include "evosteer/rng.hpp"

namespace evosteer {

enum class Activation { tanh_fn, relu };

/// Fully-connected multilayer perceptron: affine + activation on every hidden
/// layer, linear output layer. Parameters are plain 64-bit floats; training
/// mutates them single-writer, after which the net is shared read-only.
struct Mlp {
  std::vector<int> sizes;                  // layer widths, input first
  std::vector<Activation> hidden_act;      // one entry per hidden layer
  std::vector<Mat> weights;                // weights[l]: sizes[l+1] x sizes[l]
  std::vector<Vec> biases;                 // biases[l]: sizes[l+1]

  int input_size() const { return sizes.front(); }
  int output_size() const { return sizes.back(); }
  int layer_count() const { return static_cast<int>(weights.size()); }
  std::size_t parameter_count() const;
};

/// Builds an MLP with the given widths, the same activation on every hidden
/// layer, and scaled-normal weight init (He for relu, Xavier for tanh).
Mlp make_mlp(const std::vector<int>& sizes, Activation act, RngStream& rng);

Vec mlp_forward(const Mlp& m, const Vec& x);

struct MlpGrads {
  std::vector<Mat> weights;
  std::vector<Vec> biases;
};

MlpGrads zero_grads(const Mlp& m);

/// Exact reverse-mode gradients of sum_j grad_out[j] * forward(x)[j] with
/// respect to every weight and bias. Accumulates into `grads`.
void mlp_backward(const Mlp& m, const Vec& x, const Vec& grad_out, MlpGrads& grads);
MlpGrads mlp_backward(const Mlp& m, const Vec& x, const Vec& grad_out);

struct AdamState {
  std::vector<Mat> m_w, v_w;
  std::vector<Vec> m_b, v_b;
  long step = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

AdamState make_adam(const Mlp& m);
void adam_step(Mlp& m, const MlpGrads& grads, AdamState& state, double lr);

}  // namespace evosteer
