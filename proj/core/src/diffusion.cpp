#include "evosteer/diffusion.hpp"

#include <cmath>
#include <cstring>

#include "evosteer/errors.hpp"

namespace evosteer {

namespace {

void check_context(const DenoiserModel& model, const Vec& context) {
  if (static_cast<int>(context.size()) != model.context_dim)
    throw DimensionError("diffusion: context dimension mismatch");
}

void check_action(const DenoiserModel& model, const Vec& a) {
  if (static_cast<int>(a.size()) != model.action_dim)
    throw DimensionError("diffusion: action dimension mismatch");
}

// Concatenated denoiser input [noised_action | context | time_embedding].
void build_input(const DenoiserModel& model, const Vec& noised, const Vec& context, int t,
                 Vec& input) {
  input.clear();
  input.reserve(noised.size() + context.size() + model.time_embed_width);
  input.insert(input.end(), noised.begin(), noised.end());
  input.insert(input.end(), context.begin(), context.end());
  const Vec emb = time_embedding(t, model.time_embed_width);
  input.insert(input.end(), emb.begin(), emb.end());
}

}  // namespace

Vec time_embedding(int t, int width) {
  if (width < 2 || width % 2 != 0)
    throw ConfigError("time_embedding: width must be a positive even number");
  Vec emb(static_cast<std::size_t>(width));
  const int half = width / 2;
  for (int i = 0; i < half; ++i) {
    const double freq = std::exp(-std::log(10000.0) * static_cast<double>(i) / half);
    emb[2 * i] = std::sin(t * freq);
    emb[2 * i + 1] = std::cos(t * freq);
  }
  return emb;
}

DenoiserModel make_denoiser(int action_dim, int context_dim, const NoiseSchedule& schedule,
                            const ArchParams& arch, std::uint64_t seed) {
  if (action_dim < 1) throw ConfigError("make_denoiser: action_dim must be >= 1");
  if (context_dim < 0) throw ConfigError("make_denoiser: context_dim must be >= 0");
  DenoiserModel model;
  model.action_dim = action_dim;
  model.context_dim = context_dim;
  model.time_embed_width = arch.time_embed_width;
  model.schedule = schedule;

  std::vector<int> sizes;
  sizes.push_back(action_dim + context_dim + arch.time_embed_width);
  sizes.insert(sizes.end(), arch.hidden.begin(), arch.hidden.end());
  sizes.push_back(action_dim);
  RngStream init_rng(seed, /*stream_id=*/0x1417);
  model.mlp = make_mlp(sizes, arch.activation, init_rng);
  return model;
}

DenoiserModel train_policy(const std::vector<Demo>& demos, const TrainConfig& cfg,
                           const NoiseSchedule& schedule, const ArchParams& arch,
                           TrainStats* stats) {
  if (demos.empty()) throw Error("train_policy: empty demos");
  if (cfg.steps < 0 || cfg.batch_size < 1 || !(cfg.learning_rate > 0.0))
    throw ConfigError("train_policy: invalid training config");

  const int action_dim = static_cast<int>(demos.front().action.size());
  const int context_dim = static_cast<int>(demos.front().context.size());
  for (const Demo& d : demos) {
    if (static_cast<int>(d.action.size()) != action_dim ||
        static_cast<int>(d.context.size()) != context_dim)
      throw DimensionError("train_policy: inconsistent demo dimensions");
    require_finite(d.action, "demo action");
    require_finite(d.context, "demo context");
  }

  DenoiserModel model = make_denoiser(action_dim, context_dim, schedule, arch, cfg.seed);
  AdamState adam = make_adam(model.mlp);
  RngStream rng(cfg.seed, /*stream_id=*/0x7249);

  const int T = schedule.steps;
  const double inv_scale = 1.0 / (static_cast<double>(cfg.batch_size) * action_dim);

  double loss_window = 0.0;
  int window_count = 0;
  Vec input, eps, noised, grad_out;
  for (int step = 0; step < cfg.steps; ++step) {
    MlpGrads grads = zero_grads(model.mlp);
    double batch_loss = 0.0;
    for (int b = 0; b < cfg.batch_size; ++b) {
      const Demo& demo = demos[rng.next_below(demos.size())];
      const int t = 1 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(T)));
      eps = gauss(rng, action_dim);
      noised = noise_action(demo.action, schedule.alpha_bar_at(t), eps);
      build_input(model, noised, demo.context, t, input);
      const Vec pred = mlp_forward(model.mlp, input);
      grad_out.resize(pred.size());
      for (int j = 0; j < action_dim; ++j) {
        const double r = pred[j] - eps[j];
        batch_loss += r * r;
        grad_out[j] = 2.0 * r * inv_scale;
      }
      mlp_backward(model.mlp, input, grad_out, grads);
    }
    adam_step(model.mlp, grads, adam, cfg.learning_rate);
    if (step >= cfg.steps - 100) {
      loss_window += batch_loss * inv_scale;
      ++window_count;
    }
  }
  if (stats) stats->final_loss = window_count ? loss_window / window_count : 0.0;
  for (const Mat& w : model.mlp.weights) require_finite(w.data, "trained weights");
  return model;
}

Vec noise_action(const Vec& a, double alpha_bar, const Vec& eps) {
  if (a.size() != eps.size()) throw DimensionError("noise_action: eps size mismatch");
  if (!(alpha_bar > 0.0) || alpha_bar > 1.0)
    throw Error("noise_action: alpha_bar must be in (0, 1]");
  const double signal = std::sqrt(alpha_bar);
  const double noise = std::sqrt(1.0 - alpha_bar);
  Vec out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = signal * a[i] + noise * eps[i];
  return out;
}

Vec forward_noise(const Vec& a, int n, const NoiseSchedule& schedule, RngStream& rng) {
  if (n < 1 || n > schedule.steps) throw Error("forward_noise: step index out of range");
  require_finite(a, "forward_noise input");
  const Vec eps = gauss(rng, static_cast<int>(a.size()));
  return noise_action(a, schedule.alpha_bar_at(n), eps);
}

Vec predict_noise(const DenoiserModel& model, const Vec& noised, int t, const Vec& context) {
  check_action(model, noised);
  check_context(model, context);
  Vec input;
  build_input(model, noised, context, t, input);
  return mlp_forward(model.mlp, input);
}

Vec denoise_from(const DenoiserModel& model, const Vec& noised, int n, const Vec& context,
                 RngStream& rng) {
  if (n < 1 || n > model.schedule.steps)
    throw Error("denoise_from: step index out of range");
  check_action(model, noised);
  check_context(model, context);
  require_finite(noised, "denoise_from input");

  const NoiseSchedule& sched = model.schedule;
  Vec x = noised;
  Vec input;
  for (int t = n; t >= 1; --t) {
    build_input(model, x, context, t, input);
    const Vec eps_hat = mlp_forward(model.mlp, input);
    const double beta = sched.beta_at(t);
    const double inv_sqrt_alpha = 1.0 / std::sqrt(sched.alpha_at(t));
    const double eps_coef = beta / std::sqrt(1.0 - sched.alpha_bar_at(t));
    for (int j = 0; j < model.action_dim; ++j)
      x[j] = inv_sqrt_alpha * (x[j] - eps_coef * eps_hat[j]);
    if (t > 1) {
      const double sigma = std::sqrt(beta);
      for (int j = 0; j < model.action_dim; ++j) x[j] += sigma * rng.next_gauss();
    }
  }
  require_finite(x, "denoise_from output");
  return x;
}

Vec sample(const DenoiserModel& model, const Vec& context, RngStream& rng) {
  const Vec start = gauss(rng, model.action_dim);
  return denoise_from(model, start, model.schedule.steps, context, rng);
}

}  // namespace evosteer
