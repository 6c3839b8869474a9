#pragma once

#include <cstdint>
#include <vector>

#include "evosteer/mlp.hpp"
#include "evosteer/rng.hpp"
#include "evosteer/schedule.hpp"

namespace evosteer {

/// One training pair: conditioning vector and demonstrated action.
struct Demo {
  Vec context;
  Vec action;
};

struct TrainConfig {
  int steps = 4000;
  int batch_size = 64;
  double learning_rate = 1e-3;
  std::uint64_t seed = 0;
};

/// Network architecture of the noise predictor (fixed after construction).
struct ArchParams {
  std::vector<int> hidden{64, 64};
  Activation activation = Activation::relu;
  int time_embed_width = 16;  // sinusoidal embedding, must be even
};

/// Conditional DDPM over actions. Frozen (read-only) once trained; safe to
/// share across sampling and mutation workers.
struct DenoiserModel {
  Mlp mlp;
  int action_dim = 0;
  int context_dim = 0;
  int time_embed_width = 0;
  NoiseSchedule schedule;
};

struct TrainStats {
  double final_loss = 0.0;  // mean squared noise error over the last 100 steps
};

Vec time_embedding(int t, int width);

/// Builds an untrained denoiser (pure-noise behavior) with seeded init.
DenoiserModel make_denoiser(int action_dim, int context_dim, const NoiseSchedule& schedule,
                            const ArchParams& arch, std::uint64_t seed);

/// Standard DDPM training: t ~ U{1..T}, noise the action with the closed-form
/// forward kernel, regress the predicted noise to eps with squared loss.
DenoiserModel train_policy(const std::vector<Demo>& demos, const TrainConfig& cfg,
                           const NoiseSchedule& schedule, const ArchParams& arch = {},
                           TrainStats* stats = nullptr);

/// sqrt(alpha_bar) * a + sqrt(1 - alpha_bar) * eps. alpha_bar = 1 is the
/// identity edge (returns a exactly).
Vec noise_action(const Vec& a, double alpha_bar, const Vec& eps);

/// Closed-form forward diffusion to step n (1 <= n <= T) with fresh noise.
Vec forward_noise(const Vec& a, int n, const NoiseSchedule& schedule, RngStream& rng);

/// Reverse DDPM transitions from step n down to 0 using the model's noise
/// predictor. Reverse-step variance is fixed to beta_t; no noise is added on
/// the final step.
Vec denoise_from(const DenoiserModel& model, const Vec& noised, int n, const Vec& context,
                 RngStream& rng);

/// Full T-step ancestral sampling from pure noise.
Vec sample(const DenoiserModel& model, const Vec& context, RngStream& rng);

/// Single evaluation of the noise predictor at step t.
Vec predict_noise(const DenoiserModel& model, const Vec& noised, int t, const Vec& context);

}  // namespace evosteer
