#pragma once

#include "evosteer/linalg.hpp"

namespace evosteer {

/// DDPM noise schedule. Stored flat for steps t = 1..T at index t-1.
struct NoiseSchedule {
  int steps = 0;  // T
  double beta_start = 0.0;
  double beta_end = 0.0;
  Vec beta;       // beta_t in (0, 1)
  Vec alpha;      // 1 - beta_t
  Vec alpha_bar;  // prod_{s<=t} alpha_s, strictly decreasing

  double beta_at(int t) const { return beta[t - 1]; }
  double alpha_at(int t) const { return alpha[t - 1]; }
  double alpha_bar_at(int t) const { return alpha_bar[t - 1]; }
};

/// Linear beta interpolation from beta_start to beta_end over `steps` steps.
/// Requires 0 < beta_start <= beta_end < 1 and steps >= 1.
NoiseSchedule make_schedule(int steps, double beta_start, double beta_end);

}  // namespace evosteer
