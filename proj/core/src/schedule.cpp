#include "evosteer/schedule.hpp"

#include "evosteer/errors.hpp"

namespace evosteer {

NoiseSchedule make_schedule(int steps, double beta_start, double beta_end) {
  if (steps < 1) throw ConfigError("make_schedule: steps must be >= 1");
  if (!(beta_start > 0.0) || !(beta_start <= beta_end) || !(beta_end < 1.0))
    throw ConfigError("make_schedule: need 0 < beta_start <= beta_end < 1");

  NoiseSchedule s;
  s.steps = steps;
  s.beta_start = beta_start;
  s.beta_end = beta_end;
  s.beta.resize(steps);
  s.alpha.resize(steps);
  s.alpha_bar.resize(steps);
  double prod = 1.0;
  for (int t = 0; t < steps; ++t) {
    const double frac = steps == 1 ? 0.0 : static_cast<double>(t) / (steps - 1);
    s.beta[t] = beta_start + (beta_end - beta_start) * frac;
    s.alpha[t] = 1.0 - s.beta[t];
    prod *= s.alpha[t];
    s.alpha_bar[t] = prod;
  }
  return s;
}

}  // namespace evosteer
