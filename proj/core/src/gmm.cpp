#include "evosteer/gmm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "evosteer/errors.hpp"

namespace evosteer {

namespace {
constexpr double kLogTwoPi = 1.8378770664093454835606594728112;

double component_logpdf(const Vec& mu, const Vec& var, const Vec& x) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - mu[i];
    s += kLogTwoPi + std::log(var[i]) + d * d / var[i];
  }
  return -0.5 * s;
}
}  // namespace

DiagGmm make_gmm(std::vector<Vec> means, std::vector<Vec> vars, Vec weights) {
  if (means.empty() || means.size() != vars.size() || means.size() != weights.size())
    throw DimensionError("make_gmm: component count mismatch");
  const std::size_t dim = means.front().size();
  double wsum = 0.0;
  for (std::size_t k = 0; k < means.size(); ++k) {
    if (means[k].size() != dim || vars[k].size() != dim)
      throw DimensionError("make_gmm: dimension mismatch");
    for (double v : vars[k])
      if (!(v > 0.0)) throw Error("make_gmm: covariance entries must be positive");
    if (weights[k] < 0.0) throw Error("make_gmm: weights must be nonnegative");
    wsum += weights[k];
  }
  if (std::abs(wsum - 1.0) > 1e-9) throw Error("make_gmm: weights must sum to 1");
  DiagGmm g;
  g.means = std::move(means);
  g.vars = std::move(vars);
  g.weights = std::move(weights);
  return g;
}

double gmm_logpdf(const DiagGmm& gmm, const Vec& x) {
  if (x.size() != gmm.means.front().size())
    throw DimensionError("gmm_logpdf: dimension mismatch");
  double best = -std::numeric_limits<double>::infinity();
  Vec terms(gmm.means.size());
  for (std::size_t k = 0; k < gmm.means.size(); ++k) {
    if (gmm.weights[k] == 0.0) {
      terms[k] = -std::numeric_limits<double>::infinity();
      continue;
    }
    terms[k] = std::log(gmm.weights[k]) + component_logpdf(gmm.means[k], gmm.vars[k], x);
    best = std::max(best, terms[k]);
  }
  double s = 0.0;
  for (double t : terms) s += std::exp(t - best);
  return best + std::log(s);
}

double gmm_logpdf_peak(const DiagGmm& gmm) {
  double best = -std::numeric_limits<double>::infinity();
  for (const Vec& mu : gmm.means) best = std::max(best, gmm_logpdf(gmm, mu));
  return best;
}

Vec gmm_sample(const DiagGmm& gmm, RngStream& rng) {
  const double u = rng.next_uniform();
  double cum = 0.0;
  std::size_t pick = gmm.means.size() - 1;
  for (std::size_t k = 0; k < gmm.weights.size(); ++k) {
    cum += gmm.weights[k];
    if (u < cum) {
      pick = k;
      break;
    }
  }
  Vec x(gmm.means[pick].size());
  for (std::size_t i = 0; i < x.size(); ++i)
    x[i] = gmm.means[pick][i] + std::sqrt(gmm.vars[pick][i]) * rng.next_gauss();
  return x;
}

}  // namespace evosteer
