#pragma once

#include <vector>

#include "evosteer/linalg.hpp"

namespace evosteer {

/// Diagonal-covariance Gaussian mixture. Used as the ground-truth model of
/// demo distributions and as an independent density oracle in tests.
struct DiagGmm {
  std::vector<Vec> means;
  std::vector<Vec> vars;  // per-component diagonal covariance
  Vec weights;            // must sum to 1
};

DiagGmm make_gmm(std::vector<Vec> means, std::vector<Vec> vars, Vec weights);

/// log sum_k w_k N(x; mu_k, diag(var_k))
double gmm_logpdf(const DiagGmm& gmm, const Vec& x);

/// Largest achievable log-density (evaluated over the component means). The
/// nonnegative "excess" logpdf_max - logpdf(x) measures how far off the
/// mixture's high-density region a point sits.
double gmm_logpdf_peak(const DiagGmm& gmm);

Vec gmm_sample(const DiagGmm& gmm, RngStream& rng);

}  // namespace evosteer
