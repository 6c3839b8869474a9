#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "evosteer/rng.hpp"

namespace evosteer {

using Vec = std::vector<double>;

/// Dense row-major matrix of 64-bit floats.
struct Mat {
  int rows = 0;
  int cols = 0;
  Vec data;

  Mat() = default;
  Mat(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, 0.0) {}

  double& operator()(int i, int j) {
    return data[static_cast<std::size_t>(i) * cols + j];
  }
  double operator()(int i, int j) const {
    return data[static_cast<std::size_t>(i) * cols + j];
  }
};

bool all_finite(const Vec& v);
void require_finite(const Vec& v, const char* what);
void require_finite(double x, const char* what);

/// n i.i.d. standard-normal draws. n must be >= 1.
Vec gauss(RngStream& rng, int n);

/// q_i = exp(tau * s_i) / sum_j exp(tau * s_j), computed with
/// max-subtraction. tau must be >= 0; scores must be finite and nonempty.
Vec softmax(const Vec& scores, double tau);

double dot(const Vec& a, const Vec& b);
double norm(const Vec& v);
double dist(const Vec& a, const Vec& b);

Vec add(const Vec& a, const Vec& b);
Vec sub(const Vec& a, const Vec& b);
Vec scale(const Vec& v, double s);

double mean(const Vec& v);
double variance(const Vec& v);

}  // namespace evosteer
