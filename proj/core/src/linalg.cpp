#include "evosteer/linalg.hpp"

#include <algorithm>
#include <cmath>

#include "evosteer/errors.hpp"

namespace evosteer {

bool all_finite(const Vec& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

void require_finite(const Vec& v, const char* what) {
  if (!all_finite(v)) throw Error(std::string(what) + ": non-finite value");
}

void require_finite(double x, const char* what) {
  if (!std::isfinite(x)) throw Error(std::string(what) + ": non-finite value");
}

Vec gauss(RngStream& rng, int n) {
  if (n < 1) throw DimensionError("gauss: n must be >= 1");
  Vec out(static_cast<std::size_t>(n));
  for (double& x : out) x = rng.next_gauss();
  return out;
}

Vec softmax(const Vec& scores, double tau) {
  if (scores.empty()) throw Error("softmax: empty population");
  if (!(tau >= 0.0)) throw Error("softmax: tau must be >= 0");
  require_finite(scores, "softmax scores");

  const double top = *std::max_element(scores.begin(), scores.end());
  Vec q(scores.size());
  double total = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    q[i] = std::exp(tau * (scores[i] - top));
    total += q[i];
  }
  for (double& x : q) x /= total;
  return q;
}

double dot(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw DimensionError("dot: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(const Vec& v) { return std::sqrt(dot(v, v)); }

double dist(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw DimensionError("dist: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

Vec add(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw DimensionError("add: length mismatch");
  Vec out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

Vec sub(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw DimensionError("sub: length mismatch");
  Vec out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

Vec scale(const Vec& v, double s) {
  Vec out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] * s;
  return out;
}

double mean(const Vec& v) {
  if (v.empty()) throw Error("mean: empty vector");
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double variance(const Vec& v) {
  if (v.size() < 2) throw Error("variance: need at least two entries");
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

}  // namespace evosteer
