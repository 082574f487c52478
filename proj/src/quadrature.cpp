// quadrature.cpp — Gauss-Legendre rules and singularity-absorbing panel maps.
#include "colliq/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace colliq::quadrature {

namespace {

Rule compute_gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: node count must be positive");
  Rule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      // Legendre recurrence for P_n(x) and its derivative.
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  return rule;
}

}  // namespace

const Rule& gauss_legendre(int n) {
  static std::mutex mutex;
  static std::map<int, Rule> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, compute_gauss_legendre(n)).first;
  return it->second;
}

Rule gauss_legendre_on(int n, double a, double b) {
  const Rule& base = gauss_legendre(n);
  Rule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const double mid = 0.5 * (a + b);
  const double scale = 0.5 * (b - a);
  for (int i = 0; i < n; ++i) {
    rule.nodes[i] = mid + scale * base.nodes[i];
    rule.weights[i] = scale * base.weights[i];
  }
  return rule;
}

Rule sqrt_endpoint_panel(int n, double a, double b) {
  if (!(b > a)) throw std::invalid_argument("sqrt_endpoint_panel: empty panel");
  const Rule& base = gauss_legendre(n);
  Rule rule;
  rule.nodes.reserve(2 * n);
  rule.weights.reserve(2 * n);
  const double mid = 0.5 * (a + b);
  const double half_len = mid - a;
  for (int i = 0; i < n; ++i) {
    const double s = 0.5 * (base.nodes[i] + 1.0);
    const double w = 0.5 * base.weights[i] * 2.0 * half_len * s;
    rule.nodes.push_back(a + half_len * s * s);
    rule.weights.push_back(w);
  }
  for (int i = 0; i < n; ++i) {
    const double s = 0.5 * (base.nodes[i] + 1.0);
    const double w = 0.5 * base.weights[i] * 2.0 * half_len * s;
    rule.nodes.push_back(b - half_len * s * s);
    rule.weights.push_back(w);
  }
  return rule;
}

}  // namespace colliq::quadrature
