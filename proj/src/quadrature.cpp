#include "epg/quadrature.hpp"

#include <cmath>

#include "epg/core.hpp"

namespace epg {

namespace {
constexpr int kMaxDegree = 30;

// Legendre polynomial value and derivative on [-1,1].
void legendre(int n, double x, double& p, double& dp) {
  double p0 = 1.0, p1 = x;
  if (n == 0) {
    p = 1.0;
    dp = 0.0;
    return;
  }
  for (int k = 2; k <= n; ++k) {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  p = p1;
  dp = n * (x * p1 - p0) / (x * x - 1.0);
}
}  // namespace

void gauss_legendre_01(int n, std::vector<double>& points, std::vector<double>& weights) {
  if (n < 1) throw ValidationError("gauss_legendre_01: need at least one point");
  points.resize(n);
  weights.resize(n);
  for (int i = 0; i < n; ++i) {
    // Chebyshev initial guess, Newton refinement.
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double p = 0.0, dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      legendre(n, x, p, dp);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    legendre(n, x, p, dp);
    points[i] = 0.5 * (1.0 - x);  // descending x -> ascending s
    weights[i] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
}

EdgeRule edge_rule(int degree) {
  if (degree < 0 || degree > kMaxDegree)
    throw ValidationError("edge_rule: unsupported exactness degree " + std::to_string(degree));
  EdgeRule rule;
  const int n = degree / 2 + 1;
  gauss_legendre_01(n, rule.points, rule.weights);
  rule.degree = 2 * n - 1;
  return rule;
}

TriangleRule triangle_rule(int degree) {
  if (degree < 0 || degree > kMaxDegree)
    throw ValidationError("triangle_rule: unsupported exactness degree " + std::to_string(degree));
  // Duffy (collapsed square) tensor rule: with x = u, y = v(1-u) the integral
  // over the triangle becomes int_0^1 int_0^1 f(u, v(1-u)) (1-u) dv du. The
  // (1-u) factor raises the u-degree by one, hence the extra point there.
  std::vector<double> up, uw, vp, vw;
  const int nu = (degree + 1) / 2 + 1;
  const int nv = degree / 2 + 1;
  gauss_legendre_01(nu, up, uw);
  gauss_legendre_01(nv, vp, vw);
  TriangleRule rule;
  rule.degree = degree;
  rule.points.reserve(static_cast<size_t>(nu) * nv);
  rule.weights.reserve(static_cast<size_t>(nu) * nv);
  for (int i = 0; i < nu; ++i) {
    for (int j = 0; j < nv; ++j) {
      const double l1 = up[i];
      const double l2 = vp[j] * (1.0 - up[i]);
      const double l3 = 1.0 - l1 - l2;
      rule.points.push_back({l1, l2, l3});
      rule.weights.push_back(uw[i] * vw[j] * (1.0 - up[i]));
    }
  }
  return rule;
}

double barycentric_monomial_integral(int a, int b, int c) {
  auto factorial = [](int m) {
    double f = 1.0;
    for (int i = 2; i <= m; ++i) f *= i;
    return f;
  };
  return factorial(a) * factorial(b) * factorial(c) / factorial(a + b + c + 2);
}

}  // namespace epg
