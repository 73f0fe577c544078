#include "epg/lagrange.hpp"

#include "epg/core.hpp"

namespace epg {

namespace {

// Silvester factor P_m(k*l) = prod_{s=0}^{m-1} (k*l - s)/(m - s); P_0 = 1.
double silvester(int k, int m, double l) {
  double p = 1.0;
  for (int s = 0; s < m; ++s) p *= (k * l - s) / (m - s);
  return p;
}

// d/dl of the Silvester factor.
double silvester_deriv(int k, int m, double l) {
  double sum = 0.0;
  for (int t = 0; t < m; ++t) {
    double term = static_cast<double>(k) / (m - t);
    for (int s = 0; s < m; ++s) {
      if (s == t) continue;
      term *= (k * l - s) / (m - s);
    }
    sum += term;
  }
  return sum;
}

}  // namespace

LagrangeBasis::LagrangeBasis(int degree) : degree_(degree) {
  if (degree < 1 || degree > 3)
    throw ValidationError("LagrangeBasis: degree must be 1, 2 or 3");
  const int k = degree;
  nodes_.push_back({k, 0, 0});
  nodes_.push_back({0, k, 0});
  nodes_.push_back({0, 0, k});
  for (int edge = 0; edge < 3; ++edge) {
    const int u = (edge + 1) % 3, v = (edge + 2) % 3;
    for (int m = 1; m <= k - 1; ++m) {
      std::array<int, 3> idx = {0, 0, 0};
      idx[u] = k - m;
      idx[v] = m;
      nodes_.push_back(idx);
    }
  }
  if (k == 3) nodes_.push_back({1, 1, 1});
}

void LagrangeBasis::eval(const std::array<double, 3>& lambda, std::vector<double>& values) const {
  values.resize(nodes_.size());
  for (size_t i = 0; i < nodes_.size(); ++i) {
    const auto& n = nodes_[i];
    values[i] = silvester(degree_, n[0], lambda[0]) * silvester(degree_, n[1], lambda[1]) *
                silvester(degree_, n[2], lambda[2]);
  }
}

void LagrangeBasis::eval_grad(const std::array<double, 3>& lambda,
                              std::vector<std::array<double, 3>>& grads) const {
  grads.resize(nodes_.size());
  for (size_t i = 0; i < nodes_.size(); ++i) {
    const auto& n = nodes_[i];
    const double p0 = silvester(degree_, n[0], lambda[0]);
    const double p1 = silvester(degree_, n[1], lambda[1]);
    const double p2 = silvester(degree_, n[2], lambda[2]);
    grads[i][0] = silvester_deriv(degree_, n[0], lambda[0]) * p1 * p2;
    grads[i][1] = p0 * silvester_deriv(degree_, n[1], lambda[1]) * p2;
    grads[i][2] = p0 * p1 * silvester_deriv(degree_, n[2], lambda[2]);
  }
}

}  // namespace epg
