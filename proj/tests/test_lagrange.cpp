#include "epg/lagrange.hpp"

#include <random>

#include "doctest.h"
#include "epg/core.hpp"
#include "test_helpers.hpp"

using namespace epg;

TEST_CASE("Lagrange basis has the Kronecker property at its nodes") {
  for (int k = 1; k <= 3; ++k) {
    const LagrangeBasis basis(k);
    std::vector<double> values;
    for (int n = 0; n < basis.size(); ++n) {
      const auto& idx = basis.nodes()[n];
      const std::array<double, 3> lam = {idx[0] / double(k), idx[1] / double(k),
                                         idx[2] / double(k)};
      basis.eval(lam, values);
      for (int i = 0; i < basis.size(); ++i)
        CHECK(values[i] == doctest::Approx(i == n ? 1.0 : 0.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("Lagrange basis sums to one") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 1; k <= 3; ++k) {
    const LagrangeBasis basis(k);
    std::vector<double> values;
    for (int trial = 0; trial < 50; ++trial) {
      double l1 = u(rng), l2 = u(rng) * (1.0 - l1);
      const std::array<double, 3> lam = {l1, l2, 1.0 - l1 - l2};
      basis.eval(lam, values);
      double sum = 0.0;
      for (double v : values) sum += v;
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("Lagrange physical gradients match central finite differences") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double h = 1e-6;
  for (int k = 1; k <= 3; ++k) {
    const LagrangeBasis basis(k);
    for (int trial = 0; trial < 5; ++trial) {
      const test::Triangle tri = test::random_triangle(rng);
      const auto glam = tri.barycentric_gradients();
      double l1 = 0.2 + 0.5 * u(rng), l2 = 0.3 * u(rng);
      const Vec2 x = tri.point({l1, l2, 1.0 - l1 - l2});

      std::vector<double> vp, vm;
      std::vector<std::array<double, 3>> dlam;
      basis.eval_grad(tri.barycentric(x), dlam);
      for (int i = 0; i < basis.size(); ++i) {
        Vec2 grad{0.0, 0.0};
        for (int l = 0; l < 3; ++l) grad = grad + dlam[i][l] * glam[l];
        for (int dim = 0; dim < 2; ++dim) {
          Vec2 xp = x, xm = x;
          xp[dim] += h;
          xm[dim] -= h;
          basis.eval(tri.barycentric(xp), vp);
          basis.eval(tri.barycentric(xm), vm);
          const double fd = (vp[i] - vm[i]) / (2.0 * h);
          CHECK(grad[dim] == doctest::Approx(fd).epsilon(1e-6).scale(1.0));
        }
      }
    }
  }
}
