#include "epg/bubble.hpp"

#include <cmath>
#include <random>

#include "doctest.h"
#include "epg/core.hpp"
#include "epg/quadrature.hpp"
#include "test_helpers.hpp"

using namespace epg;
using test::Triangle;

namespace {

BubbleBasis make_basis(const Triangle& tri, double k, int degree) {
  BubbleBasis b;
  b.degree = degree;
  b.beta = compute_beta(tri.area(), tri.edge_lengths(), k);
  b.gamma = compute_gamma(degree, b.beta);
  return b;
}

// Quadrature oracle for the flux normalization: integral over edge i of
// K grad(b_T) . n_out, evaluated from the analytic barycentric derivatives.
double edge_flux(const Triangle& tri, const BubbleBasis& basis, double k, int edge) {
  const EdgeRule rule = edge_rule(8);
  const auto glam = tri.barycentric_gradients();
  const Vec2 n = tri.outward_normal(edge);
  const int u = (edge + 1) % 3, v = (edge + 2) % 3;
  const double len = tri.edge_lengths()[edge];
  double sum = 0.0;
  for (size_t q = 0; q < rule.points.size(); ++q) {
    std::array<double, 3> lam{0.0, 0.0, 0.0};
    lam[u] = 1.0 - rule.points[q];
    lam[v] = rule.points[q];
    double value;
    std::array<double, 3> dl;
    bubble_eval(basis, lam, value, dl);
    const Vec2 grad = dl[0] * glam[0] + dl[1] * glam[1] + dl[2] * glam[2];
    sum += rule.weights[q] * k * dot(grad, n);
  }
  return sum * len;
}

// Quadrature oracle for the volume orthogonality: integral of K b_T psi with
// psi a barycentric monomial.
double volume_moment(const Triangle& tri, const BubbleBasis& basis, double k,
                     const std::array<int, 3>& psi) {
  const TriangleRule rule = triangle_rule(10);
  double sum = 0.0;
  for (size_t q = 0; q < rule.points.size(); ++q) {
    const auto& lam = rule.points[q];
    double value;
    std::array<double, 3> dl;
    bubble_eval(basis, lam, value, dl);
    double p = 1.0;
    for (int c = 0; c < 3; ++c)
      for (int r = 0; r < psi[c]; ++r) p *= lam[c];
    sum += rule.weights[q] * value * p;
  }
  return sum * 2.0 * tri.area() * k;
}

}  // namespace

TEST_CASE("beta on the reference triangle, bottom edge") {
  const Triangle tri = test::reference_triangle();
  // Bottom edge (y=0) is opposite vertex (0,1), local index 2; length 1.
  const auto beta = compute_beta(tri.area(), tri.edge_lengths(), 1.0);
  CHECK(beta[2] == doctest::Approx(-30.0).epsilon(1e-14));
  const auto beta10 = compute_beta(tri.area(), tri.edge_lengths(), 10.0);
  CHECK(beta10[2] == doctest::Approx(-3.0).epsilon(1e-14));
}

TEST_CASE("beta is invariant under uniform scaling of the element") {
  std::mt19937 rng(3);
  const Triangle tri = test::random_triangle(rng);
  Triangle scaled = tri;
  for (auto& v : scaled.v) v = 2.0 * v;
  const auto b1 = compute_beta(tri.area(), tri.edge_lengths(), 2.5);
  const auto b2 = compute_beta(scaled.area(), scaled.edge_lengths(), 2.5);
  for (int i = 0; i < 3; ++i) CHECK(b1[i] == doctest::Approx(b2[i]).epsilon(1e-13));
}

TEST_CASE("beta satisfies the defining edge integral (quadrature oracle)") {
  // The one-sided bubble through its own edge carries unit flux; the full
  // bubble therefore does as well.
  std::mt19937 rng(5);
  for (int k_deg = 1; k_deg <= 3; ++k_deg) {
    for (int trial = 0; trial < 10; ++trial) {
      const Triangle tri = test::random_triangle(rng);
      const double k = std::pow(10.0, -1.0 + 2.0 * (trial % 3));
      const BubbleBasis basis = make_basis(tri, k, k_deg);
      for (int e = 0; e < 3; ++e)
        CHECK(edge_flux(tri, basis, k, e) == doctest::Approx(1.0).epsilon(1e-11));
    }
  }
}

TEST_CASE("gamma count per degree") {
  CHECK(bubble_gamma_count(1) == 0);
  CHECK(bubble_gamma_count(2) == 1);
  CHECK(bubble_gamma_count(3) == 3);
  CHECK(compute_gamma(1, {1.0, 1.0, 1.0}).empty());
}

TEST_CASE("bubble orthogonality against degree-2 moments (quadrature oracle)") {
  std::mt19937 rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    const Triangle tri = test::random_triangle(rng);
    const double k = 0.5 + trial;
    {
      const BubbleBasis b2 = make_basis(tri, k, 2);
      REQUIRE(b2.gamma.size() == 1);
      CHECK(volume_moment(tri, b2, k, {0, 0, 0}) ==
            doctest::Approx(0.0).scale(tri.area()).epsilon(1e-12));

      const BubbleBasis b3 = make_basis(tri, k, 3);
      REQUIRE(b3.gamma.size() == 3);
      for (const auto& psi :
           {std::array<int, 3>{0, 0, 0}, std::array<int, 3>{1, 0, 0}, std::array<int, 3>{0, 1, 0},
            std::array<int, 3>{0, 0, 1}}) {
        CHECK(volume_moment(tri, b3, k, psi) ==
              doctest::Approx(0.0).scale(tri.area()).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("bubble vanishes on the element boundary") {
  std::mt19937 rng(23);
  const Triangle tri = test::random_triangle(rng);
  const BubbleBasis basis = make_basis(tri, 2.0, 3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int e = 0; e < 3; ++e) {
    for (int trial = 0; trial < 5; ++trial) {
      std::array<double, 3> lam{0.0, 0.0, 0.0};
      const double s = u(rng);
      lam[(e + 1) % 3] = 1.0 - s;
      lam[(e + 2) % 3] = s;
      double value;
      std::array<double, 3> dl;
      bubble_eval(basis, lam, value, dl);
      CHECK(value == doctest::Approx(0.0).epsilon(1e-14));
    }
  }
}

TEST_CASE("bubble value at the barycenter, reference triangle, degree 1") {
  const Triangle tri = test::reference_triangle();
  const BubbleBasis basis = make_basis(tri, 1.0, 1);
  // Each one-sided bubble contributes beta_i (1/3)^5; betas are
  // -60*(1/2)/|e_i|^2 for |e| in {sqrt(2), 1, 1}.
  double value;
  std::array<double, 3> dl;
  bubble_eval(basis, {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}, value, dl);
  const double expected = (-15.0 - 30.0 - 30.0) / 243.0;
  CHECK(value == doctest::Approx(expected).epsilon(1e-13));
}

TEST_CASE("bubble gradient vanishes at the vertices") {
  std::mt19937 rng(29);
  const Triangle tri = test::random_triangle(rng);
  const auto glam = tri.barycentric_gradients();
  for (int deg = 1; deg <= 3; ++deg) {
    const BubbleBasis basis = make_basis(tri, 3.0, deg);
    for (int v = 0; v < 3; ++v) {
      std::array<double, 3> lam{0.0, 0.0, 0.0};
      lam[v] = 1.0;
      double value;
      std::array<double, 3> dl;
      bubble_eval(basis, lam, value, dl);
      const Vec2 grad = dl[0] * glam[0] + dl[1] * glam[1] + dl[2] * glam[2];
      CHECK(norm(grad) == doctest::Approx(0.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("bubble physical gradient matches central finite differences") {
  std::mt19937 rng(31);
  const double h = 1e-6;
  for (int deg = 1; deg <= 3; ++deg) {
    const Triangle tri = test::random_triangle(rng);
    const auto glam = tri.barycentric_gradients();
    const BubbleBasis basis = make_basis(tri, 1.5, deg);
    const Vec2 x = tri.point({0.3, 0.45, 0.25});
    double value;
    std::array<double, 3> dl;
    bubble_eval(basis, tri.barycentric(x), value, dl);
    const Vec2 grad = dl[0] * glam[0] + dl[1] * glam[1] + dl[2] * glam[2];
    for (int dim = 0; dim < 2; ++dim) {
      Vec2 xp = x, xm = x;
      xp[dim] += h;
      xm[dim] -= h;
      double vp, vm;
      bubble_eval(basis, tri.barycentric(xp), vp, dl);
      bubble_eval(basis, tri.barycentric(xm), vm, dl);
      CHECK(grad[dim] ==
            doctest::Approx((vp - vm) / (2.0 * h)).epsilon(1e-6).scale(std::abs(grad[dim]) + 1.0));
    }
  }
}

TEST_CASE("flux normalization and orthogonality over randomized elements") {
  // 1000 elements spread over the degrees, conductivities in [1e-3, 1e3].
  std::mt19937 rng(101);
  std::uniform_real_distribution<double> logk(-3.0, 3.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const int deg = 1 + trial % 3;
    const Triangle tri = test::random_triangle(rng);
    const double k = std::pow(10.0, logk(rng));
    const BubbleBasis basis = make_basis(tri, k, deg);
    for (int e = 0; e < 3; ++e)
      CHECK(std::abs(edge_flux(tri, basis, k, e) - 1.0) <= 1e-10);
    if (deg >= 2) {
      double max_bubble = 0.0;
      const TriangleRule rule = triangle_rule(6);
      for (const auto& lam : rule.points) {
        double value;
        std::array<double, 3> dl;
        bubble_eval(basis, lam, value, dl);
        max_bubble = std::max(max_bubble, std::abs(value));
      }
      const double tol = 1e-10 * tri.area() * std::max(max_bubble, 1.0) * k;
      for (const auto& psi : {std::array<int, 3>{0, 0, 0}, std::array<int, 3>{1, 0, 0},
                              std::array<int, 3>{0, 1, 0}}) {
        if (deg == 2 && (psi[0] || psi[1])) continue;
        CHECK(std::abs(volume_moment(tri, basis, k, psi)) <= tol);
      }
    }
  }
}

TEST_CASE("gamma terms do not change the edge fluxes") {
  std::mt19937 rng(41);
  for (int deg = 2; deg <= 3; ++deg) {
    const Triangle tri = test::random_triangle(rng);
    const double k = 7.0;
    const BubbleBasis with_gamma = make_basis(tri, k, deg);
    BubbleBasis no_gamma = with_gamma;
    std::fill(no_gamma.gamma.begin(), no_gamma.gamma.end(), 0.0);
    for (int e = 0; e < 3; ++e)
      CHECK(edge_flux(tri, with_gamma, k, e) ==
            doctest::Approx(edge_flux(tri, no_gamma, k, e)).epsilon(1e-12));
  }
}
