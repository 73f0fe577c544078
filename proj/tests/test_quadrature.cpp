#include "epg/quadrature.hpp"

#include <cmath>

#include "doctest.h"
#include "epg/core.hpp"

using namespace epg;

namespace {
// Exact Beta integral: int_0^1 s^a (1-s)^b ds = a! b! / (a+b+1)!.
double beta_integral(int a, int b) {
  double num = 1.0, den = 1.0;
  for (int i = 2; i <= a; ++i) num *= i;
  for (int i = 2; i <= b; ++i) num *= i;
  for (int i = 2; i <= a + b + 1; ++i) den *= i;
  return num / den;
}
}  // namespace

TEST_CASE("edge rule integrates s^2 (1-s)^2 exactly") {
  const EdgeRule rule = edge_rule(4);
  double sum = 0.0;
  for (size_t q = 0; q < rule.points.size(); ++q) {
    const double s = rule.points[q];
    sum += rule.weights[q] * s * s * (1.0 - s) * (1.0 - s);
  }
  CHECK(sum == doctest::Approx(1.0 / 30.0).epsilon(1e-14));
  CHECK(beta_integral(2, 2) == doctest::Approx(1.0 / 30.0).epsilon(1e-15));
}

TEST_CASE("edge rule exactness against the Beta oracle") {
  for (int degree : {2, 4, 8, 11}) {
    const EdgeRule rule = edge_rule(degree);
    double wsum = 0.0;
    for (double w : rule.weights) wsum += w;
    CHECK(wsum == doctest::Approx(1.0).epsilon(1e-14));
    for (int a = 0; a <= degree; ++a) {
      for (int b = 0; a + b <= degree; ++b) {
        double sum = 0.0;
        for (size_t q = 0; q < rule.points.size(); ++q)
          sum += rule.weights[q] * std::pow(rule.points[q], a) *
                 std::pow(1.0 - rule.points[q], b);
        CHECK(sum == doctest::Approx(beta_integral(a, b)).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("triangle rule integrates constants to the reference area") {
  const TriangleRule rule = triangle_rule(2);
  double sum = 0.0;
  for (double w : rule.weights) sum += w;
  CHECK(sum == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("triangle rule on l1^2 l2^2 l3^2 matches the factorial oracle") {
  const TriangleRule rule = triangle_rule(6);
  double sum = 0.0;
  for (size_t q = 0; q < rule.points.size(); ++q) {
    const auto& l = rule.points[q];
    sum += rule.weights[q] * l[0] * l[0] * l[1] * l[1] * l[2] * l[2];
  }
  // (2!)^3 / 8! on the reference triangle (2|T| = 1).
  const double exact = barycentric_monomial_integral(2, 2, 2);
  CHECK(exact == doctest::Approx(8.0 / 40320.0).epsilon(1e-15));
  CHECK(sum == doctest::Approx(exact).epsilon(1e-13));
}

TEST_CASE("triangle rule exactness sweep against the factorial oracle") {
  for (int degree : {4, 8, 10, 12}) {
    const TriangleRule rule = triangle_rule(degree);
    for (int a = 0; a <= degree; ++a) {
      for (int b = 0; a + b <= degree; ++b) {
        const int c = degree - a - b;
        double sum = 0.0;
        for (size_t q = 0; q < rule.points.size(); ++q) {
          const auto& l = rule.points[q];
          sum += rule.weights[q] * std::pow(l[0], a) * std::pow(l[1], b) * std::pow(l[2], c);
        }
        CHECK(sum ==
              doctest::Approx(barycentric_monomial_integral(a, b, c)).epsilon(1e-11));
      }
    }
  }
}

TEST_CASE("unsupported quadrature degrees are rejected") {
  CHECK_THROWS_AS(triangle_rule(31), ValidationError);
  CHECK_THROWS_AS(edge_rule(-1), ValidationError);
}
