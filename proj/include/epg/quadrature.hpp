#pragma once

#include <array>
#include <vector>

namespace epg {

// Quadrature on the reference triangle {l1,l2,l3 >= 0, l1+l2+l3 = 1}.
// Points are barycentric, weights sum to the reference area 1/2.
struct TriangleRule {
  std::vector<std::array<double, 3>> points;
  std::vector<double> weights;
  int degree = 0;  // integrates all polynomials of this total degree exactly
};

// Quadrature on the unit edge parameter s in [0,1]; weights sum to 1.
struct EdgeRule {
  std::vector<double> points;
  std::vector<double> weights;
  int degree = 0;
};

// Gauss-Legendre rule on [0,1] with n points (exact to degree 2n-1).
void gauss_legendre_01(int n, std::vector<double>& points, std::vector<double>& weights);

// Rules exact for all polynomials up to the requested total degree.
// Throws ValidationError for unsupported degrees (caps: 30 triangle, 30 edge).
TriangleRule triangle_rule(int degree);
EdgeRule edge_rule(int degree);

// Exact integral of l1^a l2^b l3^c over the reference triangle:
// a! b! c! / (a+b+c+2)!.  Multiply by 2|T| for a physical element.
double barycentric_monomial_integral(int a, int b, int c);

}  // namespace epg
