#pragma once

#include <array>
#include <vector>

#include "epg/mesh.hpp"
#include "epg/parallel.hpp"

namespace epg {

// Element bubble b_T: a polynomial vanishing on the element boundary,
//   b_T = sum_i beta_i * l_i l_j^2 l_k^2          (one bubble per edge)
//       + sum_j gamma_j * (l1 l2 l3)^2 psi_j      (degree >= 2 only),
// normalized so the conductivity-weighted flux of grad b_T through each edge
// equals one, and (for degree >= 2) K-orthogonal to all polynomials of
// degree-2 on the element. psi_j runs over {1} (degree 2) and {1, l1, l2}
// (degree 3).
struct BubbleBasis {
  int degree = 1;
  std::array<double, 3> beta{0, 0, 0};  // beta[i] belongs to the edge opposite vertex i
  std::vector<double> gamma;
};

// Number of gamma coefficients: 0, 1, 3 for degrees 1, 2, 3.
int bubble_gamma_count(int degree);

// beta_i = -60 |T| / (K |e_i|^2); exact for piecewise-constant conductivity.
std::array<double, 3> compute_beta(double area, const std::array<double, 3>& edge_length,
                                   double conductivity);

// Solves the small Gram system that makes b_T K-orthogonal to the psi basis.
// The system is assembled from exact barycentric monomial integrals; the
// conductivity and element area cancel.
std::vector<double> compute_gamma(int degree, const std::array<double, 3>& beta);

// Value and barycentric partial derivatives of b_T at a barycentric point.
void bubble_eval(const BubbleBasis& basis, const std::array<double, 3>& lambda, double& value,
                 std::array<double, 3>& dlambda);

// Per-element bubble bases for a whole mesh.
std::vector<BubbleBasis> build_bubble_bases(const Mesh& mesh, int degree,
                                            const std::vector<double>& conductivity,
                                            Exec exec = Exec::openmp);

}  // namespace epg
