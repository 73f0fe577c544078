#include "epg/bubble.hpp"

#include <cmath>

#include "epg/core.hpp"
#include "epg/quadrature.hpp"

namespace epg {

namespace {

// psi basis of the degree-2 polynomials on the element, as barycentric
// monomial exponent triples.
std::vector<std::array<int, 3>> psi_basis(int degree) {
  if (degree == 2) return {{0, 0, 0}};
  if (degree == 3) return {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
  return {};
}

}  // namespace

int bubble_gamma_count(int degree) { return degree <= 1 ? 0 : (degree == 2 ? 1 : 3); }

std::array<double, 3> compute_beta(double area, const std::array<double, 3>& edge_length,
                                   double conductivity) {
  if (area <= 0.0) throw ValidationError("compute_beta: degenerate element");
  if (conductivity <= 0.0) throw ValidationError("compute_beta: conductivity must be positive");
  std::array<double, 3> beta;
  for (int i = 0; i < 3; ++i)
    beta[i] = -60.0 * area / (conductivity * edge_length[i] * edge_length[i]);
  return beta;
}

std::vector<double> compute_gamma(int degree, const std::array<double, 3>& beta) {
  const auto psis = psi_basis(degree);
  const int J = static_cast<int>(psis.size());
  if (J == 0) return {};

  // Gram matrix m_lj = integral of (l1 l2 l3)^2 psi_l psi_j and right-hand
  // side -integral of (sum_i beta_i l_i l_j^2 l_k^2) psi_l, both exact. The
  // common factor K * 2|T| cancels between the two sides.
  std::vector<double> m(static_cast<size_t>(J) * J), rhs(J);
  for (int l = 0; l < J; ++l) {
    for (int j = 0; j < J; ++j) {
      m[l * J + j] = barycentric_monomial_integral(2 + psis[l][0] + psis[j][0],
                                                   2 + psis[l][1] + psis[j][1],
                                                   2 + psis[l][2] + psis[j][2]);
    }
    double r = 0.0;
    for (int i = 0; i < 3; ++i) {
      std::array<int, 3> e = {2, 2, 2};
      e[i] = 1;  // l_i l_j^2 l_k^2
      r += beta[i] * barycentric_monomial_integral(e[0] + psis[l][0], e[1] + psis[l][1],
                                                   e[2] + psis[l][2]);
    }
    rhs[l] = -r;
  }

  // Tiny SPD system (J <= 3): Gaussian elimination with partial pivoting.
  std::vector<double> gamma = rhs;
  for (int col = 0; col < J; ++col) {
    int piv = col;
    for (int r = col + 1; r < J; ++r)
      if (std::abs(m[r * J + col]) > std::abs(m[piv * J + col])) piv = r;
    if (piv != col) {
      for (int c = 0; c < J; ++c) std::swap(m[col * J + c], m[piv * J + c]);
      std::swap(gamma[col], gamma[piv]);
    }
    const double d = m[col * J + col];
    for (int r = col + 1; r < J; ++r) {
      const double factor = m[r * J + col] / d;
      for (int c = col; c < J; ++c) m[r * J + c] -= factor * m[col * J + c];
      gamma[r] -= factor * gamma[col];
    }
  }
  for (int r = J - 1; r >= 0; --r) {
    for (int c = r + 1; c < J; ++c) gamma[r] -= m[r * J + c] * gamma[c];
    gamma[r] /= m[r * J + r];
  }
  return gamma;
}

void bubble_eval(const BubbleBasis& basis, const std::array<double, 3>& lambda, double& value,
                 std::array<double, 3>& dlambda) {
  const double l1 = lambda[0], l2 = lambda[1], l3 = lambda[2];
  const double sq[3] = {l1 * l1, l2 * l2, l3 * l3};
  value = 0.0;
  dlambda = {0.0, 0.0, 0.0};

  // One-sided bubbles beta_i * l_i * l_j^2 * l_k^2.
  for (int i = 0; i < 3; ++i) {
    const int j = (i + 1) % 3, k = (i + 2) % 3;
    value += basis.beta[i] * lambda[i] * sq[j] * sq[k];
    dlambda[i] += basis.beta[i] * sq[j] * sq[k];
    dlambda[j] += basis.beta[i] * lambda[i] * 2.0 * lambda[j] * sq[k];
    dlambda[k] += basis.beta[i] * lambda[i] * sq[j] * 2.0 * lambda[k];
  }

  // Interior corrections gamma_j * (l1 l2 l3)^2 * psi_j.
  if (!basis.gamma.empty()) {
    const auto psis = psi_basis(basis.degree);
    const double prod2 = sq[0] * sq[1] * sq[2];
    for (size_t t = 0; t < basis.gamma.size(); ++t) {
      double psi = 1.0;
      for (int c = 0; c < 3; ++c)
        for (int rep = 0; rep < psis[t][c]; ++rep) psi *= lambda[c];
      value += basis.gamma[t] * prod2 * psi;
      for (int c = 0; c < 3; ++c) {
        // d/dl_c of (l1 l2 l3)^2 psi.
        double dprod = 2.0 * lambda[c];
        for (int d = 0; d < 3; ++d)
          if (d != c) dprod *= sq[d];
        double term = dprod * psi;
        if (psis[t][c] > 0) {
          double dpsi = psis[t][c];
          for (int d = 0; d < 3; ++d)
            for (int rep = 0; rep < (d == c ? psis[t][d] - 1 : psis[t][d]); ++rep)
              dpsi *= lambda[d];
          term += prod2 * dpsi;
        }
        dlambda[c] += basis.gamma[t] * term;
      }
    }
  }
}

std::vector<BubbleBasis> build_bubble_bases(const Mesh& mesh, int degree,
                                            const std::vector<double>& conductivity,
                                            Exec exec) {
  std::vector<BubbleBasis> bases(mesh.n_elements());
  parallel_for(exec, mesh.n_elements(), [&](std::int64_t t) {
    std::array<double, 3> edge_len;
    for (int e = 0; e < 3; ++e) {
      const auto& ref = mesh.elem_faces[t][e];
      edge_len[e] = ref.interior ? mesh.interior_faces[ref.index].length
                                 : mesh.boundary_faces[ref.index].length;
    }
    BubbleBasis b;
    b.degree = degree;
    b.beta = compute_beta(mesh.area[t], edge_len, conductivity[t]);
    b.gamma = compute_gamma(degree, b.beta);
    bases[t] = std::move(b);
  });
  return bases;
}

}  // namespace epg
