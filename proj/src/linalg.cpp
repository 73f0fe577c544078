#include "epg/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <ostream>

#include "epg/core.hpp"

namespace epg {

SparseMatrix SparseMatrix::from_triplets(int n, std::vector<Triplet> triplets) {
  for (const auto& t : triplets)
    if (t.row < 0 || t.row >= n || t.col < 0 || t.col >= n)
      throw ValidationError("SparseMatrix: triplet index out of range");
  std::sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });

  SparseMatrix m;
  m.n_ = n;
  m.row_ptr_.assign(n + 1, 0);
  for (size_t i = 0; i < triplets.size();) {
    size_t j = i + 1;
    double sum = triplets[i].value;
    while (j < triplets.size() && triplets[j].row == triplets[i].row &&
           triplets[j].col == triplets[i].col) {
      sum += triplets[j].value;
      ++j;
    }
    m.col_.push_back(triplets[i].col);
    m.val_.push_back(sum);
    m.row_ptr_[triplets[i].row + 1]++;
    i = j;
  }
  for (int r = 0; r < n; ++r) m.row_ptr_[r + 1] += m.row_ptr_[r];
  return m;
}

void SparseMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  for (int r = 0; r < n_; ++r) {
    double sum = 0.0;
    for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) sum += val_[k] * x[col_[k]];
    y[r] = sum;
  }
}

double SparseMatrix::value_at(int row, int col) const {
  for (int k = row_ptr_[row]; k < row_ptr_[row + 1]; ++k)
    if (col_[k] == col) return val_[k];
  return 0.0;
}

void SparseMatrix::write_coordinate(std::ostream& out) const {
  char buf[96];
  for (int r = 0; r < n_; ++r)
    for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      std::snprintf(buf, sizeof(buf), "%d %d %.17g\n", r, col_[k], val_[k]);
      out << buf;
    }
}

namespace {

double dot_product(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double two_norm(std::span<const double> a) { return std::sqrt(dot_product(a, a)); }

double true_rel_residual(const SparseMatrix& A, std::span<const double> b,
                         std::span<const double> x) {
  std::vector<double> r(b.size());
  A.multiply(x, r);
  for (size_t i = 0; i < r.size(); ++i) r[i] = b[i] - r[i];
  const double nb = two_norm(b);
  return nb > 0.0 ? two_norm(r) / nb : two_norm(r);
}

std::vector<double> jacobi_diagonal(const SparseMatrix& A) {
  std::vector<double> d(A.rows(), 1.0);
  for (int r = 0; r < A.rows(); ++r) {
    const double v = A.value_at(r, r);
    if (v != 0.0) d[r] = 1.0 / v;
  }
  return d;
}

}  // namespace

std::vector<double> solve_spd(const SparseMatrix& A, std::span<const double> b, double rtol,
                              SolveReport& report, int max_iterations) {
  const int n = A.rows();
  if (static_cast<int>(b.size()) != n) throw ValidationError("solve_spd: size mismatch");
  if (rtol < 1e-14) throw ValidationError("solve_spd: rtol must be >= 1e-14");
  if (max_iterations <= 0) max_iterations = std::max(2000, 4 * n);

  report = SolveReport{};
  report.method = "pcg-jacobi";

  std::vector<double> x(n, 0.0);
  const double nb = two_norm(b);
  if (nb == 0.0) {
    report.converged = true;
    return x;
  }

  const std::vector<double> dinv = jacobi_diagonal(A);
  std::vector<double> r(b.begin(), b.end());
  std::vector<double> z(n), p(n), ap(n);
  for (int i = 0; i < n; ++i) z[i] = dinv[i] * r[i];
  p = z;
  double rz = dot_product(r, z);

  double rel = 1.0;
  int it = 0;
  for (; it < max_iterations; ++it) {
    rel = two_norm(r) / nb;
    if (rel <= rtol) break;
    A.multiply(p, ap);
    const double pap = dot_product(p, ap);
    if (pap <= 0.0)
      throw SolverError("solve_spd: negative curvature encountered; matrix is not SPD");
    const double alpha = rz / pap;
    for (int i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * ap[i];
    }
    for (int i = 0; i < n; ++i) z[i] = dinv[i] * r[i];
    const double rz_new = dot_product(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (int i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }

  report.iterations = it;
  report.rel_residual_internal = rel;
  report.rel_residual = true_rel_residual(A, b, x);
  report.converged = rel <= rtol;
  return x;
}

MMatrixDiagnostics validate_mmatrix(const SparseMatrix& A) {
  MMatrixDiagnostics d;
  const int n = A.rows();
  std::vector<double> col_offdiag_abs(n, 0.0), diag(n, 0.0);
  for (int r = 0; r < n; ++r) {
    for (int k = A.row_ptr()[r]; k < A.row_ptr()[r + 1]; ++k) {
      const int c = A.cols()[k];
      const double v = A.values()[k];
      if (c == r) {
        diag[r] = v;
        if (v <= 0.0 && d.diagonal_positive) {
          d.diagonal_positive = false;
          d.bad_row = r;
          d.bad_col = c;
        }
      } else {
        if (v > 0.0 && d.offdiagonal_nonpositive) {
          d.offdiagonal_nonpositive = false;
          d.bad_row = r;
          d.bad_col = c;
        }
        col_offdiag_abs[c] += std::abs(v);
      }
    }
  }
  d.min_column_margin = std::numeric_limits<double>::infinity();
  for (int c = 0; c < n; ++c) {
    const double margin = diag[c] - col_offdiag_abs[c];
    if (margin < d.min_column_margin) d.min_column_margin = margin;
    if (margin <= 0.0 && d.column_dominant) {
      d.column_dominant = false;
      if (d.bad_col < 0) d.bad_col = c;
    }
  }
  return d;
}

std::vector<double> solve_mmatrix(const SparseMatrix& A, std::span<const double> b, double rtol,
                                  SolveReport& report, int max_iterations) {
  const MMatrixDiagnostics diag = validate_mmatrix(A);
  if (!diag.pass())
    throw ValidationError(
        "solve_mmatrix: matrix fails M-matrix validation (diag>0: " +
        std::to_string(diag.diagonal_positive) +
        ", offdiag<=0: " + std::to_string(diag.offdiagonal_nonpositive) +
        ", column dominant: " + std::to_string(diag.column_dominant) + ")");

  const int n = A.rows();
  if (static_cast<int>(b.size()) != n) throw ValidationError("solve_mmatrix: size mismatch");
  if (max_iterations <= 0) max_iterations = std::max(2000, 10 * n);

  report = SolveReport{};
  report.method = "bicgstab-jacobi";

  std::vector<double> x(n, 0.0);
  const double nb = two_norm(b);
  if (nb == 0.0) {
    report.converged = true;
    return x;
  }

  const std::vector<double> dinv = jacobi_diagonal(A);
  std::vector<double> r(b.begin(), b.end());
  std::vector<double> r0 = r, p(n, 0.0), v(n, 0.0), s(n), t(n), ph(n), sh(n);
  double rho = 1.0, alpha = 1.0, omega = 1.0;

  double rel = 1.0;
  int it = 0;
  for (; it < max_iterations; ++it) {
    rel = two_norm(r) / nb;
    if (rel <= rtol) break;
    const double rho_new = dot_product(r0, r);
    if (std::abs(rho_new) < 1e-300) {
      // Restart from the current iterate.
      A.multiply(x, r);
      for (int i = 0; i < n; ++i) r[i] = b[i] - r[i];
      r0 = r;
      std::fill(p.begin(), p.end(), 0.0);
      std::fill(v.begin(), v.end(), 0.0);
      rho = alpha = omega = 1.0;
      continue;
    }
    const double beta = (rho_new / rho) * (alpha / omega);
    rho = rho_new;
    for (int i = 0; i < n; ++i) p[i] = r[i] + beta * (p[i] - omega * v[i]);
    for (int i = 0; i < n; ++i) ph[i] = dinv[i] * p[i];
    A.multiply(ph, v);
    alpha = rho / dot_product(r0, v);
    for (int i = 0; i < n; ++i) s[i] = r[i] - alpha * v[i];
    if (two_norm(s) / nb <= rtol) {
      for (int i = 0; i < n; ++i) x[i] += alpha * ph[i];
      r = s;
      ++it;
      rel = two_norm(r) / nb;
      break;
    }
    for (int i = 0; i < n; ++i) sh[i] = dinv[i] * s[i];
    A.multiply(sh, t);
    const double tt = dot_product(t, t);
    omega = tt > 0.0 ? dot_product(t, s) / tt : 0.0;
    for (int i = 0; i < n; ++i) {
      x[i] += alpha * ph[i] + omega * sh[i];
      r[i] = s[i] - omega * t[i];
    }
    if (omega == 0.0) {
      A.multiply(x, r);
      for (int i = 0; i < n; ++i) r[i] = b[i] - r[i];
      r0 = r;
      std::fill(p.begin(), p.end(), 0.0);
      std::fill(v.begin(), v.end(), 0.0);
      rho = alpha = omega = 1.0;
    }
  }

  report.iterations = it;
  report.rel_residual_internal = rel;
  report.rel_residual = true_rel_residual(A, b, x);
  report.converged = rel <= rtol;
  return x;
}

std::vector<double> dense_solve(DenseMatrix a, std::vector<double> b) {
  const int n = a.size();
  if (static_cast<int>(b.size()) != n) throw ValidationError("dense_solve: size mismatch");
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(a(r, col)) > std::abs(a(piv, col))) piv = r;
    if (a(piv, col) == 0.0) throw SolverError("dense_solve: singular matrix");
    if (piv != col) {
      for (int c = 0; c < n; ++c) std::swap(a(col, c), a(piv, c));
      std::swap(b[col], b[piv]);
    }
    for (int r = col + 1; r < n; ++r) {
      const double f = a(r, col) / a(col, col);
      if (f == 0.0) continue;
      for (int c = col + 1; c < n; ++c) a(r, c) -= f * a(col, c);
      b[r] -= f * b[col];
      a(r, col) = 0.0;
    }
  }
  for (int r = n - 1; r >= 0; --r) {
    for (int c = r + 1; c < n; ++c) b[r] -= a(r, c) * b[c];
    b[r] /= a(r, r);
  }
  return b;
}

}  // namespace epg
