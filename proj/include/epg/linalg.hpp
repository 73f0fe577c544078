#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace epg {

struct Triplet {
  int row, col;
  double value;
};

// Row-compressed square sparse matrix. Duplicate triplets are summed during
// finalization; the structure is fixed afterwards.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  static SparseMatrix from_triplets(int n, std::vector<Triplet> triplets);

  int rows() const { return n_; }
  int nnz() const { return static_cast<int>(val_.size()); }

  void multiply(std::span<const double> x, std::span<double> y) const;
  double value_at(int row, int col) const;  // 0 if not stored

  const std::vector<int>& row_ptr() const { return row_ptr_; }
  const std::vector<int>& cols() const { return col_; }
  const std::vector<double>& values() const { return val_; }

  // Coordinate-list text dump: one "row col value" line per stored entry.
  void write_coordinate(std::ostream& out) const;

 private:
  int n_ = 0;
  std::vector<int> row_ptr_;
  std::vector<int> col_;
  std::vector<double> val_;
};

struct SolveReport {
  int iterations = 0;
  double rel_residual = 0.0;           // recomputed from the returned solution
  double rel_residual_internal = 0.0;  // solver's own final estimate
  std::string method;
  bool converged = false;
};

// Jacobi-preconditioned conjugate gradients for symmetric positive definite
// systems. Throws SolverError if negative curvature (an indefinite matrix)
// is detected; returns converged=false if the iteration cap is reached.
std::vector<double> solve_spd(const SparseMatrix& A, std::span<const double> b, double rtol,
                              SolveReport& report, int max_iterations = 0);

struct MMatrixDiagnostics {
  bool diagonal_positive = true;
  bool offdiagonal_nonpositive = true;
  bool column_dominant = true;
  double min_column_margin = 0.0;  // min over columns of (diag - sum |offdiag|)
  int bad_row = -1, bad_col = -1;  // first violation location, if any

  bool pass() const { return diagonal_positive && offdiagonal_nonpositive && column_dominant; }
};

// Checks positive diagonal, nonpositive off-diagonal entries, and strict
// column diagonal dominance. Pure diagnostic.
MMatrixDiagnostics validate_mmatrix(const SparseMatrix& A);

// Jacobi-preconditioned BiCGSTAB for the nonsymmetric M-matrix systems of the
// implicit transport step. Validates the M-matrix structure first and throws
// ValidationError on a structural failure.
std::vector<double> solve_mmatrix(const SparseMatrix& A, std::span<const double> b, double rtol,
                                  SolveReport& report, int max_iterations = 0);

// Dense LU with partial pivoting; the oracle path for small systems.
class DenseMatrix {
 public:
  explicit DenseMatrix(int n) : n_(n), a_(static_cast<size_t>(n) * n, 0.0) {}
  int size() const { return n_; }
  double& operator()(int r, int c) { return a_[static_cast<size_t>(r) * n_ + c]; }
  double operator()(int r, int c) const { return a_[static_cast<size_t>(r) * n_ + c]; }

 private:
  int n_;
  std::vector<double> a_;
};

std::vector<double> dense_solve(DenseMatrix a, std::vector<double> b);

}  // namespace epg
