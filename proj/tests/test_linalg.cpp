#include "epg/linalg.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "epg/core.hpp"

using namespace epg;

namespace {

SparseMatrix dense_to_sparse(const DenseMatrix& a) {
  std::vector<Triplet> triplets;
  for (int r = 0; r < a.size(); ++r)
    for (int c = 0; c < a.size(); ++c)
      if (a(r, c) != 0.0) triplets.push_back({r, c, a(r, c)});
  return SparseMatrix::from_triplets(a.size(), std::move(triplets));
}

}  // namespace

TEST_CASE("duplicate triplets are summed during finalization") {
  SparseMatrix m = SparseMatrix::from_triplets(2, {{0, 0, 1.0}, {0, 0, 2.0}, {1, 1, 1.0}});
  CHECK(m.nnz() == 2);
  CHECK(m.value_at(0, 0) == 3.0);
  CHECK(m.value_at(0, 1) == 0.0);
}

TEST_CASE("solve_spd on the identity returns the right-hand side") {
  SparseMatrix eye = SparseMatrix::from_triplets(3, {{0, 0, 1.0}, {1, 1, 1.0}, {2, 2, 1.0}});
  SolveReport report;
  const std::vector<double> b = {1.0, -2.0, 3.0};
  const auto x = solve_spd(eye, b, 1e-12, report);
  CHECK(report.converged);
  for (int i = 0; i < 3; ++i) CHECK(x[i] == doctest::Approx(b[i]).epsilon(1e-12));
}

TEST_CASE("solve_spd matches the dense oracle on a 1D Poisson matrix") {
  const int n = 5;
  DenseMatrix dense(n);
  std::vector<Triplet> triplets;
  for (int i = 0; i < n; ++i) {
    triplets.push_back({i, i, 2.0});
    dense(i, i) = 2.0;
    if (i > 0) {
      triplets.push_back({i, i - 1, -1.0});
      dense(i, i - 1) = -1.0;
    }
    if (i < n - 1) {
      triplets.push_back({i, i + 1, -1.0});
      dense(i, i + 1) = -1.0;
    }
  }
  SparseMatrix a = SparseMatrix::from_triplets(n, std::move(triplets));
  const std::vector<double> b(n, 1.0);
  SolveReport report;
  const auto x = solve_spd(a, b, 1e-13, report);
  const auto x_ref = dense_solve(dense, b);
  for (int i = 0; i < n; ++i) CHECK(x[i] == doctest::Approx(x_ref[i]).epsilon(1e-12));
  CHECK(report.rel_residual ==
        doctest::Approx(report.rel_residual_internal).epsilon(0.1).scale(1e-13));
}

TEST_CASE("solve_spd solves the two-element flux-correction system") {
  // Two triangles sharing one face, both with two Dirichlet boundary faces:
  // diag = 1/2 + 2, off-diagonal -1/2.
  SparseMatrix m =
      SparseMatrix::from_triplets(2, {{0, 0, 2.5}, {1, 1, 2.5}, {0, 1, -0.5}, {1, 0, -0.5}});
  const std::vector<double> r = {1.0, -0.5};
  SolveReport report;
  const auto alpha = solve_spd(m, r, 1e-13, report);
  // Closed-form 2x2 inverse: [a b; b a]^-1 = 1/(a^2-b^2) [a -b; -b a].
  const double det = 2.5 * 2.5 - 0.25;
  CHECK(alpha[0] == doctest::Approx((2.5 * 1.0 + 0.5 * -0.5) / det).epsilon(1e-12));
  CHECK(alpha[1] == doctest::Approx((0.5 * 1.0 + 2.5 * -0.5) / det).epsilon(1e-12));
}

TEST_CASE("solve_spd rejects an indefinite matrix") {
  SparseMatrix m = SparseMatrix::from_triplets(2, {{0, 0, 1.0}, {1, 1, -1.0}});
  SolveReport report;
  const std::vector<double> b = {1.0, 1.0};
  CHECK_THROWS_AS(solve_spd(m, b, 1e-12, report), SolverError);
}

TEST_CASE("solve_spd is deterministic") {
  std::mt19937 rng(13);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int n = 40;
  std::vector<Triplet> triplets;
  for (int i = 0; i < n; ++i) {
    triplets.push_back({i, i, 4.0 + u(rng)});
    if (i + 1 < n) {
      const double off = -u(rng);
      triplets.push_back({i, i + 1, off});
      triplets.push_back({i + 1, i, off});
    }
  }
  SparseMatrix a = SparseMatrix::from_triplets(n, std::move(triplets));
  std::vector<double> b(n);
  for (auto& v : b) v = u(rng) - 0.5;
  SolveReport r1, r2;
  const auto x1 = solve_spd(a, b, 1e-12, r1);
  const auto x2 = solve_spd(a, b, 1e-12, r2);
  for (int i = 0; i < n; ++i) CHECK(x1[i] == x2[i]);  // bitwise
  CHECK(r1.iterations == r2.iterations);
}

TEST_CASE("validate_mmatrix diagnostics") {
  SparseMatrix good = SparseMatrix::from_triplets(2, {{0, 0, 1.0}, {1, 1, 1.0}});
  const auto d = validate_mmatrix(good);
  CHECK(d.pass());
  CHECK(d.min_column_margin == doctest::Approx(1.0));

  SparseMatrix bad = SparseMatrix::from_triplets(
      2, {{0, 0, 1.0}, {1, 1, 1.0}, {0, 1, 0.5}});  // positive off-diagonal
  const auto db = validate_mmatrix(bad);
  CHECK(!db.offdiagonal_nonpositive);
  CHECK(db.bad_row == 0);
  CHECK(db.bad_col == 1);
  SolveReport report;
  const std::vector<double> b = {1.0, 1.0};
  CHECK_THROWS_AS(solve_mmatrix(bad, b, 1e-12, report), ValidationError);
}

TEST_CASE("solve_mmatrix: positive diagonal matrix, nonnegative rhs") {
  SparseMatrix m = SparseMatrix::from_triplets(3, {{0, 0, 2.0}, {1, 1, 4.0}, {2, 2, 8.0}});
  SolveReport report;
  const std::vector<double> b = {2.0, 2.0, 2.0};
  const auto x = solve_mmatrix(m, b, 1e-13, report);
  CHECK(x[0] == doctest::Approx(1.0));
  CHECK(x[1] == doctest::Approx(0.5));
  CHECK(x[2] == doctest::Approx(0.25));
}

TEST_CASE("solve_mmatrix matches the dense oracle on a 3x3 M-matrix") {
  DenseMatrix dense(3);
  dense(0, 0) = 3.0;
  dense(0, 1) = -1.0;
  dense(1, 0) = -1.0;
  dense(1, 1) = 3.0;
  dense(1, 2) = -1.0;
  dense(2, 1) = -1.0;
  dense(2, 2) = 3.0;
  SparseMatrix a = dense_to_sparse(dense);
  const std::vector<double> b = {1.0, 0.0, 2.0};
  SolveReport report;
  const auto x = solve_mmatrix(a, b, 1e-13, report);
  const auto x_ref = dense_solve(dense, b);
  for (int i = 0; i < 3; ++i) CHECK(x[i] == doctest::Approx(x_ref[i]).epsilon(1e-12));
  // Inverse positivity at solver accuracy.
  for (int i = 0; i < 3; ++i) CHECK(x[i] >= -1e-13);
}

TEST_CASE("coordinate-format dump") {
  SparseMatrix m = SparseMatrix::from_triplets(2, {{0, 0, 1.5}, {1, 0, -0.5}});
  std::stringstream out;
  m.write_coordinate(out);
  CHECK(out.str() == "0 0 1.5\n1 0 -0.5\n");
}
