#pragma once

#include <array>
#include <vector>

namespace epg {

// Nodal Lagrange basis of degree k on the reference triangle, in barycentric
// coordinates. Node order: the three vertices (k,0,0),(0,k,0),(0,0,k), then
// for each edge i (the edge opposite vertex i) the k-1 nodes running from
// vertex (i+1)%3 toward vertex (i+2)%3, then the interior nodes (k=3: one).
class LagrangeBasis {
 public:
  explicit LagrangeBasis(int degree);

  int degree() const { return degree_; }
  int size() const { return static_cast<int>(nodes_.size()); }
  const std::vector<std::array<int, 3>>& nodes() const { return nodes_; }

  // Values of all basis functions at a barycentric point.
  void eval(const std::array<double, 3>& lambda, std::vector<double>& values) const;

  // Barycentric partial derivatives d(phi)/d(lambda_c) of all basis functions.
  void eval_grad(const std::array<double, 3>& lambda,
                 std::vector<std::array<double, 3>>& grads) const;

 private:
  int degree_;
  std::vector<std::array<int, 3>> nodes_;
};

}  // namespace epg
