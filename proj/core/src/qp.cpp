#include "mrt/qp.hpp"

#include <algorithm>
#include <cmath>

#include "mrt/error.hpp"

namespace mrt {

ProjectionResult project_polyhedron(const Eigen::VectorXd& b, const Eigen::MatrixXd& M,
                                    const Eigen::MatrixXd& G, const Eigen::VectorXd& h,
                                    int max_iterations) {
  const Eigen::Index n = b.size();
  const Eigen::Index m = G.rows();
  if (M.rows() != n || M.cols() != n || G.cols() != n || h.size() != m)
    throw ArgumentError("project_polyhedron: dimension mismatch");

  const Eigen::MatrixXd MGt = M * G.transpose();
  const Eigen::MatrixXd Q = G * MGt;
  const Eigen::VectorXd r = G * b - h;
  const double scale = 1.0 + Q.diagonal().cwiseAbs().maxCoeff();
  const double tol = 1e-14 * scale * (1.0 + r.cwiseAbs().maxCoeff());

  Eigen::VectorXd lambda = Eigen::VectorXd::Zero(m);
  std::vector<bool> free(static_cast<std::size_t>(m), false);
  ProjectionResult out;

  auto solve_free = [&](Eigen::VectorXd& z) {
    std::vector<Eigen::Index> idx;
    for (Eigen::Index i = 0; i < m; ++i)
      if (free[static_cast<std::size_t>(i)]) idx.push_back(i);
    const Eigen::Index k = static_cast<Eigen::Index>(idx.size());
    Eigen::MatrixXd A(k, k);
    Eigen::VectorXd rhs(k);
    for (Eigen::Index a = 0; a < k; ++a) {
      rhs[a] = r[idx[static_cast<std::size_t>(a)]];
      for (Eigen::Index c = 0; c < k; ++c)
        A(a, c) = Q(idx[static_cast<std::size_t>(a)], idx[static_cast<std::size_t>(c)]);
    }
    const Eigen::VectorXd s = A.completeOrthogonalDecomposition().solve(rhs);
    z = Eigen::VectorXd::Zero(m);
    for (Eigen::Index a = 0; a < k; ++a) z[idx[static_cast<std::size_t>(a)]] = s[a];
  };

  for (;;) {
    const Eigen::VectorXd w = r - Q * lambda;
    Eigen::Index j = -1;
    double best = tol;
    for (Eigen::Index i = 0; i < m; ++i) {
      if (!free[static_cast<std::size_t>(i)] && w[i] > best) {
        best = w[i];
        j = i;
      }
    }
    if (j < 0) break;
    free[static_cast<std::size_t>(j)] = true;
    for (;;) {
      if (++out.iterations > max_iterations)
        throw ComputationError("project_polyhedron: active set did not converge");
      Eigen::VectorXd z;
      solve_free(z);
      bool positive = true;
      for (Eigen::Index i = 0; i < m; ++i)
        if (free[static_cast<std::size_t>(i)] && z[i] <= 0.0) positive = false;
      if (positive) {
        lambda = z;
        break;
      }
      double alpha = 1.0;
      for (Eigen::Index i = 0; i < m; ++i)
        if (free[static_cast<std::size_t>(i)] && z[i] <= 0.0)
          alpha = std::min(alpha, lambda[i] / (lambda[i] - z[i]));
      lambda += alpha * (z - lambda);
      for (Eigen::Index i = 0; i < m; ++i) {
        if (free[static_cast<std::size_t>(i)] && lambda[i] <= 1e-300) {
          free[static_cast<std::size_t>(i)] = false;
          lambda[i] = 0.0;
        }
      }
    }
  }

  out.x = b - MGt * lambda;
  out.multipliers = lambda;
  for (Eigen::Index i = 0; i < m; ++i)
    if (lambda[i] > 0.0) out.active.push_back(static_cast<int>(i));
  return out;
}

}  // namespace mrt
