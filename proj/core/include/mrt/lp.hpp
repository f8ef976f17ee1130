#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace mrt {

enum class LpStatus { Optimal, Unbounded, IterationLimit };

struct LpSolution {
  LpStatus status = LpStatus::Optimal;
  Eigen::VectorXd x;
  double objective = 0.0;
  std::size_t iterations = 0;
};

/// Primal simplex in vertex form for  max c'x  s.t.  A x <= b,  starting from the
/// feasible vertex where the n rows listed in `active` hold with equality.
/// The working basis is n x n, and the vertex and the multipliers are refactored
/// from the original data on every step, so rounding does not build up across
/// pivots. Meant for few variables and many rows. Bland's rule prevents cycling.
LpSolution solve_lp_from_vertex(const Eigen::VectorXd& c, const Eigen::MatrixXd& A,
                                const Eigen::VectorXd& b, std::vector<Eigen::Index> active,
                                std::size_t max_iterations = 50000);

/// max c'x  s.t.  A x <= b,  x >= 0  with b >= 0; the origin is the starting vertex.
LpSolution solve_lp_origin_feasible(const Eigen::VectorXd& c, const Eigen::MatrixXd& A,
                                    const Eigen::VectorXd& b, std::size_t max_iterations = 50000);

}  // namespace mrt
