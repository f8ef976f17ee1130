#pragma once

#include <vector>

#include <Eigen/Dense>

namespace mrt {

struct ProjectionResult {
  Eigen::VectorXd x;
  Eigen::VectorXd multipliers;
  std::vector<int> active;
  int iterations = 0;
};

/// argmin_x (x - b)' M^{-1} (x - b) subject to G x <= h, for symmetric positive
/// definite M. Solved as the dual  min_{l >= 0} 1/2 l'(G M G')l - l'(G b - h)  by a
/// Lawson-Hanson style active-set method, then x = b - M G' l. Intended for a
/// handful of constraints.
ProjectionResult project_polyhedron(const Eigen::VectorXd& b, const Eigen::MatrixXd& M,
                                    const Eigen::MatrixXd& G, const Eigen::VectorXd& h,
                                    int max_iterations = 500);

}  // namespace mrt
