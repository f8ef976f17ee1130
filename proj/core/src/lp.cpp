#include "mrt/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "mrt/error.hpp"

namespace mrt {

LpSolution solve_lp_from_vertex(const Eigen::VectorXd& c, const Eigen::MatrixXd& A,
                                const Eigen::VectorXd& b, std::vector<Eigen::Index> active,
                                std::size_t max_iterations) {
  const Eigen::Index m = A.rows();
  const Eigen::Index n = A.cols();
  if (c.size() != n || b.size() != m) throw ArgumentError("solve_lp: dimension mismatch");
  if (static_cast<Eigen::Index>(active.size()) != n)
    throw ArgumentError("solve_lp: the starting vertex needs one active row per variable");
  std::vector<char> in_basis(static_cast<std::size_t>(m), 0);
  for (Eigen::Index k : active) {
    if (k < 0 || k >= m || in_basis[static_cast<std::size_t>(k)])
      throw ArgumentError("solve_lp: bad active row index");
    in_basis[static_cast<std::size_t>(k)] = 1;
  }

  Eigen::VectorXd rownorm(m);
  for (Eigen::Index i = 0; i < m; ++i) rownorm[i] = std::max(A.row(i).norm(), 1e-300);
  const double cnorm = std::max(c.norm(), 1e-300);
  constexpr double dual_tol = 1e-11;
  constexpr double dir_tol = 1e-10;

  Eigen::MatrixXd B(n, n);
  Eigen::VectorXd bB(n);
  Eigen::VectorXd x(n);
  auto factor = [&]() {
    for (Eigen::Index k = 0; k < n; ++k) {
      B.row(k) = A.row(active[static_cast<std::size_t>(k)]);
      bB[k] = b[active[static_cast<std::size_t>(k)]];
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(B);
    if (lu.rank() < n) throw ComputationError("solve_lp: active rows became dependent");
    x = lu.solve(bB);
    return lu;
  };

  LpSolution sol;
  Eigen::FullPivLU<Eigen::MatrixXd> lu = factor();
  for (Eigen::Index i = 0; i < m; ++i) {
    const double slack = b[i] - A.row(i).dot(x);
    if (slack < -1e-9 * (1.0 + std::abs(b[i]) + rownorm[i] * x.norm()))
      throw ArgumentError("solve_lp: starting vertex is infeasible");
  }

  for (;;) {
    // Multipliers y solve B'y = c; the vertex is optimal once none is negative.
    const Eigen::VectorXd y = B.transpose().fullPivLu().solve(c);
    Eigen::Index leave = -1;
    for (Eigen::Index k = 0; k < n; ++k) {
      const double scaled = y[k] * rownorm[active[static_cast<std::size_t>(k)]] / cnorm;
      if (scaled < -dual_tol &&
          (leave < 0 || active[static_cast<std::size_t>(k)] < active[static_cast<std::size_t>(leave)]))
        leave = k;
    }
    if (leave < 0) break;
    if (sol.iterations >= max_iterations) {
      sol.status = LpStatus::IterationLimit;
      break;
    }
    ++sol.iterations;

    // Edge that releases row `leave` and keeps the others tight: B d = -e_leave.
    Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
    e[leave] = -1.0;
    const Eigen::VectorXd dir = lu.solve(e);
    const double dnorm = dir.norm();

    Eigen::Index enter = -1;
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < m; ++i) {
      if (in_basis[static_cast<std::size_t>(i)]) continue;
      const double rate = A.row(i).dot(dir);
      if (rate <= dir_tol * rownorm[i] * dnorm) continue;
      const double slack = std::max(0.0, b[i] - A.row(i).dot(x));
      const double step = slack / rate;
      if (enter < 0 || step < best) {
        best = step;
        enter = i;
      }
    }
    if (enter < 0) {
      sol.status = LpStatus::Unbounded;
      break;
    }
    // Among rows that block at (numerically) the same step, the smallest index
    // enters; this is the tie-break that keeps Bland's rule cycle-free.
    const double tie = 1e-12 * (1.0 + best);
    for (Eigen::Index i = 0; i < enter; ++i) {
      if (in_basis[static_cast<std::size_t>(i)]) continue;
      const double rate = A.row(i).dot(dir);
      if (rate <= dir_tol * rownorm[i] * dnorm) continue;
      const double slack = std::max(0.0, b[i] - A.row(i).dot(x));
      if (slack / rate <= best + tie) {
        enter = i;
        break;
      }
    }
    in_basis[static_cast<std::size_t>(active[static_cast<std::size_t>(leave)])] = 0;
    active[static_cast<std::size_t>(leave)] = enter;
    in_basis[static_cast<std::size_t>(enter)] = 1;
    lu = factor();
  }

  sol.x = x;
  sol.objective = c.dot(x);
  return sol;
}

LpSolution solve_lp_origin_feasible(const Eigen::VectorXd& c, const Eigen::MatrixXd& A,
                                    const Eigen::VectorXd& b, std::size_t max_iterations) {
  const Eigen::Index m = A.rows();
  const Eigen::Index n = A.cols();
  if (c.size() != n || b.size() != m) throw ArgumentError("solve_lp: dimension mismatch");
  for (Eigen::Index i = 0; i < m; ++i)
    if (!(b[i] >= 0.0)) throw ArgumentError("solve_lp: right-hand side must be nonnegative");
  Eigen::MatrixXd full(m + n, n);
  full.topRows(m) = A;
  full.bottomRows(n) = -Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m + n);
  rhs.head(m) = b;
  std::vector<Eigen::Index> active(static_cast<std::size_t>(n));
  for (Eigen::Index j = 0; j < n; ++j) active[static_cast<std::size_t>(j)] = m + j;
  LpSolution sol = solve_lp_from_vertex(c, full, rhs, std::move(active), max_iterations);
  sol.x = sol.x.cwiseMax(0.0);
  sol.objective = c.dot(sol.x);
  return sol;
}

}  // namespace mrt
