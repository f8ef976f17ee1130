#include <doctest.h>

#include "mrt/error.hpp"
#include "mrt/linalg.hpp"
#include "mrt/lp.hpp"
#include "mrt/qp.hpp"
#include "mrt/random.hpp"

using namespace mrt;
using doctest::Approx;

TEST_CASE("jacobi matches the reference eigen-solver") {
  const CounterRng rng(1);
  for (std::uint64_t t = 0; t < 20; ++t) {
    const int n = 1 + static_cast<int>(t % 8);
    Eigen::MatrixXd A(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) A(i, j) = rng.normal(t, static_cast<std::uint64_t>(i * n + j));
    A = 0.5 * (A + A.transpose()).eval();
    const SymmetricEigen e = jacobi_eigen(A);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ref(A);
    CHECK((e.values - ref.eigenvalues()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((A * e.vectors - e.vectors * e.values.asDiagonal()).norm() < 1e-11);
    CHECK((e.vectors.transpose() * e.vectors - Eigen::MatrixXd::Identity(n, n)).norm() < 1e-12);
  }
  CHECK_THROWS_AS(jacobi_eigen(Eigen::MatrixXd::Zero(2, 3)), ArgumentError);
}

TEST_CASE("simplex on small programs") {
  // max x + y s.t. x + 2y <= 4, 3x + y <= 6
  Eigen::VectorXd c(2);
  c << 1, 1;
  Eigen::MatrixXd A(2, 2);
  A << 1, 2, 3, 1;
  Eigen::VectorXd b(2);
  b << 4, 6;
  const LpSolution s = solve_lp_origin_feasible(c, A, b);
  CHECK(s.status == LpStatus::Optimal);
  CHECK(s.objective == Approx(2.8));
  CHECK(s.x[0] == Approx(1.6));
  CHECK(s.x[1] == Approx(1.2));

  Eigen::MatrixXd open(1, 2);
  open << 1, -1;
  Eigen::VectorXd one(1);
  one << 1;
  CHECK(solve_lp_origin_feasible(c, open, one).status == LpStatus::Unbounded);
  CHECK_THROWS_AS(solve_lp_origin_feasible(c, A, -b), ArgumentError);
}

TEST_CASE("degenerate program terminates") {
  // Many zero right-hand sides through the origin.
  Eigen::VectorXd c(3);
  c << 1, 1, 1;
  Eigen::MatrixXd A(7, 3);
  A << 1, -1, 0, -1, 1, 0, 0, 1, -1, 0, -1, 1, 1, 0, -1, 1, 0, 0, 0, 1, 0;
  Eigen::VectorXd b = Eigen::VectorXd::Zero(7);
  b[5] = 1;
  b[6] = 1;
  const LpSolution s = solve_lp_origin_feasible(c, A, b);
  CHECK(s.status == LpStatus::Optimal);
  CHECK(s.objective == Approx(3.0));
}

TEST_CASE("metric projection") {
  Eigen::VectorXd b(2);
  b << 1, 1;
  Eigen::MatrixXd G(1, 2);
  G << 1, 1;
  Eigen::VectorXd h(1);
  h << 0;
  const ProjectionResult r = project_polyhedron(b, Eigen::MatrixXd::Identity(2, 2), G, h);
  CHECK(r.x[0] == Approx(0.0).epsilon(1e-12));
  CHECK(r.x[1] == Approx(0.0).epsilon(1e-12));
  CHECK(r.active.size() == 1);

  Eigen::VectorXd inside(2);
  inside << -1, -2;
  CHECK(project_polyhedron(inside, Eigen::MatrixXd::Identity(2, 2), G, h).x == inside);
}
