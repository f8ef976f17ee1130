#include <doctest.h>

#include <cmath>

#include "mrt/error.hpp"
#include "mrt/random.hpp"
#include "mrt/symmetric_tensor.hpp"

using namespace mrt;
using doctest::Approx;

TEST_CASE("storage size and symmetric access") {
  SymmetricTensor t(3, 4);
  CHECK(t.size() == 20);
  const int idx[] = {2, 0, 1};
  t(idx) = 5.0;
  CHECK(t({0, 1, 2}) == 5.0);
  CHECK(t({1, 2, 0}) == 5.0);
  CHECK(t({2, 1, 0}) == 5.0);
  CHECK(t({0, 0, 1}) == 0.0);
  CHECK_THROWS_AS(t({0, 1}), ArgumentError);
  CHECK_THROWS_AS(t({0, 1, 4}), ArgumentError);
  CHECK_THROWS_AS(SymmetricTensor(0, 2), ArgumentError);

  for (std::size_t r = 0; r < t.size(); ++r) {
    const auto& a = t.multi_index(r);
    CHECK(std::is_sorted(a.begin(), a.end()));
  }
  CHECK(SymmetricTensor(5, 3).size() == 21);
}

TEST_CASE("multiplicities count distinct orderings") {
  const SymmetricTensor t(3, 2);
  double total = 0.0;
  for (std::size_t r = 0; r < t.size(); ++r) total += t.multiplicity(r);
  CHECK(total == 8.0);  // 2^3 ordered indices
}

TEST_CASE("tensor form") {
  const SymmetricTensor I = SymmetricTensor::from_matrix(Eigen::MatrixXd::Identity(2, 2));
  CHECK(tensor_form(I, Eigen::Vector2d(1, 1)) == Approx(2.0));
  Eigen::VectorXd q(3);
  q << 1, -2, 0.5;
  const SymmetricTensor T1 = SymmetricTensor::rank_one(q, 1);
  Eigen::VectorXd v(3);
  v << 0.3, 0.1, 2.0;
  CHECK(tensor_form(T1, v) == Approx(q.dot(v)));
  const SymmetricTensor T3 = SymmetricTensor::rank_one(Eigen::Vector2d(1, 2), 3);
  CHECK(tensor_form(T3, Eigen::Vector2d(1, 1)) == Approx(27.0));
  CHECK_THROWS_AS(tensor_form(T3, v), ArgumentError);

  SUBCASE("rank-one identity on random inputs") {
    const CounterRng rng(5);
    for (std::uint64_t i = 0; i < 50; ++i) {
      const int k = 1 + static_cast<int>(i % 4);
      const int n = 1 + static_cast<int>(i % 5);
      Eigen::VectorXd a(k), w(k);
      for (int j = 0; j < k; ++j) {
        a[j] = rng.normal(i, static_cast<std::uint64_t>(j));
        w[j] = rng.normal(i, static_cast<std::uint64_t>(10 + j));
      }
      const double expect = std::pow(a.dot(w), n);
      CHECK(std::abs(tensor_form(SymmetricTensor::rank_one(a, n), w) - expect) <=
            1e-12 * (1.0 + std::abs(expect)));
    }
  }
}

TEST_CASE("matrix round trip and arithmetic") {
  Eigen::MatrixXd m(2, 2);
  m << 1, 2, 2, -3;
  const SymmetricTensor t = SymmetricTensor::from_matrix(m);
  CHECK(t.to_matrix() == m);
  const SymmetricTensor s = t + 2.0 * t;
  CHECK(s({0, 1}) == 6.0);
  CHECK(s.max_abs() == 9.0);
  CHECK_THROWS_AS(SymmetricTensor(3, 2).to_matrix(), ArgumentError);
}
