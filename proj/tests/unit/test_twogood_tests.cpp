#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "mrt/error.hpp"
#include "mrt/moments.hpp"
#include "mrt/random.hpp"
#include "mrt/twogood_tests.hpp"

using namespace mrt;
using doctest::Approx;

namespace {
const RandomCoefficientPopulation kPop = RandomCoefficientPopulation::reference();

BernsteinTranslations from_lambdas(std::vector<double> l) {
  BernsteinTranslations bt;
  bt.degree = static_cast<int>(l.size()) - 1;
  bt.lambdas = std::move(l);
  bt.standard_errors.assign(bt.lambdas.size(), 0.0);
  return bt;
}

// Exact LP optimum by enumerating vertices: every vertex of the feasible
// polytope is the solution of d active constraints among the LP rows.
double brute_force_vertices(const std::vector<double>& lambda, int grid) {
  const int n = static_cast<int>(lambda.size()) - 1;
  const int d = n + 1;
  std::vector<Eigen::RowVectorXd> rows;
  std::vector<double> rhs;
  for (int g = 0; g + 1 < grid; ++g) {
    const Eigen::MatrixXd S =
        bernstein_subdivision_matrix(n, double(g) / (grid - 1), double(g + 1) / (grid - 1));
    for (int j = 0; j < d; ++j) {
      rows.push_back(-S.row(j));
      rhs.push_back(0.0);
    }
  }
  for (int v = 0; v < d; ++v) {
    Eigen::RowVectorXd e = Eigen::RowVectorXd::Zero(d);
    e[v] = 1.0;
    rows.push_back(e);
    rhs.push_back(1.0);
    rows.push_back(-e);
    rhs.push_back(1.0);
  }
  const int m = static_cast<int>(rows.size());
  double best = -std::numeric_limits<double>::infinity();
  std::vector<int> pick(d);
  std::function<void(int, int)> rec = [&](int pos, int start) {
    if (pos == d) {
      Eigen::MatrixXd A(d, d);
      Eigen::VectorXd r(d);
      for (int i = 0; i < d; ++i) {
        A.row(i) = rows[pick[i]];
        r[i] = rhs[pick[i]];
      }
      Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
      if (lu.rank() < d) return;
      const Eigen::VectorXd x = lu.solve(r);
      for (int i = 0; i < m; ++i)
        if (rows[i].dot(x) > rhs[i] + 1e-9) return;
      double obj = 0.0;
      for (int i = 0; i < d; ++i) obj += lambda[i] * x[i];
      best = std::max(best, obj);
      return;
    }
    for (int i = start; i < m; ++i) {
      pick[pos] = i;
      rec(pos + 1, i + 1);
    }
  };
  rec(0, 0);
  return best;
}

// Lower bound: best feasible point of the 11^{n+1} grid over [-1,1]^{n+1}.
double brute_force_grid(const std::vector<double>& lambda, int grid) {
  const int d = static_cast<int>(lambda.size());
  std::vector<double> beta(d);
  double best = -std::numeric_limits<double>::infinity();
  std::function<void(int)> rec = [&](int pos) {
    if (pos == d) {
      for (int g = 0; g + 1 < grid; ++g) {
        const Eigen::MatrixXd S = bernstein_subdivision_matrix(
            d - 1, double(g) / (grid - 1), double(g + 1) / (grid - 1));
        const Eigen::VectorXd c = S * Eigen::Map<Eigen::VectorXd>(beta.data(), d);
        if (c.minCoeff() < -1e-12) return;
      }
      double obj = 0.0;
      for (int i = 0; i < d; ++i) obj += lambda[i] * beta[i];
      best = std::max(best, obj);
      return;
    }
    for (int k = 0; k <= 10; ++k) {
      beta[pos] = -1.0 + 0.2 * k;
      rec(pos + 1);
    }
  };
  rec(0);
  return best;
}

Budget random_budget(const CounterRng& rng, std::uint64_t i) {
  return Budget::two_good(uniform_on(0.1, 1, rng.uniform(i, 0)), uniform_on(1, 2, rng.uniform(i, 1)));
}
}  // namespace

TEST_CASE("four-inequality test") {
  TestVerdict v = four_inequality_test(-0.5, -0.5, 0.5, 2.0);
  CHECK_FALSE(v.rejected);
  CHECK(v.witnesses.size() == 4);
  CHECK(v.worst_slack <= 0.0);
  v = four_inequality_test(1.0 / 18, -5.0, 1.0, 11.0 / 6);
  CHECK(v.rejected);
  CHECK(v.witnesses[0].value == Approx(1.0 / 18));
  v = four_inequality_test(0.0, 0.0, 1.0, 2.0);
  CHECK_FALSE(v.rejected);
  CHECK(v.worst_slack == 0.0);
  CHECK_THROWS_AS(four_inequality_test(0, 0, 2.0, 1.0), ArgumentError);
  CHECK(v.rejected == (v.worst_slack > v.tolerance));
}

TEST_CASE("bernstein basis") {
  std::vector<double> b = bernstein_basis(1, 0.3);
  CHECK(b[0] == Approx(0.7));
  CHECK(b[1] == Approx(0.3));
  b = bernstein_basis(2, 0.5);
  CHECK(b[0] == Approx(0.25));
  CHECK(b[1] == Approx(0.5));
  CHECK(b[2] == Approx(0.25));
  CHECK_THROWS_AS(bernstein_basis(3, 1.2), ArgumentError);
  const CounterRng rng(1);
  for (int n = 0; n <= 10; ++n) {
    for (std::uint64_t i = 0; i < 100; ++i) {
      const double q = rng.uniform(i, static_cast<std::uint64_t>(n));
      const std::vector<double> v = bernstein_basis(n, q);
      double sum = 0.0;
      for (double x : v) {
        CHECK(x >= 0.0);
        sum += x;
      }
      CHECK(std::abs(sum - 1.0) < 1e-12);
      for (int k = 0; k <= n; ++k) {
        const double direct = std::tgamma(n + 1) / (std::tgamma(k + 1) * std::tgamma(n - k + 1)) *
                              std::pow(q, k) * std::pow(1 - q, n - k);
        CHECK(v[k] == Approx(direct).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("rescaling") {
  CHECK(rescale_to_unit(2.0, 2.0, 5.0) == 0.0);
  CHECK(rescale_to_unit(5.0, 2.0, 5.0) == 1.0);
  CHECK(rescale_to_unit(1.41667, 0.0, 3.0) == Approx(0.47222).epsilon(1e-4));
  CHECK_THROWS_AS(rescale_to_unit(1.0, 1.0, 1.0), ArgumentError);
  const Support s = Support::affordable(Budget::two_good(0.5, 1.5));
  CHECK(s.lo == 0.0);
  CHECK(s.hi == 3.0);
}

TEST_CASE("monomial coefficients reproduce the basis") {
  const Support s{0.4, 2.1};
  for (int n = 0; n <= 5; ++n) {
    for (int v = 0; v <= n; ++v) {
      const std::vector<double> c = bernstein_monomial_coefficients(n, v, s);
      for (double q : {0.4, 0.9, 1.3, 2.1}) {
        double poly = 0.0;
        for (int i = 0; i <= n; ++i) poly += c[i] * std::pow(q, i);
        CHECK(poly == Approx(bernstein_basis(n, rescale_to_unit(q, s.lo, s.hi))[v]).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("subdivision matrix") {
  const CounterRng rng(3);
  for (int n = 1; n <= 4; ++n) {
    Eigen::VectorXd beta(n + 1);
    for (int i = 0; i <= n; ++i) beta[i] = rng.normal(static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(i));
    const Eigen::MatrixXd S = bernstein_subdivision_matrix(n, 0.2, 0.7);
    const Eigen::VectorXd sub = S * beta;
    for (double t : {0.0, 0.3, 1.0}) {
      const std::vector<double> inner = bernstein_basis(n, t);
      const std::vector<double> outer = bernstein_basis(n, 0.2 + 0.5 * t);
      double a = 0.0, b = 0.0;
      for (int i = 0; i <= n; ++i) {
        a += inner[i] * sub[i];
        b += outer[i] * beta[i];
      }
      CHECK(a == Approx(b).epsilon(1e-12));
    }
  }
}

TEST_CASE("bernstein translations") {
  RandomCoefficientSampler rc(kPop);
  const Budget b = Budget::two_good(0.5, 1.5);
  const Support sup = Support::of(rc_support_bounds(kPop, b));
  const BernsteinTranslations bt = bernstein_translations(rc, b, 1, 100000, 3, sup);
  const MomentSet ms = monte_carlo_moments(rc, b, 2, {100000, 3});
  CHECK(bt.lambdas[0] + bt.lambdas[1] == Approx(monomial_translation(ms, 0)).epsilon(1e-10));

  const auto cd = cobb_douglas_sampler(0.5);
  const Budget cb = Budget::two_good(1, 2);
  for (int n = 1; n <= 4; ++n) {
    const BernsteinTranslations c = bernstein_translations(*cd, cb, n, 100000, 1, {0.0, 2.0});
    for (int v = 0; v <= n; ++v) CHECK(c.lambdas[v] <= 3 * c.standard_errors[v] + 1e-12);
  }
  CHECK_THROWS_AS(bernstein_translations(*cd, cb, 1, 10, 1, {1.5, 2.0}), DomainError);

  SUBCASE("moment route matches the sampling route") {
    const MomentSet m4 = monte_carlo_moments(rc, b, 5, {50000, 8});
    const BernsteinTranslations direct = bernstein_translations(rc, b, 3, 50000, 8, sup);
    const BernsteinTranslations viag = bernstein_translations_from_gammas(
        [&](int n) { return monomial_translation(m4, n); }, 3, sup);
    for (int v = 0; v <= 3; ++v) CHECK(direct.lambdas[v] == Approx(viag.lambdas[v]).epsilon(1e-8));
  }
}

TEST_CASE("bernstein LP") {
  TestVerdict v = bernstein_lp_test(from_lambdas({1.0, -1.0}));
  CHECK(v.rejected);
  CHECK(v.worst_slack == Approx(1.0));
  CHECK(v.certificate[0] == Approx(1.0));
  CHECK(v.certificate[1] == Approx(0.0));

  v = bernstein_lp_test(from_lambdas({-1.0, -0.5, -1.0}));
  CHECK_FALSE(v.rejected);
  CHECK(v.worst_slack == Approx(0.0));

  // Negative interior coefficients are allowed while the polynomial stays
  // nonnegative, so a vector with all entries <= 0 may still be refuted.
  v = bernstein_lp_test(from_lambdas({-0.1, -5.0, -0.1}));
  CHECK(v.rejected);

  CHECK_THROWS_AS(bernstein_lp_test(from_lambdas({1.0}), {1, 1e-8, LpVariant::AllGridPoints}),
                  ArgumentError);

  SUBCASE("optimum is nonnegative and matches brute force") {
    const CounterRng rng(11);
    for (std::uint64_t t = 0; t < 12; ++t) {
      const int n = 1 + static_cast<int>(t % 2);
      std::vector<double> lam(n + 1);
      for (int i = 0; i <= n; ++i) lam[i] = rng.normal(t, static_cast<std::uint64_t>(i));
      const LpTestOptions o{11, 1e-8, LpVariant::AllGridPoints};
      const TestVerdict r = bernstein_lp_test(from_lambdas(lam), o);
      CHECK(r.worst_slack >= -1e-12);
      CHECK(std::abs(r.worst_slack - brute_force_vertices(lam, 11)) < 1e-6);
      CHECK(brute_force_grid(lam, 11) <= r.worst_slack + 1e-9);
    }
  }

  SUBCASE("per-grid-point variant") {
    const LpTestOptions o{101, 1e-8, LpVariant::PerGridPoint};
    const TestVerdict r = bernstein_lp_test(from_lambdas({1.0, -1.0}), o);
    CHECK(r.rejected);
    CHECK(r.witnesses.size() == 101);
  }
}

TEST_CASE("grid constraints alone can refute a rational point mass") {
  // A single type with demand q and slutsky term s < 0 has Lambda_v = b_v(t) s.
  // Pointwise grid constraints leave polynomials that dip below zero between
  // grid points, which can then pick up a positive value at t.
  const double s = -1.0;
  const double t = 0.005;
  std::vector<double> lam = bernstein_basis(2, t);
  for (double& l : lam) l *= s;
  const TestVerdict pointwise = bernstein_lp_test(from_lambdas(lam), {101, 1e-8, LpVariant::PerGridPoint});
  const TestVerdict certified = bernstein_lp_test(from_lambdas(lam), {101, 1e-8, LpVariant::AllGridPoints});
  CHECK(pointwise.rejected);
  CHECK_FALSE(certified.rejected);
}

TEST_CASE("LP stays exact on a degenerate single-type vector") {
  // A point mass at an interior t: Lambda_v = b_v(t) s with s < 0. Every
  // certified polynomial has pi(t) >= 0, so the optimum is exactly 0 and many
  // subdivision rows are tight at once.
  const std::vector<double> lam{-1.1724571923841722, -4.6898287695657928, -7.0347431542904815,
                                -4.6898287695657928, -1.1724571923914482};
  for (int G : {11, 51, 101, 201}) {
    CAPTURE(G);
    const TestVerdict r = bernstein_lp_test(from_lambdas(lam), {G, 1e-8, LpVariant::AllGridPoints});
    CHECK_FALSE(r.rejected);
    CHECK(std::abs(r.worst_slack) < 1e-9);
    // The certificate must be feasible: nonnegative on a fine grid.
    for (int k = 0; k <= 1000; ++k) {
      const std::vector<double> basis = bernstein_basis(4, k / 1000.0);
      double pi = 0.0;
      for (int v = 0; v <= 4; ++v) pi += r.certificate[static_cast<std::size_t>(v)] * basis[static_cast<std::size_t>(v)];
      CHECK(pi >= -1e-9);
    }
  }
}

TEST_CASE("degree-1 LP decides like the four-inequality test") {
  const CounterRng rng(21);
  int agree = 0;
  for (std::uint64_t i = 0; i < 50; ++i) {
    const double ap = uniform_on(0.1, 0.6, rng.uniform(i, 2));
    const double ay = uniform_on(0.05, 0.5, rng.uniform(i, 3));
    const RandomCoefficientPopulation pop(ap, ap + uniform_on(0.05, 0.6, rng.uniform(i, 4)), ay,
                                          ay + uniform_on(0.05, 0.4, rng.uniform(i, 5)));
    const Budget b = random_budget(rng, i);
    const SupportBounds sb = rc_support_bounds(pop, b);
    REQUIRE(sb.positive);
    const MomentSet ms = rc_closed_form_moments(pop, b, 3);
    const double g0 = monomial_translation(ms, 0), g1 = monomial_translation(ms, 1);
    const TestVerdict four = four_inequality_test(g0, g1, sb.q_min, sb.q_max);
    const BernsteinTranslations bt = bernstein_translations_from_gammas(
        [&](int n) { return n == 0 ? g0 : g1; }, 1, Support::of(sb));
    const TestVerdict lp = bernstein_lp_test(bt);
    CHECK(lp.rejected == four.rejected);
    agree += lp.rejected == four.rejected;
  }
  CHECK(agree == 50);
}

TEST_CASE("rejection is monotone in degree") {
  const CounterRng rng(31);
  for (std::uint64_t i = 0; i < 50; ++i) {
    const Budget b = random_budget(rng, i);
    const SupportBounds sb = rc_support_bounds(kPop, b);
    std::vector<double> g;
    for (int n = 0; n <= 5; ++n) {
      double val = 0.0;
      // Closed-form moments stop at order 3; use the exact expectation instead.
      val = -rc_mixed_expectation(kPop, b, 1, 0, n) + rc_mixed_expectation(kPop, b, 0, 1, n + 1);
      g.push_back(val);
    }
    bool prev = false;
    for (int d = 1; d <= 4; ++d) {
      const BernsteinTranslations bt =
          bernstein_translations_from_gammas([&](int n) { return g[n]; }, d, Support::of(sb));
      const bool rej = bernstein_lp_test(bt).rejected;
      if (prev) CHECK(rej);
      prev = rej;
    }
  }
}

TEST_CASE("enumeration") {
  const Budget b = Budget::two_good(0.5, 1.5);
  const MomentSet ms = rc_closed_form_moments(kPop, b, 3);
  const Support sup = Support::of(rc_support_bounds(kPop, b));
  EnumerationResult r = enumeration_test([&](int n) { return monomial_translation(ms, n); }, 1, sup);
  CHECK(r.rejected());
  CHECK(r.degree == 1);

  r = enumeration_test([&](int n) { return monomial_translation(ms, n); }, 0, sup);
  CHECK_FALSE(r.rejected());
  CHECK(r.objectives.empty());

  const auto cd = cobb_douglas_sampler(0.5);
  const MomentSet cm = monte_carlo_moments(*cd, Budget::two_good(1, 2), 8, {4, 0});
  for (int d = 1; d <= 5; ++d) {
    const EnumerationResult c =
        enumeration_test([&](int n) { return monomial_translation(cm, n); }, d, {0.0, 2.0});
    CHECK_FALSE(c.rejected());
  }
}
