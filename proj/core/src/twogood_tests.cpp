#include "mrt/twogood_tests.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "mrt/error.hpp"
#include "mrt/lp.hpp"
#include "sampling.hpp"

namespace mrt {

namespace {

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return r;
}

void finish(TestVerdict& v) {
  v.worst_slack = -std::numeric_limits<double>::infinity();
  for (const Witness& w : v.witnesses) v.worst_slack = std::max(v.worst_slack, w.value);
  v.rejected = v.worst_slack > v.tolerance;
}

void check_support(const Support& s, const char* who) {
  if (!(s.lo < s.hi) || !std::isfinite(s.lo) || !std::isfinite(s.hi))
    throw ArgumentError(std::string(who) + ": degenerate support interval");
}

}  // namespace

TestVerdict four_inequality_test(double gamma0, double gamma1, double q_min, double q_max,
                                 double tol) {
  if (q_min > q_max) throw ArgumentError("four_inequality_test: q_min > q_max");
  if (q_min < 0.0) throw ArgumentError("four_inequality_test: q_min must be nonnegative");
  TestVerdict v;
  v.tolerance = tol;
  v.witnesses = {
      {"Gamma0 <= 0", gamma0},
      {"Gamma1 <= 0", gamma1},
      {"-q_min*Gamma0 + Gamma1 <= 0", -q_min * gamma0 + gamma1},
      {"q_max*Gamma0 - Gamma1 <= 0", q_max * gamma0 - gamma1},
  };
  finish(v);
  return v;
}

std::vector<double> bernstein_basis(int n, double q) {
  if (n < 0) throw ArgumentError("bernstein_basis: negative degree");
  if (!(q >= 0.0 && q <= 1.0)) throw ArgumentError("bernstein_basis: q outside [0,1]");
  // de Casteljau-style recurrence keeps every value a convex combination.
  std::vector<double> b(static_cast<std::size_t>(n) + 1, 0.0);
  b[0] = 1.0;
  for (int d = 1; d <= n; ++d) {
    for (int v = d; v >= 1; --v) b[v] = (1.0 - q) * b[v] + q * b[v - 1];
    b[0] *= (1.0 - q);
  }
  return b;
}

double rescale_to_unit(double q, double q_lo, double q_hi) {
  if (!(q_lo < q_hi)) throw ArgumentError("rescale_to_unit: degenerate interval");
  if (q < q_lo || q > q_hi) throw ArgumentError("rescale_to_unit: q outside the interval");
  return (q - q_lo) / (q_hi - q_lo);
}

Support Support::affordable(const Budget& b) { return {0.0, b.income() / b.price()}; }

std::vector<double> bernstein_monomial_coefficients(int n, int v, const Support& support) {
  check_support(support, "bernstein_monomial_coefficients");
  if (n < 0 || v < 0 || v > n) throw ArgumentError("bernstein_monomial_coefficients: bad index");
  const double w = support.hi - support.lo;
  std::vector<double> out(static_cast<std::size_t>(n) + 1, 0.0);
  // b_{v,n}(t) = sum_{j=v}^n C(n,v) C(n-v,j-v) (-1)^{j-v} t^j, t = (q - lo)/w
  for (int j = v; j <= n; ++j) {
    const double tj = binomial(n, v) * binomial(n - v, j - v) * ((j - v) % 2 ? -1.0 : 1.0) /
                      std::pow(w, j);
    for (int i = 0; i <= j; ++i)
      out[i] += tj * binomial(j, i) * std::pow(-support.lo, j - i);
  }
  return out;
}

BernsteinTranslations bernstein_translations(const Sampler& s, const Budget& b, int degree,
                                             std::uint64_t draws, std::uint64_t seed,
                                             const Support& support) {
  check_support(support, "bernstein_translations");
  if (degree < 0) throw ArgumentError("bernstein_translations: negative degree");
  if (draws == 0) throw ArgumentError("bernstein_translations: need at least one draw");
  if (s.goods() != 1 || b.goods() != 1)
    throw ArgumentError("bernstein_translations: needs a one-good sampler");

  const bool fd = !s.has_derivatives();
  const double hp = 1e-4 * b.price();
  const double hy = 1e-4 * b.income();
  const Budget bp_hi = b.with_price(0, b.price() + hp);
  const Budget bp_lo = b.with_price(0, b.price() - hp);
  const Budget by_hi = b.with_income(b.income() + hy);
  const Budget by_lo = b.with_income(b.income() - hy);
  const double slack = 1e-12 * (support.hi - support.lo);
  const std::size_t width = static_cast<std::size_t>(degree) + 1;

  auto per_draw = [&](std::uint64_t i, double* out) {
    const DemandDraw d = s.draw(b, seed, i);
    const double q = d.quantity[0];
    double slutsky;
    if (fd) {
      const double dqp = (s.draw(bp_hi, seed, i).quantity[0] - s.draw(bp_lo, seed, i).quantity[0]) /
                         (2.0 * hp);
      const double dqy = (s.draw(by_hi, seed, i).quantity[0] - s.draw(by_lo, seed, i).quantity[0]) /
                         (2.0 * hy);
      slutsky = dqp + q * dqy;
    } else {
      slutsky = d.slutsky_scalar();
    }
    if (q < support.lo - slack || q > support.hi + slack)
      throw DomainError("bernstein_translations: demand " + std::to_string(q) +
                        " outside the rescaling support");
    const double t = std::clamp((q - support.lo) / (support.hi - support.lo), 0.0, 1.0);
    const std::vector<double> basis = bernstein_basis(degree, t);
    for (std::size_t v = 0; v < width; ++v) out[v] = basis[v] * slutsky;
  };
  const detail::SampleSummary sum = detail::summarize_draws(draws, width, per_draw);

  BernsteinTranslations bt;
  bt.degree = degree;
  bt.lambdas = sum.mean;
  bt.standard_errors = sum.se;
  bt.support = support;
  return bt;
}

BernsteinTranslations bernstein_translations_from_gammas(
    const std::function<double(int)>& gamma, int degree, const Support& support,
    const std::function<double(int)>& gamma_se) {
  check_support(support, "bernstein_translations_from_gammas");
  if (degree < 0) throw ArgumentError("bernstein_translations_from_gammas: negative degree");
  std::vector<double> g(static_cast<std::size_t>(degree) + 1);
  std::vector<double> se(g.size(), 0.0);
  for (int i = 0; i <= degree; ++i) {
    g[i] = gamma(i);
    if (gamma_se) se[i] = gamma_se(i);
  }
  BernsteinTranslations bt;
  bt.degree = degree;
  bt.support = support;
  for (int v = 0; v <= degree; ++v) {
    const std::vector<double> c = bernstein_monomial_coefficients(degree, v, support);
    double lam = 0.0, err = 0.0;
    for (int i = 0; i <= degree; ++i) {
      lam += c[i] * g[i];
      err += std::abs(c[i]) * se[i];
    }
    bt.lambdas.push_back(lam);
    bt.standard_errors.push_back(err);
  }
  return bt;
}

Eigen::MatrixXd bernstein_subdivision_matrix(int n, double a, double b) {
  if (n < 0) throw ArgumentError("bernstein_subdivision_matrix: negative degree");
  if (!(0.0 <= a && a < b && b <= 1.0))
    throw ArgumentError("bernstein_subdivision_matrix: need 0 <= a < b <= 1");
  // Coefficient j on [a,b] is the blossom at (a x (n-j), b x j); evaluate it by
  // de Casteljau with a per-level parameter, once per unit coefficient vector.
  Eigen::MatrixXd S(n + 1, n + 1);
  std::vector<double> c(static_cast<std::size_t>(n) + 1);
  for (int v = 0; v <= n; ++v) {
    for (int j = 0; j <= n; ++j) {
      std::fill(c.begin(), c.end(), 0.0);
      c[v] = 1.0;
      for (int r = 1; r <= n; ++r) {
        const double t = r <= n - j ? a : b;
        for (int i = 0; i + r <= n; ++i) c[i] = (1.0 - t) * c[i] + t * c[i + 1];
      }
      S(j, v) = c[0];
    }
  }
  return S;
}

namespace {

// max lambda'beta over beta in [-1,1]^{n+1} with rows' beta >= 0. The start is
// beta = 1, which is feasible for any row set because Bernstein rows are
// nonnegative and sum to one, and it avoids the heavily degenerate origin.
LpSolution solve_box_lp(const std::vector<double>& lambda, const Eigen::MatrixXd& rows) {
  const Eigen::Index d = static_cast<Eigen::Index>(lambda.size());
  const Eigen::Index r = rows.rows();
  Eigen::VectorXd c(d);
  for (Eigen::Index v = 0; v < d; ++v) c[v] = lambda[static_cast<std::size_t>(v)];
  Eigen::MatrixXd A(r + 2 * d, d);
  A.topRows(r) = -rows;
  A.middleRows(r, d).setIdentity();
  A.bottomRows(d) = -Eigen::MatrixXd::Identity(d, d);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(r + 2 * d);
  rhs.tail(2 * d).setOnes();
  std::vector<Eigen::Index> active(static_cast<std::size_t>(d));
  for (Eigen::Index v = 0; v < d; ++v) active[static_cast<std::size_t>(v)] = r + v;
  LpSolution sol = solve_lp_from_vertex(c, A, rhs, std::move(active));
  if (sol.status != LpStatus::Optimal)
    throw ComputationError("bernstein_lp_test: simplex did not reach an optimum");
  return sol;
}

std::vector<double> beta_of(const LpSolution& sol, Eigen::Index d) {
  std::vector<double> beta(static_cast<std::size_t>(d));
  for (Eigen::Index v = 0; v < d; ++v) beta[static_cast<std::size_t>(v)] = sol.x[v];
  return beta;
}

}  // namespace

TestVerdict bernstein_lp_test(const BernsteinTranslations& bt, const LpTestOptions& opts) {
  if (opts.grid_size < 2) throw ArgumentError("bernstein_lp_test: grid_size must be at least 2");
  if (bt.degree < 0 || bt.lambdas.size() != static_cast<std::size_t>(bt.degree) + 1)
    throw ArgumentError("bernstein_lp_test: translations do not match the degree");
  const int n = bt.degree;
  const Eigen::Index d = n + 1;
  const int G = opts.grid_size;

  TestVerdict v;
  double se_sum = 0.0;
  for (double se : bt.standard_errors) se_sum += se;
  v.tolerance = opts.tol + 3.0 * se_sum;

  if (opts.variant == LpVariant::AllGridPoints) {
    Eigen::MatrixXd rows((G - 1) * d, d);
    for (int g = 0; g + 1 < G; ++g) {
      const double a = static_cast<double>(g) / (G - 1);
      const double b = static_cast<double>(g + 1) / (G - 1);
      rows.middleRows(g * d, d) = bernstein_subdivision_matrix(n, a, b);
    }
    const LpSolution sol = solve_box_lp(bt.lambdas, rows);
    v.witnesses.push_back({"max Lambda(pi), pi >= 0 on [0,1], degree " + std::to_string(n),
                           sol.objective});
    v.certificate = beta_of(sol, d);
  } else {
    double best = -std::numeric_limits<double>::infinity();
    // Literal grid on (0,1]: q = 1/G, 2/G, ..., 1.
    for (int g = 1; g <= G; ++g) {
      const double q = static_cast<double>(g) / G;
      const std::vector<double> basis = bernstein_basis(n, q);
      Eigen::MatrixXd row(1, d);
      for (Eigen::Index k = 0; k < d; ++k) row(0, k) = basis[static_cast<std::size_t>(k)];
      const LpSolution sol = solve_box_lp(bt.lambdas, row);
      v.witnesses.push_back({"max Lambda(pi), pi(" + std::to_string(q) + ") >= 0", sol.objective});
      if (sol.objective > best) {
        best = sol.objective;
        v.certificate = beta_of(sol, d);
      }
    }
  }
  finish(v);
  return v;
}

EnumerationResult enumeration_test(const std::function<double(int)>& gamma, int max_degree,
                                   const Support& support, const LpTestOptions& opts,
                                   const std::function<double(int)>& gamma_se) {
  EnumerationResult out;
  for (int n = 1; n <= max_degree; ++n) {
    const BernsteinTranslations bt = bernstein_translations_from_gammas(gamma, n, support, gamma_se);
    out.verdict = bernstein_lp_test(bt, opts);
    out.objectives.push_back(out.verdict.worst_slack);
    if (out.verdict.rejected) {
      out.outcome = EnumerationResult::Outcome::Rejected;
      out.degree = n;
      break;
    }
  }
  return out;
}

}  // namespace mrt
