#include "mrt/quantiles.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mrt/error.hpp"
#include "mrt/moments.hpp"
#include "mrt/parallel.hpp"
#include "mrt/quadrature.hpp"

namespace mrt {

namespace {

void check_tau(double tau, const char* who) {
  if (!(tau > 0.0 && tau < 1.0)) throw ArgumentError(std::string(who) + ": tau must lie in (0,1)");
}

bool linear_branch_exact(const RandomCoefficientPopulation& pop, double p, double y, double q) {
  return pop.a_y() <= (q + pop.a_p() * p - 1.0) / y && (q + pop.b_p() * p - 1.0) / y <= pop.b_y();
}

}  // namespace

FlaggedValue rc_cdf(const RandomCoefficientPopulation& pop, const Budget& b, double q) {
  const double p = b.price();
  const double y = b.income();
  const SupportBounds s = rc_support_bounds(pop, b);
  if (q < s.q_min) return {0.0, true};
  if (q >= s.q_max) return {1.0, true};
  if (pop.b_y() == pop.a_y()) return {rc_cdf_exact(pop, b, q), true};
  const double mu_p = 0.5 * (pop.a_p() + pop.b_p());
  const double lin = (q - pop.a_y() * y + mu_p * p - 1.0) / ((pop.b_y() - pop.a_y()) * y);
  return {std::clamp(lin, 0.0, 1.0), linear_branch_exact(pop, p, y, q)};
}

double rc_cdf_exact(const RandomCoefficientPopulation& pop, const Budget& b, double q) {
  const double p = b.price();
  const double y = b.income();
  // F(q) = E_{w_p}[ P(w_y <= (q - 1 + w_p p)/y) ]; the inner probability is a
  // clamped linear function of w_p, so split at its kinks and integrate exactly.
  auto inner = [&](double wp) {
    const double t = (q - 1.0 + wp * p) / y;
    if (pop.b_y() == pop.a_y()) return t >= pop.a_y() ? 1.0 : 0.0;
    return std::clamp((t - pop.a_y()) / (pop.b_y() - pop.a_y()), 0.0, 1.0);
  };
  if (pop.a_p() == pop.b_p()) return inner(pop.a_p());
  std::vector<double> cuts = {pop.a_p(), pop.b_p()};
  for (double w : {pop.a_y(), pop.b_y()}) {
    const double k = (w * y + 1.0 - q) / p;
    if (k > pop.a_p() && k < pop.b_p()) cuts.push_back(k);
  }
  std::sort(cuts.begin(), cuts.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    total += integrate_gauss_legendre(inner, cuts[i], cuts[i + 1], 2);
  return std::clamp(total / (pop.b_p() - pop.a_p()), 0.0, 1.0);
}

FlaggedValue rc_quantile(const RandomCoefficientPopulation& pop, const Budget& b, double tau) {
  check_tau(tau, "rc_quantile");
  const double p = b.price();
  const double y = b.income();
  const double w = (1.0 - tau) * pop.a_y() + tau * pop.b_y();
  const double q = w * y - 0.5 * (pop.a_p() + pop.b_p()) * p + 1.0;
  return {q, pop.a_p() == pop.b_p() || linear_branch_exact(pop, p, y, q)};
}

double quantile_restriction(double Q, double dQdp, double dQdy) { return dQdp + dQdy * Q; }

QuantileFn QuantileFn::closed_form(const RandomCoefficientPopulation& pop, const Budget& b) {
  if (b.goods() != 1) throw ArgumentError("QuantileFn::closed_form: two-good budgets only");
  QuantileFn f;
  f.closed_ = true;
  f.pop_ = pop;
  f.budget_ = b;
  return f;
}

QuantileFn QuantileFn::empirical(std::vector<double> sorted_q, std::vector<double> dq_dp,
                                 std::vector<double> dq_dy, double bandwidth) {
  const std::size_t n = sorted_q.size();
  if (n < 2 || dq_dp.size() != n || dq_dy.size() != n)
    throw ArgumentError("QuantileFn::empirical: tables must share a length of at least 2");
  if (!(bandwidth >= 0.0 && bandwidth < 0.5))
    throw ArgumentError("QuantileFn::empirical: bandwidth must lie in [0, 0.5)");
  if (!std::is_sorted(sorted_q.begin(), sorted_q.end()))
    throw ArgumentError("QuantileFn::empirical: quantile table must be sorted");
  const std::size_t half = static_cast<std::size_t>(bandwidth * static_cast<double>(n));
  auto smooth = [&](std::vector<double>& v) {
    if (half == 0) return;
    std::vector<double> prefix(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + v[i];
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t lo = i >= half ? i - half : 0;
      const std::size_t hi = std::min(n, i + half + 1);
      v[i] = (prefix[hi] - prefix[lo]) / static_cast<double>(hi - lo);
    }
  };
  smooth(dq_dp);
  smooth(dq_dy);
  QuantileFn f;
  f.q_ = std::move(sorted_q);
  f.dp_ = std::move(dq_dp);
  f.dy_ = std::move(dq_dy);
  return f;
}

double QuantileFn::interpolate(const std::vector<double>& v, double tau) const {
  // Rank r sits at tau = (r + 1/2)/n.
  const double pos = tau * static_cast<double>(v.size()) - 0.5;
  if (pos <= 0.0) return v.front();
  const double last = static_cast<double>(v.size() - 1);
  if (pos >= last) return v.back();
  const std::size_t i = static_cast<std::size_t>(pos);
  const double f = pos - static_cast<double>(i);
  return (1.0 - f) * v[i] + f * v[i + 1];
}

double QuantileFn::quantile(double tau) const {
  check_tau(tau, "QuantileFn::quantile");
  if (closed_) return rc_quantile(pop_, budget_, tau).value;
  return interpolate(q_, tau);
}

double QuantileFn::dq_dp(double tau) const {
  check_tau(tau, "QuantileFn::dq_dp");
  if (closed_) return -0.5 * (pop_.a_p() + pop_.b_p());
  return interpolate(dp_, tau);
}

double QuantileFn::dq_dy(double tau) const {
  check_tau(tau, "QuantileFn::dq_dy");
  if (closed_) return (1.0 - tau) * pop_.a_y() + tau * pop_.b_y();
  return interpolate(dy_, tau);
}

double QuantileFn::restriction(double tau) const {
  return quantile_restriction(quantile(tau), dq_dp(tau), dq_dy(tau));
}

bool QuantileFn::exact(double tau) const {
  check_tau(tau, "QuantileFn::exact");
  return closed_ ? rc_quantile(pop_, budget_, tau).exact : true;
}

namespace {

std::vector<double> sorted_sample(const Sampler& s, const Budget& b, std::uint64_t n,
                                  std::uint64_t seed) {
  std::vector<double> q(n);
  const std::size_t chunks = (n + kReductionChunk - 1) / kReductionChunk;
  parallel_for(chunks, [&](std::size_t c) {
    const std::uint64_t lo = c * kReductionChunk;
    const std::uint64_t hi = std::min<std::uint64_t>(n, lo + kReductionChunk);
    for (std::uint64_t i = lo; i < hi; ++i) q[i] = s.draw(b, seed, i).quantity[0];
  });
  std::sort(q.begin(), q.end());
  return q;
}

}  // namespace

QuantileFn empirical_quantile_fn(const Sampler& s, const Budget& b, std::uint64_t n_draws,
                                 std::uint64_t seed, double bandwidth) {
  if (n_draws < 100) throw ArgumentError("empirical_quantile_fn: need at least 100 draws");
  if (s.goods() != 1 || b.goods() != 1)
    throw ArgumentError("empirical_quantile_fn: needs a one-good sampler");
  const double hp = 1e-4 * b.price();
  const double hy = 1e-4 * b.income();
  std::vector<double> q = sorted_sample(s, b, n_draws, seed);
  const std::vector<double> qph = sorted_sample(s, b.with_price(0, b.price() + hp), n_draws, seed);
  const std::vector<double> qpl = sorted_sample(s, b.with_price(0, b.price() - hp), n_draws, seed);
  const std::vector<double> qyh = sorted_sample(s, b.with_income(b.income() + hy), n_draws, seed);
  const std::vector<double> qyl = sorted_sample(s, b.with_income(b.income() - hy), n_draws, seed);
  std::vector<double> dp(n_draws), dy(n_draws);
  for (std::size_t r = 0; r < n_draws; ++r) {
    dp[r] = (qph[r] - qpl[r]) / (2.0 * hp);
    dy[r] = (qyh[r] - qyl[r]) / (2.0 * hy);
  }
  return QuantileFn::empirical(std::move(q), std::move(dp), std::move(dy), bandwidth);
}

namespace {

double trapezoid_identity(const QuantileFn& f, int n, std::size_t m) {
  // Trapezoid rule on tau_i = (i + 1/2)/m, extended by the end values over the
  // two half cells next to 0 and 1. The weights then collapse to 1/m each.
  double total = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double tau = (static_cast<double>(i) + 0.5) / static_cast<double>(m);
    total += f.restriction(tau) * std::pow(f.quantile(tau), n);
  }
  return total / static_cast<double>(m);
}

}  // namespace

IdentityCheck weighting_identity_check(const Sampler& s, const Budget& b, int n,
                                       std::uint64_t n_draws, std::size_t quad_points,
                                       std::uint64_t seed, double bandwidth) {
  if (n < 0) throw ArgumentError("weighting_identity_check: n must be nonnegative");
  if (quad_points < 2) throw ArgumentError("weighting_identity_check: need at least 2 nodes");
  MonteCarloOptions mc;
  mc.draws = n_draws;
  mc.seed = seed;
  const MomentSet ms = monte_carlo_moments(s, b, n + 2, mc);
  const TranslationSet t = translations(ms);

  const QuantileFn f = empirical_quantile_fn(s, b, n_draws, seed, bandwidth);
  const QuantileFn f_half = empirical_quantile_fn(s, b, n_draws, seed, bandwidth / 2.0);
  IdentityCheck out;
  out.gamma_direct = t.gammas[static_cast<std::size_t>(n)];
  out.gamma_via_quantiles = trapezoid_identity(f, n, quad_points);
  out.abs_diff = std::abs(out.gamma_direct - out.gamma_via_quantiles);
  const double quad_err = std::abs(out.gamma_via_quantiles - trapezoid_identity(f, n, 2 * quad_points));
  const double smooth_err =
      std::abs(out.gamma_via_quantiles - trapezoid_identity(f_half, n, quad_points));
  out.error_bound = t.standard_errors[static_cast<std::size_t>(n)] + quad_err + smooth_err;
  return out;
}

double rc_gamma_exact(const RandomCoefficientPopulation& pop, const Budget& b, int n) {
  if (n < 0) throw ArgumentError("rc_gamma_exact: n must be nonnegative");
  // q^n (-w_p + w_y q)
  return -rc_mixed_expectation(pop, b, 1, 0, n) + rc_mixed_expectation(pop, b, 0, 1, n + 1);
}

IdentityCheck weighting_identity_closed_form(const RandomCoefficientPopulation& pop,
                                             const Budget& b, int n) {
  if (n < 0) throw ArgumentError("weighting_identity_closed_form: n must be nonnegative");
  const QuantileFn f = QuantileFn::closed_form(pop, b);
  // The integrand is a polynomial of degree n + 2 in tau.
  const std::size_t pts = static_cast<std::size_t>(n) / 2 + 3;
  IdentityCheck out;
  out.gamma_direct = rc_gamma_exact(pop, b, n);
  out.gamma_via_quantiles = integrate_gauss_legendre(
      [&](double tau) { return f.restriction(tau) * std::pow(f.quantile(tau), n); }, 0.0, 1.0, pts);
  out.abs_diff = std::abs(out.gamma_direct - out.gamma_via_quantiles);
  return out;
}

}  // namespace mrt
