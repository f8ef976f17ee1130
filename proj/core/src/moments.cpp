#include "mrt/moments.hpp"

#include <bit>
#include <cmath>
#include <string>

#include "mrt/error.hpp"
#include "mrt/random.hpp"
#include "sampling.hpp"

namespace mrt {

UniformMoments uniform_moments(double a, double b) {
  if (a > b) throw ArgumentError("uniform_moments: a > b");
  return {(a + b) / 2.0, (a * a + a * b + b * b) / 3.0, (a + b) * (a * a + b * b) / 4.0};
}

double uniform_raw_moment(double a, double b, int j) {
  if (a > b) throw ArgumentError("uniform_raw_moment: a > b");
  if (j < 0) throw ArgumentError("uniform_raw_moment: negative order");
  if (j == 0) return 1.0;
  if (a == b) return std::pow(a, j);
  // (b^{j+1} - a^{j+1}) / ((j+1)(b-a)) = (1/(j+1)) sum_{i=0}^{j} a^i b^{j-i}
  double sum = 0.0;
  for (int i = 0; i <= j; ++i) sum += std::pow(a, i) * std::pow(b, j - i);
  return sum / static_cast<double>(j + 1);
}

std::uint64_t moment_seed(std::uint64_t master, const Budget& b, int order) {
  std::uint64_t h = derive_seed(master, {std::bit_cast<std::uint64_t>(b.income()),
                                         static_cast<std::uint64_t>(order)});
  for (Eigen::Index i = 0; i < b.prices().size(); ++i)
    h = derive_seed(h, {std::bit_cast<std::uint64_t>(b.prices()[i])});
  return h;
}

namespace {

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return r;
}

void check_order(int order, const char* who) {
  if (order < 1) throw ArgumentError(std::string(who) + ": order must be at least 1");
}

}  // namespace

double rc_mixed_expectation(const RandomCoefficientPopulation& pop, const Budget& b, int i, int j,
                            int m) {
  // q^m = sum_{r+s+t=m} m!/(r!s!t!) (-w_p p)^s (w_y y)^t
  const double p = b.price();
  const double y = b.income();
  double total = 0.0;
  for (int s = 0; s <= m; ++s) {
    for (int t = 0; s + t <= m; ++t) {
      const double coef = binomial(m, s) * binomial(m - s, t);
      total += coef * std::pow(-p, s) * std::pow(y, t) *
               uniform_raw_moment(pop.a_p(), pop.b_p(), i + s) *
               uniform_raw_moment(pop.a_y(), pop.b_y(), j + t);
    }
  }
  return total;
}

MomentSet rc_closed_form_moments(const RandomCoefficientPopulation& pop, const Budget& b,
                                 int order) {
  check_order(order, "rc_closed_form_moments");
  if (order > 3)
    throw UnsupportedError("rc_closed_form_moments: closed form covers orders <= 3; use "
                           "monte_carlo_moments for order " + std::to_string(order));
  MomentSet ms;
  ms.order = order;
  ms.budget = b;
  ms.source = MomentSource::ClosedForm;
  for (int n = 1; n <= order; ++n) {
    ms.M.push_back(rc_mixed_expectation(pop, b, 0, 0, n));
    // dq/dp = -w_p, dq/dy = w_y
    ms.dMdp.push_back(-n * rc_mixed_expectation(pop, b, 1, 0, n - 1));
    ms.dMdy.push_back(n * rc_mixed_expectation(pop, b, 0, 1, n - 1));
  }
  ms.M_se.assign(order, 0.0);
  ms.dMdp_se.assign(order, 0.0);
  ms.dMdy_se.assign(order, 0.0);
  ms.gamma_se.assign(order >= 2 ? order - 1 : 0, 0.0);
  return ms;
}

MomentSet monte_carlo_moments(const Sampler& s, const Budget& b, int order,
                              const MonteCarloOptions& opts) {
  check_order(order, "monte_carlo_moments");
  if (opts.draws == 0) throw ArgumentError("monte_carlo_moments: need at least one draw");
  if (s.goods() != 1 || b.goods() != 1)
    throw ArgumentError("monte_carlo_moments: two-good moments need a one-good sampler");

  const bool use_fd = opts.force_finite_difference || !s.has_derivatives();
  const double hp = opts.fd_relative_step * b.price();
  const double hy = opts.fd_relative_step * b.income();
  const Budget bp_hi = b.with_price(0, b.price() + hp);
  const Budget bp_lo = b.with_price(0, b.price() - hp);
  const Budget by_hi = b.with_income(b.income() + hy);
  const Budget by_lo = b.with_income(b.income() - hy);

  const std::size_t N = static_cast<std::size_t>(order);
  const std::size_t n_gamma = order >= 2 ? N - 1 : 0;
  // Layout: M_1..M_N | dMdp_1..N | dMdy_1..N | Gamma_0..Gamma_{N-2}
  const std::size_t width = 3 * N + n_gamma;

  auto per_draw = [&](std::uint64_t index, double* out) {
    const DemandDraw d = s.draw(b, opts.seed, index);
    const double q = d.quantity[0];
    double* M = out;
    double* Mp = out + N;
    double* My = out + 2 * N;
    double* G = out + 3 * N;
    if (!use_fd) {
      const double dqp = d.dq_dp(0, 0);
      const double dqy = d.dq_dy[0];
      double qn1 = 1.0;  // q^{n-1}
      for (std::size_t n = 1; n <= N; ++n) {
        M[n - 1] = qn1 * q;
        Mp[n - 1] = static_cast<double>(n) * qn1 * dqp;
        My[n - 1] = static_cast<double>(n) * qn1 * dqy;
        qn1 *= q;
      }
      double qn = 1.0;
      for (std::size_t n = 0; n < n_gamma; ++n) {
        G[n] = qn * (dqp + q * dqy);
        qn *= q;
      }
      return;
    }
    const double qph = s.draw(bp_hi, opts.seed, index).quantity[0];
    const double qpl = s.draw(bp_lo, opts.seed, index).quantity[0];
    const double qyh = s.draw(by_hi, opts.seed, index).quantity[0];
    const double qyl = s.draw(by_lo, opts.seed, index).quantity[0];
    for (std::size_t n = 1; n <= N; ++n) {
      const int e = static_cast<int>(n);
      M[n - 1] = std::pow(q, e);
      Mp[n - 1] = (std::pow(qph, e) - std::pow(qpl, e)) / (2.0 * hp);
      My[n - 1] = (std::pow(qyh, e) - std::pow(qyl, e)) / (2.0 * hy);
    }
    // Gamma_n = dM_{n+1}/dp / (n+1) + dM_{n+2}/dy / (n+2), per draw.
    for (std::size_t n = 0; n < n_gamma; ++n)
      G[n] = Mp[n] / static_cast<double>(n + 1) + My[n + 1] / static_cast<double>(n + 2);
  };

  const detail::SampleSummary sum = detail::summarize_draws(opts.draws, width, per_draw);

  MomentSet ms;
  ms.order = order;
  ms.budget = b;
  ms.source = use_fd ? MomentSource::FiniteDifference : MomentSource::MonteCarlo;
  ms.draws = opts.draws;
  ms.seed = opts.seed;
  ms.high_order = order > kDefaultMaxMomentOrder;
  auto slice = [&](const std::vector<double>& v, std::size_t off, std::size_t len) {
    return std::vector<double>(v.begin() + static_cast<std::ptrdiff_t>(off),
                               v.begin() + static_cast<std::ptrdiff_t>(off + len));
  };
  ms.M = slice(sum.mean, 0, N);
  ms.dMdp = slice(sum.mean, N, N);
  ms.dMdy = slice(sum.mean, 2 * N, N);
  ms.M_se = slice(sum.se, 0, N);
  ms.dMdp_se = slice(sum.se, N, N);
  ms.dMdy_se = slice(sum.se, 2 * N, N);
  ms.gamma_se = slice(sum.se, 3 * N, n_gamma);
  return ms;
}

MomentSet enumerated_moments(const Sampler& s, const Budget& b, int order) {
  check_order(order, "enumerated_moments");
  if (s.goods() != 1 || b.goods() != 1)
    throw ArgumentError("enumerated_moments: two-good moments need a one-good sampler");
  auto types = s.enumerate(b);
  if (!types) throw ArgumentError("enumerated_moments: sampler is not a finite population");
  MomentSet ms;
  ms.order = order;
  ms.budget = b;
  ms.source = MomentSource::ClosedForm;
  ms.M.assign(order, 0.0);
  ms.dMdp.assign(order, 0.0);
  ms.dMdy.assign(order, 0.0);
  for (const WeightedDraw& t : *types) {
    const double q = t.draw.quantity[0];
    for (int n = 1; n <= order; ++n) {
      const double qn1 = std::pow(q, n - 1);
      ms.M[n - 1] += t.weight * qn1 * q;
      ms.dMdp[n - 1] += t.weight * n * qn1 * t.draw.dq_dp(0, 0);
      ms.dMdy[n - 1] += t.weight * n * qn1 * t.draw.dq_dy[0];
    }
  }
  ms.M_se.assign(order, 0.0);
  ms.dMdp_se.assign(order, 0.0);
  ms.dMdy_se.assign(order, 0.0);
  ms.gamma_se.assign(order >= 2 ? order - 1 : 0, 0.0);
  ms.high_order = order > kDefaultMaxMomentOrder;
  return ms;
}

double monomial_translation(const MomentSet& ms, int n) {
  if (n < 0) throw ArgumentError("monomial_translation: n must be nonnegative");
  if (ms.order < n + 2)
    throw ArgumentError("monomial_translation: Gamma_" + std::to_string(n) + " needs moments up to " +
                        std::to_string(n + 2) + ", have " + std::to_string(ms.order));
  return ms.moment_dp(n + 1) / static_cast<double>(n + 1) +
         ms.moment_dy(n + 2) / static_cast<double>(n + 2);
}

TranslationSet translations(const MomentSet& ms) {
  TranslationSet t;
  for (int n = 0; n + 2 <= ms.order; ++n) {
    t.gammas.push_back(monomial_translation(ms, n));
    t.standard_errors.push_back(static_cast<std::size_t>(n) < ms.gamma_se.size()
                                    ? ms.gamma_se[static_cast<std::size_t>(n)]
                                    : 0.0);
  }
  return t;
}

double polynomial_translation(const TranslationSet& gammas, std::span<const double> coeffs) {
  if (coeffs.size() > gammas.size())
    throw ArgumentError("polynomial_translation: " + std::to_string(coeffs.size()) +
                        " coefficients but only " + std::to_string(gammas.size()) +
                        " translations");
  double total = 0.0;
  for (std::size_t i = 0; i < coeffs.size(); ++i) total += coeffs[i] * gammas.gammas[i];
  return total;
}

std::vector<int> moment_sequence_violations(const MomentSet& ms, double rel_tol) {
  std::vector<int> bad;
  auto M = [&](int n) { return n == 0 ? 1.0 : ms.moment(n); };
  for (int n = 0; n + 2 <= ms.order; ++n) {
    const double lhs = M(n) * M(n + 2);
    const double rhs = M(n + 1) * M(n + 1);
    if (lhs < rhs - rel_tol * std::abs(rhs)) bad.push_back(n);
  }
  return bad;
}

}  // namespace mrt
