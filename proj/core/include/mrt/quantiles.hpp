#pragma once

#include <cstdint>
#include <vector>

#include "mrt/population.hpp"

namespace mrt {

/// A closed-form value together with whether the linear formula is exact there.
struct FlaggedValue {
  double value;
  bool exact;
};

/// Linear CDF of the random-coefficient model obtained by averaging over w_p
/// without clipping: (q - a_y y + (a_p + b_p) p / 2 - 1) / ((b_y - a_y) y), clamped to
/// [0,1]. `exact` is true where no w_p clipping occurs, i.e. a_y <= (q + a_p p - 1)/y
/// and (q + b_p p - 1)/y <= b_y. A degenerate w_y support falls back to the exact law.
FlaggedValue rc_cdf(const RandomCoefficientPopulation& pop, const Budget& b, double q);

/// True CDF P(1 - w_p p + w_y y <= q), piecewise quadratic in q.
double rc_cdf_exact(const RandomCoefficientPopulation& pop, const Budget& b, double q);

/// Q(tau) = ((1 - tau) a_y + tau b_y) y - (a_p + b_p) p / 2 + 1, tau in (0,1).
FlaggedValue rc_quantile(const RandomCoefficientPopulation& pop, const Budget& b, double tau);

/// dQ/dp + (dQ/dy) Q; rationality requires <= 0 at every tau.
double quantile_restriction(double Q, double dQdp, double dQdy);

/// tau -> Q(tau | p, y) with price and income derivatives.
class QuantileFn {
 public:
  static QuantileFn closed_form(const RandomCoefficientPopulation& pop, const Budget& b);

  /// Table from a sample at b and its common-random-number shifts. Derivatives
  /// are averaged over a rank window of half-width bandwidth * n.
  static QuantileFn empirical(std::vector<double> sorted_q, std::vector<double> dq_dp,
                              std::vector<double> dq_dy, double bandwidth);

  bool is_closed_form() const noexcept { return closed_; }

  double quantile(double tau) const;
  double dq_dp(double tau) const;
  double dq_dy(double tau) const;
  double restriction(double tau) const;
  /// Closed form: the exactness flag; empirical: always true.
  bool exact(double tau) const;

  /// Sorted sample (empirical only).
  const std::vector<double>& table() const noexcept { return q_; }

 private:
  QuantileFn() = default;
  double interpolate(const std::vector<double>& v, double tau) const;

  bool closed_ = false;
  RandomCoefficientPopulation pop_{0, 0, 0, 0};
  Budget budget_ = Budget::two_good(1.0, 1.0);
  std::vector<double> q_, dp_, dy_;
};

/// Empirical quantile function of s at b from n_draws draws of stream seed.
/// Derivatives use central differences with h = 1e-4 p and 1e-4 y.
QuantileFn empirical_quantile_fn(const Sampler& s, const Budget& b, std::uint64_t n_draws,
                                 std::uint64_t seed, double bandwidth = 0.005);

struct IdentityCheck {
  double gamma_direct = 0.0;
  double gamma_via_quantiles = 0.0;
  double abs_diff = 0.0;
  /// Combined Monte Carlo, quadrature and smoothing error scale (empirical path);
  /// the identity is taken to hold when abs_diff < 3 * error_bound.
  double error_bound = 0.0;
};

/// Gamma_n from moments against the trapezoid rule for the integral of
/// R_Q(tau) Q(tau)^n on tau_i = (i + 1/2)/m over the empirical quantile function.
IdentityCheck weighting_identity_check(const Sampler& s, const Budget& b, int n,
                                       std::uint64_t n_draws, std::size_t quad_points,
                                       std::uint64_t seed, double bandwidth = 0.005);

/// Exact Gamma_n of the random-coefficient model against the integral over the
/// closed-form quantile function (Gauss-Legendre, exact for the polynomial integrand).
IdentityCheck weighting_identity_closed_form(const RandomCoefficientPopulation& pop,
                                             const Budget& b, int n);

/// Exact Gamma_n = E[q^n (dq/dp + q dq/dy)] for the random-coefficient model, any n.
double rc_gamma_exact(const RandomCoefficientPopulation& pop, const Budget& b, int n);

}  // namespace mrt
