#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "mrt/population.hpp"

namespace mrt {

/// Non-central moments E[w], E[w^2], E[w^3] of w ~ U[a, b].
struct UniformMoments {
  double mu;
  double m2;
  double m3;
};

UniformMoments uniform_moments(double a, double b);

/// E[w^j] for w ~ U[a, b] (point mass when a == b).
double uniform_raw_moment(double a, double b, int j);

enum class MomentSource { ClosedForm, MonteCarlo, FiniteDifference };

/// Default cap on the moment order; higher orders are allowed but flagged.
inline constexpr int kDefaultMaxMomentOrder = 6;

/// Conditional moments M_1..M_N of two-good demand at a budget and their price
/// and income derivatives. Vectors are indexed by n - 1.
struct MomentSet {
  int order = 0;
  Budget budget = Budget::two_good(1.0, 1.0);
  std::vector<double> M;
  std::vector<double> dMdp;
  std::vector<double> dMdy;
  MomentSource source = MomentSource::ClosedForm;
  std::uint64_t draws = 0;
  std::uint64_t seed = 0;

  /// Standard errors of the Monte Carlo estimates; zero for exact sources.
  std::vector<double> M_se;
  std::vector<double> dMdp_se;
  std::vector<double> dMdy_se;
  /// Standard errors of Gamma_0..Gamma_{N-2}, from the per-draw translation terms.
  std::vector<double> gamma_se;

  /// Set when order exceeds kDefaultMaxMomentOrder.
  bool high_order = false;

  double moment(int n) const { return M.at(static_cast<std::size_t>(n - 1)); }
  double moment_dp(int n) const { return dMdp.at(static_cast<std::size_t>(n - 1)); }
  double moment_dy(int n) const { return dMdy.at(static_cast<std::size_t>(n - 1)); }
};

/// Gamma_0..Gamma_{N-2} at one budget.
struct TranslationSet {
  std::vector<double> gammas;
  std::vector<double> standard_errors;

  std::size_t size() const noexcept { return gammas.size(); }
  double operator[](std::size_t n) const { return gammas.at(n); }
};

/// Seed for the Monte Carlo stream of one (budget, order) cell of a sweep.
std::uint64_t moment_seed(std::uint64_t master, const Budget& b, int order);

/// Exact M_n and derivatives (n <= 3) for the random-coefficient model, using
/// independence of the price and income coefficients.
MomentSet rc_closed_form_moments(const RandomCoefficientPopulation& pop, const Budget& b,
                                 int order);

/// E[w_p^i w_y^j q^m] for the random-coefficient model at b.
double rc_mixed_expectation(const RandomCoefficientPopulation& pop, const Budget& b, int i, int j,
                            int m);

struct MonteCarloOptions {
  std::uint64_t draws = 100000;
  std::uint64_t seed = 0;
  /// Relative central-difference step used when the sampler has no derivatives.
  double fd_relative_step = 1e-4;
  /// Forces the finite-difference path even when derivatives are available.
  bool force_finite_difference = false;
};

/// Sample moments over draws of the sampler. Derivatives use per-type exact
/// derivatives when available, otherwise central differences of each draw's
/// demand at b +- h (common random numbers).
MomentSet monte_carlo_moments(const Sampler& s, const Budget& b, int order,
                              const MonteCarloOptions& opts);

/// Exact moments of a finite population (Sampler::enumerate must succeed).
MomentSet enumerated_moments(const Sampler& s, const Budget& b, int order);

/// Gamma_n = dM_{n+1}/dp / (n+1) + dM_{n+2}/dy / (n+2).
double monomial_translation(const MomentSet& ms, int n);

/// All monomial translations available from ms, with standard errors.
TranslationSet translations(const MomentSet& ms);

/// sum_i coeffs[i] * Gamma_i.
double polynomial_translation(const TranslationSet& gammas, std::span<const double> coeffs);

/// Indices n (with M_0 = 1) where M_n M_{n+2} < M_{n+1}^2 beyond rounding. A
/// positive random variable has none; this is a sanity diagnostic only.
std::vector<int> moment_sequence_violations(const MomentSet& ms, double rel_tol = 1e-12);

}  // namespace mrt
