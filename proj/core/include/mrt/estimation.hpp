#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mrt/population.hpp"

namespace mrt {

/// Observations (p_i, y_i, q_i) of a two-good cross-section.
struct CrossSection {
  std::vector<double> p;
  std::vector<double> y;
  std::vector<double> q;

  std::size_t size() const noexcept { return q.size(); }
  void add(double p_, double y_, double q_);
  /// Throws ArgumentError naming the first offending row (1-based).
  void validate() const;
};

/// Reads a headered `p,y,q` CSV. Malformed or non-positive rows raise IoError
/// with the line number.
CrossSection read_cross_section(const std::string& path);
void write_cross_section(const std::string& path, const CrossSection& data);

/// Budgets drawn uniformly from [p_lo, p_hi] x [y_lo, y_hi].
struct BudgetLaw {
  double p_lo = 0.1;
  double p_hi = 1.0;
  double y_lo = 1.0;
  double y_hi = 2.0;
};

/// n rows with budgets from the law, demand from the sampler and additive
/// N(0, noise_sd^2) noise. Noise that would make q non-positive is redrawn.
CrossSection generate_cross_section(const Sampler& s, const BudgetLaw& law, std::size_t n,
                                    double noise_sd, std::uint64_t seed);

enum class Kernel { Gaussian, Epanechnikov };

struct Bandwidth {
  double h_p;
  double h_y;

  Bandwidth(double h) : h_p(h), h_y(h) {}  // NOLINT(google-explicit-constructor)
  Bandwidth(double hp, double hy) : h_p(hp), h_y(hy) {}
};

/// 1.06 sd n^{-1/5} per coordinate. Throws ComputationError on a constant column.
Bandwidth silverman_bandwidth(const CrossSection& data);

struct SlopeEstimate {
  std::vector<int> orders;
  std::vector<double> alpha;
  std::vector<double> beta_p;
  std::vector<double> beta_y;
  /// Covariance of stacked() across bootstrap replicates; empty until computed.
  Matrix V;
  Budget budget = Budget::two_good(1.0, 1.0);
  Bandwidth bandwidth{0.0};

  /// (beta_p[0], beta_y[0], beta_p[1], beta_y[1], ...).
  Vector stacked() const;
};

/// Weighted least squares of q^n on (1, p - p0, y - y0) with product-kernel weights.
SlopeEstimate local_linear_moments(const CrossSection& data, const Budget& b,
                                   const std::vector<int>& orders, const Bandwidth& bw,
                                   Kernel kernel = Kernel::Gaussian);

/// Pairs bootstrap covariance of the stacked slopes. Replicates with a singular
/// design are redrawn up to 20 times each.
Matrix bootstrap_covariance(const CrossSection& data, const Budget& b,
                            const std::vector<int>& orders, const Bandwidth& bw, Kernel kernel,
                            std::size_t n_boot, std::uint64_t seed);

/// Rows of the B0 inequalities G beta <= 0 over the stacked slopes: one per n
/// with orders n+1 and n+2 present, (1/(n+1)) b_{(n+1)p} + (1/(n+2)) b_{(n+2)y} <= 0.
Matrix b0_constraints(const std::vector<int>& orders);

/// argmin over B0 of (beta - b)'(tau2 I + V)^{-1}(beta - b). A ridge of 1e-10 is
/// added when tau2 I + V is singular.
Vector project_onto_B0(const Vector& beta, const Matrix& V, double tau2,
                       const std::vector<int>& orders);

/// beta_0 + (I + V / tau2)^{-1} (beta - beta_0); beta_0 at tau2 = 0.
Vector eb_combine(const Vector& beta, const Vector& beta0, const Matrix& V, double tau2);

/// beta_EB as a function of the unconstrained estimate.
Vector eb_estimator(const Vector& beta, const Matrix& V, double tau2,
                    const std::vector<int>& orders);

struct SurePoint {
  double tau2;
  double sure;
};

/// 25 log-spaced points over [1e-4, 1e4] * trace(V)/dim.
std::vector<double> default_tau2_grid(const Matrix& V);

/// Stein's unbiased estimate of E|beta_EB - beta_true|^2 at one tau2:
/// |beta - beta_EB|^2 + 2 tr(d beta_EB / d beta V) - tr V, with the Jacobian by
/// central differences (step 1e-6 (1 + |beta_i|)).
double sure_value(const Vector& beta, const Matrix& V, double tau2, const std::vector<int>& orders);

struct SureSelection {
  double tau2 = 0.0;
  std::vector<SurePoint> curve;
};

/// Minimizes SURE over the grid; ties go to the largest tau2.
SureSelection sure_select_tau(const Vector& beta, const Matrix& V,
                              const std::vector<double>& tau2_grid,
                              const std::vector<int>& orders);

struct ShrinkageResult {
  SlopeEstimate slopes;
  Vector beta_hat;
  Vector beta_0;
  double tau2 = 0.0;
  Vector beta_eb;
  std::vector<SurePoint> sure_curve;
};

struct EbOptions {
  std::vector<int> orders = {1, 2, 3};
  std::optional<Bandwidth> bandwidth;
  Kernel kernel = Kernel::Gaussian;
  std::size_t n_boot = 200;
  std::vector<double> tau2_grid;  ///< empty: default_tau2_grid(V)
  std::uint64_t seed = 0;
};

ShrinkageResult eb_estimate(const CrossSection& data, const Budget& b, const EbOptions& opts);

}  // namespace mrt
