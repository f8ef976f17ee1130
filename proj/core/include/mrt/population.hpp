#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace mrt {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Prices of the k modeled goods plus income. The numeraire good is implicit.
class Budget {
 public:
  Budget(Vector prices, double income);

  /// Budget with a single modeled good (the two-good case).
  static Budget two_good(double price, double income);

  const Vector& prices() const noexcept { return prices_; }
  double income() const noexcept { return income_; }
  std::size_t goods() const noexcept { return static_cast<std::size_t>(prices_.size()); }

  /// Price of the single modeled good; throws unless goods() == 1.
  double price() const;

  Budget with_price(std::size_t good, double price) const;
  Budget with_income(double income) const;

 private:
  Vector prices_;
  double income_;
};

/// Demand of one consumer type at a budget together with its exact derivatives.
struct DemandDraw {
  Vector quantity;  ///< q
  Matrix dq_dp;     ///< (i, j) = dq_i / dp_j
  Vector dq_dy;     ///< dq_i / dy

  /// Individual Slutsky matrix dq/dp + (dq/dy) q^T.
  Matrix slutsky() const { return dq_dp + dq_dy * quantity.transpose(); }

  /// Two-good Slutsky term dq/dp + q dq/dy.
  double slutsky_scalar() const { return dq_dp(0, 0) + quantity[0] * dq_dy[0]; }
};

struct WeightedDraw {
  double weight;
  DemandDraw draw;
};

/// Source of consumer types. The type behind draw `index` of stream `seed` is a
/// pure function of (seed, index); only its demand depends on the budget. Two
/// calls at nearby budgets with the same (seed, index) therefore share common
/// random numbers.
class Sampler {
 public:
  virtual ~Sampler() = default;

  /// Number of modeled goods k.
  virtual std::size_t goods() const = 0;

  virtual DemandDraw draw(const Budget& b, std::uint64_t seed, std::uint64_t index) const = 0;

  /// False when dq_dp / dq_dy of the draws are not meaningful and callers must
  /// fall back to finite differences.
  virtual bool has_derivatives() const { return true; }

  /// All types with their probabilities, for finite populations.
  virtual std::optional<std::vector<WeightedDraw>> enumerate(const Budget& b) const;
};

using SamplerPtr = std::shared_ptr<const Sampler>;

// ---------------------------------------------------------------------------
// Random-coefficient model  q = 1 - w_p p + w_y y,  w_p ~ U[a_p,b_p], w_y ~ U[a_y,b_y]
// ---------------------------------------------------------------------------

class RandomCoefficientPopulation {
 public:
  RandomCoefficientPopulation(double a_p, double b_p, double a_y, double b_y);

  /// Supports [1/3, 1] x [1/3, 2/3] used in the reference experiment.
  static RandomCoefficientPopulation reference();

  double a_p() const noexcept { return a_p_; }
  double b_p() const noexcept { return b_p_; }
  double a_y() const noexcept { return a_y_; }
  double b_y() const noexcept { return b_y_; }

  bool contains(double omega_p, double omega_y) const noexcept;

 private:
  double a_p_, b_p_, a_y_, b_y_;
};

struct SupportBounds {
  double q_min;
  double q_max;
  /// False when the population admits non-positive demand at this budget.
  bool positive;
};

double rc_demand(const RandomCoefficientPopulation& pop, double omega_p, double omega_y,
                 const Budget& b);

SupportBounds rc_support_bounds(const RandomCoefficientPopulation& pop, const Budget& b);

/// -w_p + w_y q; the consumer is rational at b iff the value is <= 0.
double rc_slutsky_statistic(const RandomCoefficientPopulation& pop, double omega_p,
                            double omega_y, const Budget& b);

struct AnalyticQuadrature {
  std::size_t points = 64;
};

struct MonteCarloShare {
  std::uint64_t draws = 0;
  std::uint64_t seed = 0;
};

using ShareMethod = std::variant<AnalyticQuadrature, MonteCarloShare>;

/// Probability that a randomly drawn consumer violates the Slutsky inequality at b.
double rc_irrational_share(const RandomCoefficientPopulation& pop, const Budget& b,
                           const ShareMethod& method = AnalyticQuadrature{});

/// Smallest q_min over the budget box [p_lo,p_hi] x [y_lo,y_hi] (attained at a corner).
double rc_min_demand_on_box(const RandomCoefficientPopulation& pop, double p_lo, double p_hi,
                            double y_lo, double y_hi);

class RandomCoefficientSampler final : public Sampler {
 public:
  explicit RandomCoefficientSampler(RandomCoefficientPopulation pop) : pop_(pop) {}

  std::size_t goods() const override { return 1; }
  DemandDraw draw(const Budget& b, std::uint64_t seed, std::uint64_t index) const override;

  const RandomCoefficientPopulation& population() const noexcept { return pop_; }

 private:
  RandomCoefficientPopulation pop_;
};

// ---------------------------------------------------------------------------
// Reference rational populations
// ---------------------------------------------------------------------------

/// Single Cobb-Douglas type: q_i = alpha_i y / p_i with alpha_i > 0, sum alpha_i < 1.
class CobbDouglasSampler final : public Sampler {
 public:
  explicit CobbDouglasSampler(Vector shares);

  std::size_t goods() const override { return static_cast<std::size_t>(shares_.size()); }
  DemandDraw draw(const Budget& b, std::uint64_t seed, std::uint64_t index) const override;
  std::optional<std::vector<WeightedDraw>> enumerate(const Budget& b) const override;

  const Vector& shares() const noexcept { return shares_; }

 private:
  Vector shares_;
};

/// Finite mixture of Cobb-Douglas types with the given probabilities.
class CobbDouglasMixtureSampler final : public Sampler {
 public:
  CobbDouglasMixtureSampler(std::vector<Vector> shares, std::vector<double> weights);

  std::size_t goods() const override;
  DemandDraw draw(const Budget& b, std::uint64_t seed, std::uint64_t index) const override;
  std::optional<std::vector<WeightedDraw>> enumerate(const Budget& b) const override;

  const std::vector<Vector>& shares() const noexcept { return shares_; }
  const std::vector<double>& weights() const noexcept { return weights_; }

  /// E[alpha_i], E[alpha_i alpha_j] over the mixture.
  Vector mean_shares() const;
  Matrix second_moment_shares() const;

 private:
  std::vector<Vector> shares_;
  std::vector<double> weights_;
  std::vector<double> cumulative_;
};

DemandDraw cobb_douglas_demand(const Vector& shares, const Budget& b);

std::shared_ptr<CobbDouglasSampler> cobb_douglas_sampler(double alpha);
std::shared_ptr<CobbDouglasMixtureSampler> cobb_douglas_mixture_sampler(
    std::vector<Vector> shares, std::vector<double> weights);

/// Type-specific intercept d(p) of a Gorman population q = c y + d(p).
class GormanIntercept {
 public:
  virtual ~GormanIntercept() = default;
  /// Number of U(0,1) variates that identify a type.
  virtual std::size_t type_dimension() const = 0;
  /// Writes d(p) and its Jacobian for the type encoded by `u`.
  virtual void evaluate(const double* u, const Vector& prices, Vector& d, Matrix& dd_dp) const = 0;
};

/// d == 0 for every type.
class ZeroIntercept final : public GormanIntercept {
 public:
  explicit ZeroIntercept(std::size_t goods) : goods_(goods) {}
  std::size_t type_dimension() const override { return 0; }
  void evaluate(const double* u, const Vector& prices, Vector& d, Matrix& dd_dp) const override;

 private:
  std::size_t goods_;
};

/// Gorman polar form with expenditure e(p,u) = a(p) + exp(c'p) u and
/// a(p) = s + g'p - kappa/2 |p|^2. Demand is q = g - kappa p + c (y - a(p)),
/// so d = g - kappa p - c a(p). Types draw s ~ U[s_lo, s_hi] and each g_i ~ U[g_lo, g_hi].
/// The Slutsky matrix is -kappa I + c c' (y - a(p)); rationality holds where
/// kappa >= |c|^2 (y - a(p)).
class PolarFormIntercept final : public GormanIntercept {
 public:
  PolarFormIntercept(Vector common_slope, double kappa, double g_lo, double g_hi, double s_lo,
                     double s_hi);
  std::size_t type_dimension() const override;
  void evaluate(const double* u, const Vector& prices, Vector& d, Matrix& dd_dp) const override;

 private:
  Vector c_;
  double kappa_, g_lo_, g_hi_, s_lo_, s_hi_;
};

/// q^w = c y + d^w(p) with an income slope c shared by all types.
class GormanSampler final : public Sampler {
 public:
  GormanSampler(Vector common_slope, std::shared_ptr<const GormanIntercept> intercept);

  std::size_t goods() const override { return static_cast<std::size_t>(c_.size()); }
  DemandDraw draw(const Budget& b, std::uint64_t seed, std::uint64_t index) const override;

  const Vector& common_slope() const noexcept { return c_; }

 private:
  Vector c_;
  std::shared_ptr<const GormanIntercept> intercept_;
};

std::shared_ptr<GormanSampler> gorman_sampler(Vector common_slope,
                                              std::shared_ptr<const GormanIntercept> intercept);

/// Rational Gorman fixture used across tests: polar form with kappa = 0.5,
/// g_i ~ U[0.8, 1.2], s ~ U[0, 0.5]. Rational on p in [0.1,1]^k, y in [1,2] whenever
/// |c|^2 <= 0.1; demand stays positive there for k <= 2 and c_i <= 0.2.
std::shared_ptr<GormanSampler> gorman_rational_fixture(Vector common_slope);

/// Finite mixture of types with demand linear around an anchor budget:
/// q = q0 + D (p - p0) + c (y - y0).
class LinearTypesSampler final : public Sampler {
 public:
  struct Type {
    double weight;
    Vector q0;
    Matrix dq_dp;
    Vector dq_dy;
  };

  LinearTypesSampler(Budget anchor, std::vector<Type> types);

  std::size_t goods() const override { return anchor_.goods(); }
  DemandDraw draw(const Budget& b, std::uint64_t seed, std::uint64_t index) const override;
  std::optional<std::vector<WeightedDraw>> enumerate(const Budget& b) const override;

  const std::vector<Type>& types() const noexcept { return types_; }

 private:
  DemandDraw at(const Type& t, const Budget& b) const;

  Budget anchor_;
  std::vector<Type> types_;
  std::vector<double> cumulative_;
};

/// Hides the derivative blocks of another sampler so that derivative consumers
/// exercise their finite-difference paths.
class DerivativeFreeSampler final : public Sampler {
 public:
  explicit DerivativeFreeSampler(SamplerPtr inner) : inner_(std::move(inner)) {}

  std::size_t goods() const override { return inner_->goods(); }
  DemandDraw draw(const Budget& b, std::uint64_t seed, std::uint64_t index) const override;
  bool has_derivatives() const override { return false; }

 private:
  SamplerPtr inner_;
};

}  // namespace mrt
