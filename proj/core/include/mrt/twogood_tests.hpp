#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mrt/moments.hpp"
#include "mrt/population.hpp"

namespace mrt {

struct Witness {
  std::string inequality;
  double value;
};

/// Outcome of a rationality test. worst_slack is the largest left-hand side
/// over the inequalities tested (each of the form lhs <= 0).
struct TestVerdict {
  bool rejected = false;
  double worst_slack = 0.0;
  double tolerance = 0.0;
  std::vector<Witness> witnesses;
  /// Maximizing polynomial coefficients for LP-based tests, empty otherwise.
  std::vector<double> certificate;
};

/// Remark-1 style test from Gamma_0, Gamma_1 and the support [q_min, q_max].
TestVerdict four_inequality_test(double gamma0, double gamma1, double q_min, double q_max,
                                 double tol = 1e-8);

/// Standard Bernstein basis C(n,v) q^v (1-q)^(n-v), v = 0..n, for q in [0,1].
std::vector<double> bernstein_basis(int n, double q);

double rescale_to_unit(double q, double q_lo, double q_hi);

/// Interval onto which demand is rescaled before the Bernstein basis is applied.
struct Support {
  double lo;
  double hi;

  /// (0, y/p): everything affordable at the budget.
  static Support affordable(const Budget& b);
  static Support of(const SupportBounds& s) { return {s.q_min, s.q_max}; }
};

struct BernsteinTranslations {
  int degree = 0;
  std::vector<double> lambdas;
  std::vector<double> standard_errors;
  Support support{0.0, 1.0};
};

/// Coefficients c_i with b_{v,n}((q - lo)/(hi - lo)) = sum_i c_i q^i.
std::vector<double> bernstein_monomial_coefficients(int n, int v, const Support& support);

/// Monte Carlo translation of each basis polynomial of the rescaled demand.
BernsteinTranslations bernstein_translations(const Sampler& s, const Budget& b, int degree,
                                             std::uint64_t draws, std::uint64_t seed,
                                             const Support& support);

/// Same translations assembled from monomial translations Gamma_0..Gamma_degree.
/// Standard errors, when given, are propagated as sum |c_i| se_i.
BernsteinTranslations bernstein_translations_from_gammas(
    const std::function<double(int)>& gamma, int degree, const Support& support,
    const std::function<double(int)>& gamma_se = {});

enum class LpVariant {
  /// Positivity of the test polynomial certified on every grid subinterval at once.
  AllGridPoints,
  /// One LP per grid point, each only constraining the polynomial there.
  PerGridPoint,
};

struct LpTestOptions {
  int grid_size = 101;
  double tol = 1e-8;
  LpVariant variant = LpVariant::AllGridPoints;
};

/// max sum_v beta_v Lambda_v over beta in [-1,1]^{n+1} with the test polynomial
/// nonnegative on [0,1]; rejects iff the maximum exceeds tol + 3 sum se_v.
TestVerdict bernstein_lp_test(const BernsteinTranslations& bt, const LpTestOptions& opts = {});

/// Bernstein coefficients of the restriction of a degree-n polynomial to
/// [a, b] (within [0,1]), as a linear map of its coefficients on [0,1].
Eigen::MatrixXd bernstein_subdivision_matrix(int n, double a, double b);

struct EnumerationResult {
  enum class Outcome { Rejected, Inconclusive };
  Outcome outcome = Outcome::Inconclusive;
  /// Degree of the first rejecting basis, 0 when inconclusive.
  int degree = 0;
  /// Verdict of the last degree tested.
  TestVerdict verdict;
  /// LP optimum per tested degree.
  std::vector<double> objectives;

  bool rejected() const noexcept { return outcome == Outcome::Rejected; }
};

/// Bernstein LP for degrees 1..max_degree in order, stopping at the first
/// rejection. Never accepts: the scheme is semi-decidable.
EnumerationResult enumeration_test(const std::function<double(int)>& gamma, int max_degree,
                                   const Support& support, const LpTestOptions& opts = {},
                                   const std::function<double(int)>& gamma_se = {});

}  // namespace mrt
