#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "mrt/moments.hpp"
#include "mrt/population.hpp"
#include "mrt/symmetric_tensor.hpp"

namespace mrt {

/// Moment tensors of k-good demand at one budget and the derivatives used by
/// the many-good restrictions, up to restriction order max_order.
struct TensorMomentSet {
  Budget budget = Budget::two_good(1.0, 1.0);
  int dim = 0;
  int max_order = 0;
  MomentSource source = MomentSource::ClosedForm;
  std::uint64_t draws = 0;
  std::uint64_t seed = 0;

  Vector M1;
  SymmetricTensor M2;
  Matrix dM1dp;  ///< (i, j) = dM_{1,i} / dp_j
  Vector dM1dy;
  SymmetricTensor dM2dy;
  /// [n-1]: dM_n/dp symmetrized over all n+1 indices (order n+1).
  std::vector<SymmetricTensor> dMdp_sym;
  /// [n-1]: dM_{n+1}/dy (order n+1).
  std::vector<SymmetricTensor> dMdy_next;

  /// Standard errors of the derived statistics; zero for exact sources.
  Matrix p_matrix_se;
  Matrix slutsky_se;
  std::vector<SymmetricTensor> restriction_se;
  Matrix normativity_se;
  double normativity_norm_se = 0.0;
};

struct TensorMomentOptions {
  int max_order = 1;
  std::uint64_t draws = 100000;
  std::uint64_t seed = 0;
  /// Relative central-difference step when the sampler has no derivatives.
  double fd_relative_step = 1e-4;
};

TensorMomentSet tensor_moments_monte_carlo(const Sampler& s, const Budget& b,
                                           const TensorMomentOptions& opts);

/// Exact tensors of a finite population (Sampler::enumerate must succeed).
TensorMomentSet tensor_moments_enumerated(const Sampler& s, const Budget& b, int max_order);

struct NsdReport {
  /// Largest eigenvalue (matrix case) or largest sampled form value (tensor case).
  double max_value = 0.0;
  bool is_nsd = true;
  double tolerance = 0.0;
  std::optional<Vector> witness;
};

/// dM_1/dp + 1/2 dM_2/dy.
Matrix p_matrix(const TensorMomentSet& tm);

/// Largest eigenvalue of (A + A')/2 by cyclic Jacobi. Without an explicit
/// tolerance, 1e-10 (1 + spectral radius) is used.
NsdReport nsd_check_matrix(const Matrix& A, std::optional<double> tol = std::nullopt);

/// n^{-1} sym dM_n/dp + (n+1)^{-1} dM_{n+1}/dy. Per type its form at v is
/// (q'v)^{n-1} v'Sv with S the individual Slutsky matrix.
SymmetricTensor higher_tensor_restriction(const TensorMomentSet& tm, int n);

enum class DirectionDomain {
  /// Unit sphere; both signs of every direction.
  Sphere,
  /// Unit directions with nonnegative entries.
  NonnegativeOrthant,
};

/// Domain on which the order-(n+1) restriction must be nonpositive: the whole
/// sphere for odd n; for even n the form is odd in v, and the restriction holds
/// where q'v >= 0, which the nonnegative orthant guarantees for positive demand.
DirectionDomain restriction_domain(int n);

struct TensorNsdOptions {
  std::size_t directions = 4096;
  std::uint64_t seed = 0;
  /// Absolute tolerance; default 1e-10 (1 + max |entry|).
  std::optional<double> tol;
  DirectionDomain domain = DirectionDomain::Sphere;
};

/// Sampled maximum of the tensor form over pseudo-random unit directions plus the
/// coordinate axes. Sampling can refute NSD but never prove it.
NsdReport nsd_check_tensor(const SymmetricTensor& T, const TensorNsdOptions& opts = {});

/// 1/2 [dM_1/dp + dM_1/dp' + dM_2/dy]: the average Slutsky matrix.
Matrix slutsky_from_moments(const TensorMomentSet& tm);

struct NormativityReport {
  Matrix matrix;  ///< d/dy (M_2 - M_1 M_1')
  double frobenius_norm = 0.0;
  Matrix standard_errors;
  double norm_se = 0.0;
};

/// Analytic assembly E[c q' + q c'] - dM_1/dy M_1' - M_1 dM_1/dy'.
NormativityReport normativity_distance(const TensorMomentSet& tm);

/// Central difference of the covariance matrix in income.
NormativityReport normativity_distance_fd(const TensorMomentSet& lo, const TensorMomentSet& hi);

/// Two finite populations with the same M_1, M_2, dM_1/dp and dM_2/dy at
/// `anchor` whose E[dq/dy q'] differ by the antisymmetric matrix
/// kappa (e_1 e_2' - e_2 e_1').
struct NonidentifiedPair {
  Budget anchor;
  std::shared_ptr<LinearTypesSampler> symmetric;
  std::shared_ptr<LinearTypesSampler> perturbed;
  double kappa;
};

NonidentifiedPair nonidentified_pair(double kappa = 0.25);

/// E[dq/dy q'] of a finite population at b.
Matrix income_cross_moment(const Sampler& s, const Budget& b);

}  // namespace mrt
