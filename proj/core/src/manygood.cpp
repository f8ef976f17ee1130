#include "mrt/manygood.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mrt/error.hpp"
#include "mrt/linalg.hpp"
#include "mrt/random.hpp"
#include "sampling.hpp"

namespace mrt {

namespace {

// Offsets of each statistic inside the flat per-type vector.
struct Layout {
  int k = 0;
  int N = 0;
  std::size_t m1, m2, d1p, d1y, d2y, pm, sl;
  std::vector<std::size_t> dp, dy, rs;  // per restriction order n = 1..N
  std::vector<SymmetricTensor> shapes;  // order n+1 templates
  SymmetricTensor shape2;
  std::size_t width;

  Layout(int k_, int N_) : k(k_), N(N_), shape2(2, k_) {
    const std::size_t kk = static_cast<std::size_t>(k) * static_cast<std::size_t>(k);
    std::size_t off = 0;
    m1 = off, off += static_cast<std::size_t>(k);
    m2 = off, off += shape2.size();
    d1p = off, off += kk;
    d1y = off, off += static_cast<std::size_t>(k);
    d2y = off, off += shape2.size();
    pm = off, off += kk;
    sl = off, off += kk;
    for (int n = 1; n <= N; ++n) {
      shapes.emplace_back(n + 1, k);
      const std::size_t sz = shapes.back().size();
      dp.push_back(off), off += sz;
      dy.push_back(off), off += sz;
      rs.push_back(off), off += sz;
    }
    width = off;
  }
};

void per_type_values(const Layout& L, const Vector& q, const Matrix& D, const Vector& c,
                     double* out) {
  const int k = L.k;
  for (int i = 0; i < k; ++i) out[L.m1 + i] = q[i];
  for (std::size_t r = 0; r < L.shape2.size(); ++r) {
    const auto& a = L.shape2.multi_index(r);
    out[L.m2 + r] = q[a[0]] * q[a[1]];
    out[L.d2y + r] = c[a[0]] * q[a[1]] + q[a[0]] * c[a[1]];
  }
  for (int i = 0; i < k; ++i) {
    out[L.d1y + i] = c[i];
    for (int j = 0; j < k; ++j) {
      const std::size_t ij = static_cast<std::size_t>(i * k + j);
      const double cq = c[i] * q[j] + q[i] * c[j];
      out[L.d1p + ij] = D(i, j);
      out[L.pm + ij] = D(i, j) + 0.5 * cq;
      out[L.sl + ij] = 0.5 * (D(i, j) + D(j, i) + cq);
    }
  }
  for (int n = 1; n <= L.N; ++n) {
    const SymmetricTensor& T = L.shapes[static_cast<std::size_t>(n - 1)];
    const std::size_t dp = L.dp[static_cast<std::size_t>(n - 1)];
    const std::size_t dy = L.dy[static_cast<std::size_t>(n - 1)];
    const std::size_t rs = L.rs[static_cast<std::size_t>(n - 1)];
    for (std::size_t r = 0; r < T.size(); ++r) {
      const auto& a = T.multi_index(r);
      const int m = n + 1;
      double sym_p = 0.0;
      double d_y = 0.0;
      for (int t = 0; t < m; ++t) {
        double rest = 1.0;
        for (int s = 0; s < m; ++s)
          if (s != t) rest *= q[a[s]];
        d_y += c[a[t]] * rest;
        for (int rr = 0; rr < m; ++rr) {
          if (rr == t) continue;
          double prod = D(a[t], a[rr]);
          for (int s = 0; s < m; ++s)
            if (s != t && s != rr) prod *= q[a[s]];
          sym_p += prod;
        }
      }
      sym_p /= static_cast<double>(m);
      out[dp + r] = sym_p;
      out[dy + r] = d_y;
      out[rs + r] = sym_p / static_cast<double>(n) + d_y / static_cast<double>(n + 1);
    }
  }
}

Matrix block_matrix(const std::vector<double>& v, std::size_t off, int k) {
  Matrix m(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) m(i, j) = v[off + static_cast<std::size_t>(i * k + j)];
  return m;
}

SymmetricTensor block_tensor(const std::vector<double>& v, std::size_t off, SymmetricTensor t) {
  for (std::size_t r = 0; r < t.size(); ++r) t.data()[r] = v[off + r];
  return t;
}

TensorMomentSet assemble(const Layout& L, const Budget& b, const std::vector<double>& mean,
                         const std::vector<double>& se) {
  TensorMomentSet tm;
  tm.budget = b;
  tm.dim = L.k;
  tm.max_order = L.N;
  tm.M1 = Eigen::Map<const Vector>(mean.data() + L.m1, L.k);
  tm.M2 = block_tensor(mean, L.m2, L.shape2);
  tm.dM1dp = block_matrix(mean, L.d1p, L.k);
  tm.dM1dy = Eigen::Map<const Vector>(mean.data() + L.d1y, L.k);
  tm.dM2dy = block_tensor(mean, L.d2y, L.shape2);
  for (int n = 1; n <= L.N; ++n) {
    const std::size_t i = static_cast<std::size_t>(n - 1);
    tm.dMdp_sym.push_back(block_tensor(mean, L.dp[i], L.shapes[i]));
    tm.dMdy_next.push_back(block_tensor(mean, L.dy[i], L.shapes[i]));
    tm.restriction_se.push_back(block_tensor(se, L.rs[i], L.shapes[i]));
  }
  tm.p_matrix_se = block_matrix(se, L.pm, L.k);
  tm.slutsky_se = block_matrix(se, L.sl, L.k);
  tm.normativity_se = Matrix::Zero(L.k, L.k);
  return tm;
}

Matrix normativity_from(const Layout& L, const std::vector<double>& mean) {
  const Vector M1 = Eigen::Map<const Vector>(mean.data() + L.m1, L.k);
  const Vector c = Eigen::Map<const Vector>(mean.data() + L.d1y, L.k);
  Matrix E = block_tensor(mean, L.d2y, L.shape2).to_matrix();
  return E - c * M1.transpose() - M1 * c.transpose();
}

void check_inputs(const Sampler& s, const Budget& b, int max_order, const char* who) {
  if (s.goods() != b.goods()) throw ArgumentError(std::string(who) + ": goods mismatch");
  if (max_order < 1) throw ArgumentError(std::string(who) + ": max_order must be at least 1");
}

}  // namespace

TensorMomentSet tensor_moments_monte_carlo(const Sampler& s, const Budget& b,
                                           const TensorMomentOptions& opts) {
  check_inputs(s, b, opts.max_order, "tensor_moments_monte_carlo");
  if (opts.draws < 2) throw ArgumentError("tensor_moments_monte_carlo: need at least two draws");
  const int k = static_cast<int>(b.goods());
  const Layout L(k, opts.max_order);
  const bool fd = !s.has_derivatives();

  std::vector<Budget> p_hi, p_lo;
  std::vector<double> hp;
  for (int j = 0; j < k; ++j) {
    const double pj = b.prices()[j];
    hp.push_back(opts.fd_relative_step * pj);
    p_hi.push_back(b.with_price(static_cast<std::size_t>(j), pj + hp.back()));
    p_lo.push_back(b.with_price(static_cast<std::size_t>(j), pj - hp.back()));
  }
  const double hy = opts.fd_relative_step * b.income();
  const Budget y_hi = b.with_income(b.income() + hy);
  const Budget y_lo = b.with_income(b.income() - hy);

  auto per_draw = [&](std::uint64_t i, double* out) {
    const DemandDraw d = s.draw(b, opts.seed, i);
    if (!fd) {
      per_type_values(L, d.quantity, d.dq_dp, d.dq_dy, out);
      return;
    }
    Matrix D(k, k);
    for (int j = 0; j < k; ++j)
      D.col(j) = (s.draw(p_hi[j], opts.seed, i).quantity - s.draw(p_lo[j], opts.seed, i).quantity) /
                 (2.0 * hp[j]);
    const Vector c =
        (s.draw(y_hi, opts.seed, i).quantity - s.draw(y_lo, opts.seed, i).quantity) / (2.0 * hy);
    per_type_values(L, d.quantity, D, c, out);
  };
  const detail::SampleSummary sum = detail::summarize_draws(opts.draws, L.width, per_draw);

  TensorMomentSet tm = assemble(L, b, sum.mean, sum.se);
  tm.source = fd ? MomentSource::FiniteDifference : MomentSource::MonteCarlo;
  tm.draws = opts.draws;
  tm.seed = opts.seed;
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j)
      tm.normativity_se(i, j) = detail::batch_means_se(
          sum, [&](const std::vector<double>& m) { return normativity_from(L, m)(i, j); });
  tm.normativity_norm_se = detail::batch_means_se(
      sum, [&](const std::vector<double>& m) { return normativity_from(L, m).norm(); });
  return tm;
}

TensorMomentSet tensor_moments_enumerated(const Sampler& s, const Budget& b, int max_order) {
  check_inputs(s, b, max_order, "tensor_moments_enumerated");
  auto types = s.enumerate(b);
  if (!types) throw ArgumentError("tensor_moments_enumerated: sampler is not a finite population");
  const Layout L(static_cast<int>(b.goods()), max_order);
  std::vector<double> mean(L.width, 0.0), x(L.width);
  for (const WeightedDraw& t : *types) {
    per_type_values(L, t.draw.quantity, t.draw.dq_dp, t.draw.dq_dy, x.data());
    for (std::size_t j = 0; j < L.width; ++j) mean[j] += t.weight * x[j];
  }
  TensorMomentSet tm = assemble(L, b, mean, std::vector<double>(L.width, 0.0));
  tm.source = MomentSource::ClosedForm;
  return tm;
}

Matrix p_matrix(const TensorMomentSet& tm) {
  if (tm.dM1dp.size() == 0 || tm.dM2dy.size() == 0)
    throw ArgumentError("p_matrix: derivative blocks missing");
  return tm.dM1dp + 0.5 * tm.dM2dy.to_matrix();
}

NsdReport nsd_check_matrix(const Matrix& A, std::optional<double> tol) {
  if (A.rows() != A.cols()) throw ArgumentError("nsd_check_matrix: matrix must be square");
  if (!A.allFinite()) throw ArgumentError("nsd_check_matrix: non-finite entries");
  const Matrix S = 0.5 * (A + A.transpose());
  const SymmetricEigen eig = jacobi_eigen(S);
  NsdReport r;
  const double radius = eig.values.cwiseAbs().maxCoeff();
  r.tolerance = tol ? *tol : 1e-10 * (1.0 + radius);
  r.max_value = eig.values[eig.values.size() - 1];
  r.is_nsd = r.max_value <= r.tolerance;
  if (!r.is_nsd) r.witness = eig.vectors.col(eig.vectors.cols() - 1);
  return r;
}

SymmetricTensor higher_tensor_restriction(const TensorMomentSet& tm, int n) {
  if (n < 1) throw ArgumentError("higher_tensor_restriction: n must be at least 1");
  if (static_cast<std::size_t>(n) > tm.dMdp_sym.size() ||
      static_cast<std::size_t>(n) > tm.dMdy_next.size())
    throw ArgumentError("higher_tensor_restriction: tensors for n = " + std::to_string(n) +
                        " were not computed");
  const std::size_t i = static_cast<std::size_t>(n - 1);
  return (1.0 / n) * tm.dMdp_sym[i] + (1.0 / (n + 1)) * tm.dMdy_next[i];
}

DirectionDomain restriction_domain(int n) {
  return n % 2 == 1 ? DirectionDomain::Sphere : DirectionDomain::NonnegativeOrthant;
}

NsdReport nsd_check_tensor(const SymmetricTensor& T, const TensorNsdOptions& opts) {
  if (opts.directions < 1) throw ArgumentError("nsd_check_tensor: need at least one direction");
  const int k = T.dim();
  const bool orthant = opts.domain == DirectionDomain::NonnegativeOrthant;
  NsdReport r;
  r.tolerance = opts.tol ? *opts.tol : 1e-10 * (1.0 + T.max_abs());
  r.max_value = -std::numeric_limits<double>::infinity();
  Vector best;
  auto consider = [&](const Vector& v) {
    const double f = tensor_form(T, v);
    if (f > r.max_value) {
      r.max_value = f;
      best = v;
    }
  };
  for (int j = 0; j < k; ++j) {
    Vector e = Vector::Zero(k);
    e[j] = 1.0;
    consider(e);
    if (!orthant) consider(-e);
  }
  const CounterRng rng(opts.seed);
  Vector v(k);
  for (std::size_t d = 0; d < opts.directions; ++d) {
    for (int j = 0; j < k; ++j) {
      const double z = rng.normal(d, static_cast<std::uint64_t>(j));
      v[j] = orthant ? std::abs(z) : z;
    }
    const double norm = v.norm();
    if (norm == 0.0) continue;
    v /= norm;
    consider(v);
    if (!orthant) consider(-v);
  }
  r.is_nsd = r.max_value <= r.tolerance;
  if (!r.is_nsd) r.witness = best;
  return r;
}

Matrix slutsky_from_moments(const TensorMomentSet& tm) {
  if (tm.dM1dp.size() == 0 || tm.dM2dy.size() == 0)
    throw ArgumentError("slutsky_from_moments: derivative blocks missing");
  return 0.5 * (tm.dM1dp + tm.dM1dp.transpose() + tm.dM2dy.to_matrix());
}

NormativityReport normativity_distance(const TensorMomentSet& tm) {
  if (tm.M1.size() == 0 || tm.dM1dy.size() == 0 || tm.dM2dy.size() == 0)
    throw ArgumentError("normativity_distance: moments or income derivatives missing");
  NormativityReport r;
  r.matrix = tm.dM2dy.to_matrix() - tm.dM1dy * tm.M1.transpose() - tm.M1 * tm.dM1dy.transpose();
  r.frobenius_norm = r.matrix.norm();
  r.standard_errors =
      tm.normativity_se.size() ? tm.normativity_se : Matrix::Zero(tm.dim, tm.dim);
  r.norm_se = tm.normativity_norm_se;
  return r;
}

NormativityReport normativity_distance_fd(const TensorMomentSet& lo, const TensorMomentSet& hi) {
  const double h2 = hi.budget.income() - lo.budget.income();
  if (!(h2 > 0.0)) throw ArgumentError("normativity_distance_fd: need lo income < hi income");
  if (lo.dim != hi.dim) throw ArgumentError("normativity_distance_fd: dimension mismatch");
  auto cov = [](const TensorMomentSet& t) { return Matrix(t.M2.to_matrix() - t.M1 * t.M1.transpose()); };
  NormativityReport r;
  r.matrix = (cov(hi) - cov(lo)) / h2;
  r.frobenius_norm = r.matrix.norm();
  r.standard_errors = Matrix::Zero(lo.dim, lo.dim);
  return r;
}

NonidentifiedPair nonidentified_pair(double kappa) {
  const Budget anchor(Vector::Ones(2), 2.0);
  Vector q1(2), q2(2), c1(2), c2(2);
  q1 << 0.4, 0.6;
  q2 << 0.8, 0.3;
  c1 << 0.15, 0.2;
  c2 << 0.3, 0.1;
  Matrix D1(2, 2), D2(2, 2);
  D1 << -0.6, 0.1, 0.1, -0.5;
  D2 << -0.4, 0.05, 0.05, -0.7;

  // With equal weights, 1/2 (d1 q1' + d2 q2') = K is antisymmetric, so
  // E[c q' + q c'] is unchanged while E[c q'] moves by K.
  Matrix K = Matrix::Zero(2, 2);
  K(0, 1) = kappa;
  K(1, 0) = -kappa;
  Matrix Q(2, 2);
  Q.col(0) = q1;
  Q.col(1) = q2;
  const Matrix delta = 2.0 * K * Q.transpose().inverse();

  std::vector<LinearTypesSampler::Type> base = {{0.5, q1, D1, c1}, {0.5, q2, D2, c2}};
  std::vector<LinearTypesSampler::Type> pert = {{0.5, q1, D1, c1 + delta.col(0)},
                                                {0.5, q2, D2, c2 + delta.col(1)}};
  return {anchor, std::make_shared<LinearTypesSampler>(anchor, std::move(base)),
          std::make_shared<LinearTypesSampler>(anchor, std::move(pert)), kappa};
}

Matrix income_cross_moment(const Sampler& s, const Budget& b) {
  auto types = s.enumerate(b);
  if (!types) throw ArgumentError("income_cross_moment: sampler is not a finite population");
  Matrix E = Matrix::Zero(static_cast<Eigen::Index>(b.goods()), static_cast<Eigen::Index>(b.goods()));
  for (const WeightedDraw& t : *types) E += t.weight * t.draw.dq_dy * t.draw.quantity.transpose();
  return E;
}

}  // namespace mrt
