#include "mrt/population.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "mrt/error.hpp"
#include "mrt/parallel.hpp"
#include "mrt/quadrature.hpp"
#include "mrt/random.hpp"

namespace mrt {

Budget::Budget(Vector prices, double income) : prices_(std::move(prices)), income_(income) {
  if (prices_.size() == 0) throw ArgumentError("Budget: need at least one modeled good");
  for (Eigen::Index i = 0; i < prices_.size(); ++i) {
    if (!(prices_[i] > 0.0) || !std::isfinite(prices_[i]))
      throw ArgumentError("Budget: price " + std::to_string(i) + " must be positive and finite");
  }
  if (!(income_ > 0.0) || !std::isfinite(income_))
    throw ArgumentError("Budget: income must be positive and finite");
}

Budget Budget::two_good(double price, double income) {
  Vector p(1);
  p[0] = price;
  return Budget(std::move(p), income);
}

double Budget::price() const {
  if (goods() != 1) throw ArgumentError("Budget::price: budget has more than one modeled good");
  return prices_[0];
}

Budget Budget::with_price(std::size_t good, double price) const {
  Vector p = prices_;
  p[static_cast<Eigen::Index>(good)] = price;
  return Budget(std::move(p), income_);
}

Budget Budget::with_income(double income) const { return Budget(prices_, income); }

std::optional<std::vector<WeightedDraw>> Sampler::enumerate(const Budget&) const {
  return std::nullopt;
}

namespace {

DemandDraw scalar_draw(double q, double dq_dp, double dq_dy) {
  DemandDraw d;
  d.quantity = Vector::Constant(1, q);
  d.dq_dp = Matrix::Constant(1, 1, dq_dp);
  d.dq_dy = Vector::Constant(1, dq_dy);
  return d;
}

void require_goods(const Budget& b, std::size_t k, const char* who) {
  if (b.goods() != k)
    throw ArgumentError(std::string(who) + ": budget has " + std::to_string(b.goods()) +
                        " goods, sampler models " + std::to_string(k));
}

std::vector<double> cumulative_weights(const std::vector<double>& w, const char* who) {
  if (w.empty()) throw ArgumentError(std::string(who) + ": need at least one type");
  double total = 0.0;
  for (double x : w) {
    if (!(x > 0.0) || !std::isfinite(x))
      throw ArgumentError(std::string(who) + ": weights must be positive");
    total += x;
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw ArgumentError(std::string(who) + ": weights must sum to 1");
  std::vector<double> c(w.size());
  std::partial_sum(w.begin(), w.end(), c.begin());
  c.back() = 1.0;
  return c;
}

std::size_t pick(const std::vector<double>& cumulative, double u) {
  auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
  return std::min<std::size_t>(static_cast<std::size_t>(it - cumulative.begin()),
                               cumulative.size() - 1);
}

}  // namespace

// ---------------------------------------------------------------------------

RandomCoefficientPopulation::RandomCoefficientPopulation(double a_p, double b_p, double a_y,
                                                         double b_y)
    : a_p_(a_p), b_p_(b_p), a_y_(a_y), b_y_(b_y) {
  if (!std::isfinite(a_p) || !std::isfinite(b_p) || !std::isfinite(a_y) || !std::isfinite(b_y))
    throw ArgumentError("RandomCoefficientPopulation: bounds must be finite");
  if (a_p > b_p) throw ArgumentError("RandomCoefficientPopulation: a_p > b_p");
  if (a_y > b_y) throw ArgumentError("RandomCoefficientPopulation: a_y > b_y");
}

RandomCoefficientPopulation RandomCoefficientPopulation::reference() {
  return {1.0 / 3.0, 1.0, 1.0 / 3.0, 2.0 / 3.0};
}

bool RandomCoefficientPopulation::contains(double omega_p, double omega_y) const noexcept {
  return omega_p >= a_p_ && omega_p <= b_p_ && omega_y >= a_y_ && omega_y <= b_y_;
}

double rc_demand(const RandomCoefficientPopulation& pop, double omega_p, double omega_y,
                 const Budget& b) {
  if (!pop.contains(omega_p, omega_y))
    throw DomainError("rc_demand: coefficients outside the population support");
  return 1.0 - omega_p * b.price() + omega_y * b.income();
}

SupportBounds rc_support_bounds(const RandomCoefficientPopulation& pop, const Budget& b) {
  const double p = b.price();
  const double y = b.income();
  SupportBounds s;
  s.q_min = 1.0 - pop.b_p() * p + pop.a_y() * y;
  s.q_max = 1.0 - pop.a_p() * p + pop.b_y() * y;
  s.positive = s.q_min > 0.0;
  return s;
}

double rc_slutsky_statistic(const RandomCoefficientPopulation& pop, double omega_p,
                            double omega_y, const Budget& b) {
  const double q = rc_demand(pop, omega_p, omega_y, b);
  return -omega_p + omega_y * q;
}

double rc_min_demand_on_box(const RandomCoefficientPopulation& pop, double p_lo, double p_hi,
                            double y_lo, double y_hi) {
  double m = std::numeric_limits<double>::infinity();
  for (double p : {p_lo, p_hi})
    for (double y : {y_lo, y_hi}) m = std::min(m, 1.0 - pop.b_p() * p + pop.a_y() * y);
  return m;
}

namespace {

// The statistic is A(w_y) - w_p B(w_y) with A = w_y (1 + w_y y), B = 1 + w_y p.
// Returns P(statistic > 0 | w_y) over w_p ~ U[a_p, b_p].
double conditional_share(const RandomCoefficientPopulation& pop, double wy, double p, double y) {
  const double A = wy * (1.0 + wy * y);
  const double B = 1.0 + wy * p;
  const double width = pop.b_p() - pop.a_p();
  if (width == 0.0) return A - pop.a_p() * B > 0.0 ? 1.0 : 0.0;
  if (B == 0.0) return A > 0.0 ? 1.0 : 0.0;
  const double t = A / B;
  const double frac = B > 0.0 ? (t - pop.a_p()) / width : (pop.b_p() - t) / width;
  return std::clamp(frac, 0.0, 1.0);
}

double analytic_share(const RandomCoefficientPopulation& pop, const Budget& b, std::size_t points) {
  const double p = b.price();
  const double y = b.income();
  if (pop.b_y() == pop.a_y()) return conditional_share(pop, pop.a_y(), p, y);

  // Break the w_y interval where the clamp switches or B changes sign, so each
  // piece is smooth.
  std::vector<double> cuts{pop.a_y(), pop.b_y()};
  auto add = [&](double w) {
    if (std::isfinite(w) && w > pop.a_y() && w < pop.b_y()) cuts.push_back(w);
  };
  add(-1.0 / p);
  for (double c : {pop.a_p(), pop.b_p()}) {
    // y w^2 + (1 - c p) w - c = 0
    const double qa = y;
    const double qb = 1.0 - c * p;
    const double qc = -c;
    const double disc = qb * qb - 4.0 * qa * qc;
    if (disc < 0.0) continue;
    const double sq = std::sqrt(disc);
    const double r = -0.5 * (qb + std::copysign(sq, qb));
    if (r != 0.0) {
      add(r / qa);
      add(qc / r);
    } else {
      add(0.0);
    }
  }
  std::sort(cuts.begin(), cuts.end());

  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (cuts[i + 1] <= cuts[i]) continue;
    total += integrate_gauss_legendre([&](double wy) { return conditional_share(pop, wy, p, y); },
                                      cuts[i], cuts[i + 1], points);
  }
  return std::clamp(total / (pop.b_y() - pop.a_y()), 0.0, 1.0);
}

double monte_carlo_share(const RandomCoefficientPopulation& pop, const Budget& b,
                         const MonteCarloShare& mc) {
  if (mc.draws == 0) throw ArgumentError("rc_irrational_share: monte-carlo needs draws > 0");
  const CounterRng rng(mc.seed);
  const double p = b.price();
  const double y = b.income();
  const std::size_t chunks = (mc.draws + kReductionChunk - 1) / kReductionChunk;
  std::vector<std::uint64_t> counts(chunks, 0);
  parallel_for(chunks, [&](std::size_t c) {
    const std::uint64_t lo = c * kReductionChunk;
    const std::uint64_t hi = std::min<std::uint64_t>(mc.draws, lo + kReductionChunk);
    std::uint64_t n = 0;
    for (std::uint64_t i = lo; i < hi; ++i) {
      const double wp = uniform_on(pop.a_p(), pop.b_p(), rng.uniform(i, 0));
      const double wy = uniform_on(pop.a_y(), pop.b_y(), rng.uniform(i, 1));
      const double q = 1.0 - wp * p + wy * y;
      if (-wp + wy * q > 0.0) ++n;
    }
    counts[c] = n;
  });
  const std::uint64_t hits = std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
  return static_cast<double>(hits) / static_cast<double>(mc.draws);
}

}  // namespace

double rc_irrational_share(const RandomCoefficientPopulation& pop, const Budget& b,
                           const ShareMethod& method) {
  require_goods(b, 1, "rc_irrational_share");
  if (const auto* mc = std::get_if<MonteCarloShare>(&method)) return monte_carlo_share(pop, b, *mc);
  return analytic_share(pop, b, std::get<AnalyticQuadrature>(method).points);
}

DemandDraw RandomCoefficientSampler::draw(const Budget& b, std::uint64_t seed,
                                          std::uint64_t index) const {
  require_goods(b, 1, "RandomCoefficientSampler");
  const CounterRng rng(seed);
  const double wp = uniform_on(pop_.a_p(), pop_.b_p(), rng.uniform(index, 0));
  const double wy = uniform_on(pop_.a_y(), pop_.b_y(), rng.uniform(index, 1));
  return scalar_draw(1.0 - wp * b.price() + wy * b.income(), -wp, wy);
}

// ---------------------------------------------------------------------------

DemandDraw cobb_douglas_demand(const Vector& shares, const Budget& b) {
  require_goods(b, static_cast<std::size_t>(shares.size()), "cobb_douglas_demand");
  const Vector& p = b.prices();
  const double y = b.income();
  DemandDraw d;
  d.quantity = (shares.array() * y / p.array()).matrix();
  d.dq_dp = Matrix::Zero(shares.size(), shares.size());
  for (Eigen::Index i = 0; i < shares.size(); ++i) d.dq_dp(i, i) = -shares[i] * y / (p[i] * p[i]);
  d.dq_dy = (shares.array() / p.array()).matrix();
  return d;
}

namespace {
void validate_shares(const Vector& a, const char* who) {
  if (a.size() == 0) throw ArgumentError(std::string(who) + ": need at least one good");
  double total = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (!(a[i] > 0.0) || !std::isfinite(a[i]))
      throw ArgumentError(std::string(who) + ": budget shares must be positive");
    total += a[i];
  }
  if (!(total < 1.0)) throw ArgumentError(std::string(who) + ": budget shares must sum below 1");
}
}  // namespace

CobbDouglasSampler::CobbDouglasSampler(Vector shares) : shares_(std::move(shares)) {
  validate_shares(shares_, "CobbDouglasSampler");
}

DemandDraw CobbDouglasSampler::draw(const Budget& b, std::uint64_t, std::uint64_t) const {
  return cobb_douglas_demand(shares_, b);
}

std::optional<std::vector<WeightedDraw>> CobbDouglasSampler::enumerate(const Budget& b) const {
  return std::vector<WeightedDraw>{{1.0, cobb_douglas_demand(shares_, b)}};
}

CobbDouglasMixtureSampler::CobbDouglasMixtureSampler(std::vector<Vector> shares,
                                                     std::vector<double> weights)
    : shares_(std::move(shares)), weights_(std::move(weights)) {
  if (shares_.size() != weights_.size())
    throw ArgumentError("CobbDouglasMixtureSampler: shares and weights differ in length");
  cumulative_ = cumulative_weights(weights_, "CobbDouglasMixtureSampler");
  for (const Vector& a : shares_) {
    validate_shares(a, "CobbDouglasMixtureSampler");
    if (a.size() != shares_.front().size())
      throw ArgumentError("CobbDouglasMixtureSampler: types disagree on the number of goods");
  }
}

std::size_t CobbDouglasMixtureSampler::goods() const {
  return static_cast<std::size_t>(shares_.front().size());
}

DemandDraw CobbDouglasMixtureSampler::draw(const Budget& b, std::uint64_t seed,
                                           std::uint64_t index) const {
  const CounterRng rng(seed);
  return cobb_douglas_demand(shares_[pick(cumulative_, rng.uniform(index, 0))], b);
}

std::optional<std::vector<WeightedDraw>> CobbDouglasMixtureSampler::enumerate(
    const Budget& b) const {
  std::vector<WeightedDraw> out;
  out.reserve(shares_.size());
  for (std::size_t t = 0; t < shares_.size(); ++t)
    out.push_back({weights_[t], cobb_douglas_demand(shares_[t], b)});
  return out;
}

Vector CobbDouglasMixtureSampler::mean_shares() const {
  Vector m = Vector::Zero(shares_.front().size());
  for (std::size_t t = 0; t < shares_.size(); ++t) m += weights_[t] * shares_[t];
  return m;
}

Matrix CobbDouglasMixtureSampler::second_moment_shares() const {
  const Eigen::Index k = shares_.front().size();
  Matrix m = Matrix::Zero(k, k);
  for (std::size_t t = 0; t < shares_.size(); ++t)
    m += weights_[t] * shares_[t] * shares_[t].transpose();
  return m;
}

std::shared_ptr<CobbDouglasSampler> cobb_douglas_sampler(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ArgumentError("cobb_douglas_sampler: alpha outside (0,1)");
  return std::make_shared<CobbDouglasSampler>(Vector::Constant(1, alpha));
}

std::shared_ptr<CobbDouglasMixtureSampler> cobb_douglas_mixture_sampler(
    std::vector<Vector> shares, std::vector<double> weights) {
  return std::make_shared<CobbDouglasMixtureSampler>(std::move(shares), std::move(weights));
}

// ---------------------------------------------------------------------------

void ZeroIntercept::evaluate(const double*, const Vector&, Vector& d, Matrix& dd_dp) const {
  const auto k = static_cast<Eigen::Index>(goods_);
  d = Vector::Zero(k);
  dd_dp = Matrix::Zero(k, k);
}

PolarFormIntercept::PolarFormIntercept(Vector common_slope, double kappa, double g_lo,
                                       double g_hi, double s_lo, double s_hi)
    : c_(std::move(common_slope)), kappa_(kappa), g_lo_(g_lo), g_hi_(g_hi), s_lo_(s_lo),
      s_hi_(s_hi) {
  if (c_.size() == 0) throw ArgumentError("PolarFormIntercept: empty slope");
  if (!(kappa_ >= 0.0)) throw ArgumentError("PolarFormIntercept: kappa must be nonnegative");
  if (g_lo_ > g_hi_ || s_lo_ > s_hi_) throw ArgumentError("PolarFormIntercept: bad ranges");
}

std::size_t PolarFormIntercept::type_dimension() const {
  return static_cast<std::size_t>(c_.size()) + 1;
}

void PolarFormIntercept::evaluate(const double* u, const Vector& prices, Vector& d,
                                  Matrix& dd_dp) const {
  const Eigen::Index k = c_.size();
  Vector g(k);
  for (Eigen::Index i = 0; i < k; ++i) g[i] = uniform_on(g_lo_, g_hi_, u[i + 1]);
  const double s = uniform_on(s_lo_, s_hi_, u[0]);
  const double a = s + g.dot(prices) - 0.5 * kappa_ * prices.squaredNorm();
  const Vector grad_a = g - kappa_ * prices;
  // d = grad a - c a, D = hess a - c grad_a^T
  d = grad_a - c_ * a;
  dd_dp = -kappa_ * Matrix::Identity(k, k) - c_ * grad_a.transpose();
}

GormanSampler::GormanSampler(Vector common_slope, std::shared_ptr<const GormanIntercept> intercept)
    : c_(std::move(common_slope)), intercept_(std::move(intercept)) {
  if (c_.size() == 0) throw ArgumentError("GormanSampler: empty slope");
  if (!intercept_) throw ArgumentError("GormanSampler: null intercept family");
}

DemandDraw GormanSampler::draw(const Budget& b, std::uint64_t seed, std::uint64_t index) const {
  require_goods(b, goods(), "GormanSampler");
  const CounterRng rng(seed);
  const std::size_t dim = intercept_->type_dimension();
  std::vector<double> u(dim);
  for (std::size_t j = 0; j < dim; ++j) u[j] = rng.uniform(index, j);
  DemandDraw out;
  intercept_->evaluate(u.data(), b.prices(), out.quantity, out.dq_dp);
  out.quantity += c_ * b.income();
  out.dq_dy = c_;
  return out;
}

std::shared_ptr<GormanSampler> gorman_sampler(Vector common_slope,
                                              std::shared_ptr<const GormanIntercept> intercept) {
  return std::make_shared<GormanSampler>(std::move(common_slope), std::move(intercept));
}

std::shared_ptr<GormanSampler> gorman_rational_fixture(Vector common_slope) {
  auto family = std::make_shared<PolarFormIntercept>(common_slope, 0.5, 0.8, 1.2, 0.0, 0.5);
  return gorman_sampler(std::move(common_slope), std::move(family));
}

// ---------------------------------------------------------------------------

LinearTypesSampler::LinearTypesSampler(Budget anchor, std::vector<Type> types)
    : anchor_(std::move(anchor)), types_(std::move(types)) {
  std::vector<double> w;
  const auto k = static_cast<Eigen::Index>(anchor_.goods());
  for (const Type& t : types_) {
    if (t.q0.size() != k || t.dq_dy.size() != k || t.dq_dp.rows() != k || t.dq_dp.cols() != k)
      throw ArgumentError("LinearTypesSampler: type dimensions disagree with the anchor budget");
    w.push_back(t.weight);
  }
  cumulative_ = cumulative_weights(w, "LinearTypesSampler");
}

DemandDraw LinearTypesSampler::at(const Type& t, const Budget& b) const {
  require_goods(b, goods(), "LinearTypesSampler");
  DemandDraw d;
  d.quantity = t.q0 + t.dq_dp * (b.prices() - anchor_.prices()) +
               t.dq_dy * (b.income() - anchor_.income());
  d.dq_dp = t.dq_dp;
  d.dq_dy = t.dq_dy;
  return d;
}

DemandDraw LinearTypesSampler::draw(const Budget& b, std::uint64_t seed,
                                    std::uint64_t index) const {
  const CounterRng rng(seed);
  return at(types_[pick(cumulative_, rng.uniform(index, 0))], b);
}

std::optional<std::vector<WeightedDraw>> LinearTypesSampler::enumerate(const Budget& b) const {
  std::vector<WeightedDraw> out;
  for (const Type& t : types_) out.push_back({t.weight, at(t, b)});
  return out;
}

DemandDraw DerivativeFreeSampler::draw(const Budget& b, std::uint64_t seed,
                                       std::uint64_t index) const {
  DemandDraw d = inner_->draw(b, seed, index);
  d.dq_dp.setConstant(std::numeric_limits<double>::quiet_NaN());
  d.dq_dy.setConstant(std::numeric_limits<double>::quiet_NaN());
  return d;
}

}  // namespace mrt
