#include "mrt/estimation.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <Eigen/QR>

#include "mrt/error.hpp"
#include "mrt/parallel.hpp"
#include "mrt/qp.hpp"
#include "mrt/random.hpp"

namespace mrt {

void CrossSection::add(double p_, double y_, double q_) {
  p.push_back(p_);
  y.push_back(y_);
  q.push_back(q_);
}

void CrossSection::validate() const {
  if (p.size() != q.size() || y.size() != q.size())
    throw ArgumentError("CrossSection: column lengths differ");
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (!(std::isfinite(p[i]) && std::isfinite(y[i]) && std::isfinite(q[i])) || p[i] <= 0.0 ||
        y[i] <= 0.0 || q[i] <= 0.0)
      throw ArgumentError("CrossSection: row " + std::to_string(i + 1) +
                          " must hold finite positive values");
  }
}

namespace {

std::string trim(std::string s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.pop_back();
  std::size_t i = 0;
  while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
  return s.substr(i);
}

double parse_field(const std::string& field, std::size_t line, const char* name) {
  const std::string f = trim(field);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
  if (f.empty() || ec != std::errc() || ptr != f.data() + f.size())
    throw IoError("line " + std::to_string(line) + ": cannot parse " + name + " value '" + f + "'");
  if (!std::isfinite(v) || v <= 0.0)
    throw IoError("line " + std::to_string(line) + ": " + name + " must be finite and positive");
  return v;
}

}  // namespace

CrossSection read_cross_section(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw IoError(path + ": empty file");
  if (trim(line) != "p,y,q") throw IoError(path + ": line 1: expected header 'p,y,q'");
  CrossSection data;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(f);
    if (fields.size() != 3)
      throw IoError(path + ": line " + std::to_string(lineno) + ": expected 3 fields, got " +
                    std::to_string(fields.size()));
    data.add(parse_field(fields[0], lineno, "p"), parse_field(fields[1], lineno, "y"),
             parse_field(fields[2], lineno, "q"));
  }
  return data;
}

void write_cross_section(const std::string& path, const CrossSection& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << "p,y,q\n";
  char buf[96];
  for (std::size_t i = 0; i < data.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", data.p[i], data.y[i], data.q[i]);
    out << buf;
  }
  if (!out) throw IoError("failed writing " + path);
}

CrossSection generate_cross_section(const Sampler& s, const BudgetLaw& law, std::size_t n,
                                    double noise_sd, std::uint64_t seed) {
  if (n < 1) throw ArgumentError("generate_cross_section: n must be at least 1");
  if (s.goods() != 1) throw ArgumentError("generate_cross_section: needs a one-good sampler");
  if (!(law.p_lo > 0.0 && law.p_lo <= law.p_hi && law.y_lo > 0.0 && law.y_lo <= law.y_hi))
    throw ArgumentError("generate_cross_section: invalid budget law");
  if (!(noise_sd >= 0.0)) throw ArgumentError("generate_cross_section: noise_sd must be >= 0");
  const CounterRng rng(derive_seed(seed, {1}));
  const std::uint64_t type_seed = derive_seed(seed, {2});
  CrossSection data;
  data.p.resize(n);
  data.y.resize(n);
  data.q.resize(n);
  constexpr int max_redraws = 64;
  const std::size_t chunks = (n + kReductionChunk - 1) / kReductionChunk;
  parallel_for(chunks, [&](std::size_t c) {
    const std::size_t lo = c * kReductionChunk;
    const std::size_t hi = std::min<std::size_t>(n, lo + kReductionChunk);
    for (std::size_t i = lo; i < hi; ++i) {
      const double p = uniform_on(law.p_lo, law.p_hi, rng.uniform(i, 0));
      const double y = uniform_on(law.y_lo, law.y_hi, rng.uniform(i, 1));
      const double q0 = s.draw(Budget::two_good(p, y), type_seed, i).quantity[0];
      if (!(q0 > 0.0))
        throw DomainError("generate_cross_section: sampler produced non-positive demand");
      double q = q0;
      if (noise_sd > 0.0) {
        int a = 0;
        do {
          if (a == max_redraws) throw ComputationError("generate_cross_section: noise redraw cap");
          q = q0 + noise_sd * rng.normal(i, static_cast<std::uint64_t>(1 + a));
          ++a;
        } while (!(q > 0.0));
      }
      data.p[i] = p;
      data.y[i] = y;
      data.q[i] = q;
    }
  });
  return data;
}

namespace {

double sample_sd(const std::vector<double>& v) {
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size() > 1 ? v.size() - 1 : 1));
}

double kernel_value(Kernel k, double u) {
  if (k == Kernel::Gaussian) return std::exp(-0.5 * u * u);
  return std::abs(u) < 1.0 ? 0.75 * (1.0 - u * u) : 0.0;
}

std::vector<double> kernel_weights(const CrossSection& d, const Budget& b, const Bandwidth& bw,
                                   Kernel k) {
  if (!(bw.h_p > 0.0 && bw.h_y > 0.0))
    throw ArgumentError("local_linear_moments: bandwidth must be positive");
  std::vector<double> w(d.size());
  for (std::size_t i = 0; i < d.size(); ++i)
    w[i] = kernel_value(k, (d.p[i] - b.price()) / bw.h_p) *
           kernel_value(k, (d.y[i] - b.income()) / bw.h_y);
  return w;
}

void check_orders(const std::vector<int>& orders) {
  if (orders.empty()) throw ArgumentError("local_linear_moments: no orders requested");
  for (int n : orders)
    if (n < 1) throw ArgumentError("local_linear_moments: orders must be >= 1");
  if (std::set<int>(orders.begin(), orders.end()).size() != orders.size())
    throw ArgumentError("local_linear_moments: duplicate orders");
}

std::string budget_name(const Budget& b) {
  char buf[80];
  std::snprintf(buf, sizeof buf, "(p=%.6g, y=%.6g)", b.price(), b.income());
  return buf;
}

// Weighted fit over rows idx (with repetition) using precomputed weights.
bool fit(const CrossSection& d, const std::vector<double>& w, const std::vector<std::size_t>* idx,
         const Budget& b, const std::vector<int>& orders, SlopeEstimate& out) {
  const std::size_t m = idx ? idx->size() : d.size();
  std::size_t effective = 0;
  for (std::size_t r = 0; r < m; ++r)
    if (w[idx ? (*idx)[r] : r] > 0.0) ++effective;
  if (effective < 3) return false;
  Eigen::MatrixXd X(static_cast<Eigen::Index>(m), 3);
  Eigen::MatrixXd Y(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(orders.size()));
  for (std::size_t r = 0; r < m; ++r) {
    const std::size_t i = idx ? (*idx)[r] : r;
    const double sw = std::sqrt(w[i]);
    const Eigen::Index row = static_cast<Eigen::Index>(r);
    X(row, 0) = sw;
    X(row, 1) = sw * (d.p[i] - b.price());
    X(row, 2) = sw * (d.y[i] - b.income());
    for (std::size_t o = 0; o < orders.size(); ++o)
      Y(row, static_cast<Eigen::Index>(o)) = sw * std::pow(d.q[i], orders[o]);
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  qr.setThreshold(1e-10);
  if (qr.rank() < 3) return false;
  const Eigen::MatrixXd theta = qr.solve(Y);
  out.alpha.resize(orders.size());
  out.beta_p.resize(orders.size());
  out.beta_y.resize(orders.size());
  for (std::size_t o = 0; o < orders.size(); ++o) {
    out.alpha[o] = theta(0, static_cast<Eigen::Index>(o));
    out.beta_p[o] = theta(1, static_cast<Eigen::Index>(o));
    out.beta_y[o] = theta(2, static_cast<Eigen::Index>(o));
  }
  return true;
}

}  // namespace

Bandwidth silverman_bandwidth(const CrossSection& data) {
  if (data.size() < 2) throw ArgumentError("silverman_bandwidth: need at least two rows");
  const double f = 1.06 * std::pow(static_cast<double>(data.size()), -0.2);
  const double sp = sample_sd(data.p);
  const double sy = sample_sd(data.y);
  if (!(sp > 0.0 && sy > 0.0))
    throw ComputationError("silverman_bandwidth: prices or incomes do not vary");
  return {f * sp, f * sy};
}

Vector SlopeEstimate::stacked() const {
  Vector v(static_cast<Eigen::Index>(2 * orders.size()));
  for (std::size_t o = 0; o < orders.size(); ++o) {
    v[static_cast<Eigen::Index>(2 * o)] = beta_p[o];
    v[static_cast<Eigen::Index>(2 * o + 1)] = beta_y[o];
  }
  return v;
}

SlopeEstimate local_linear_moments(const CrossSection& data, const Budget& b,
                                   const std::vector<int>& orders, const Bandwidth& bw,
                                   Kernel kernel) {
  check_orders(orders);
  if (b.goods() != 1) throw ArgumentError("local_linear_moments: two-good budgets only");
  if (data.size() != data.p.size() || data.size() != data.y.size())
    throw ArgumentError("local_linear_moments: column lengths differ");
  const std::vector<double> w = kernel_weights(data, b, bw, kernel);
  SlopeEstimate est;
  est.orders = orders;
  est.budget = b;
  est.bandwidth = bw;
  if (!fit(data, w, nullptr, b, orders, est))
    throw ComputationError("local_linear_moments: singular design at budget " + budget_name(b));
  return est;
}

Matrix bootstrap_covariance(const CrossSection& data, const Budget& b,
                            const std::vector<int>& orders, const Bandwidth& bw, Kernel kernel,
                            std::size_t n_boot, std::uint64_t seed) {
  check_orders(orders);
  if (n_boot < 2) throw ArgumentError("bootstrap_covariance: n_boot must be at least 2");
  const std::vector<double> w = kernel_weights(data, b, bw, kernel);
  const std::size_t n = data.size();
  const Eigen::Index dim = static_cast<Eigen::Index>(2 * orders.size());
  Matrix reps(static_cast<Eigen::Index>(n_boot), dim);
  constexpr std::uint64_t max_attempts = 20;
  parallel_for(n_boot, [&](std::size_t r) {
    std::vector<std::size_t> idx(n);
    SlopeEstimate est;
    est.orders = orders;
    for (std::uint64_t attempt = 0;; ++attempt) {
      if (attempt == max_attempts)
        throw ComputationError("bootstrap_covariance: replicate " + std::to_string(r) +
                               " stayed singular at budget " + budget_name(b));
      const CounterRng rng(derive_seed(seed, {r, attempt}));
      for (std::size_t i = 0; i < n; ++i) idx[i] = static_cast<std::size_t>(rng.below(n, i));
      if (fit(data, w, &idx, b, orders, est)) break;
    }
    reps.row(static_cast<Eigen::Index>(r)) = est.stacked().transpose();
  });
  const Eigen::RowVectorXd mean = reps.colwise().mean();
  const Matrix centered = reps.rowwise() - mean;
  Matrix V = centered.transpose() * centered / static_cast<double>(n_boot - 1);
  return 0.5 * (V + V.transpose());
}

Matrix b0_constraints(const std::vector<int>& orders) {
  std::vector<std::pair<int, int>> rows;  // (position of order n+1, position of order n+2)
  for (int n = 0;; ++n) {
    const auto a = std::find(orders.begin(), orders.end(), n + 1);
    const auto c = std::find(orders.begin(), orders.end(), n + 2);
    if (n + 1 > *std::max_element(orders.begin(), orders.end())) break;
    if (a != orders.end() && c != orders.end())
      rows.emplace_back(static_cast<int>(a - orders.begin()), static_cast<int>(c - orders.begin()));
  }
  Matrix G = Matrix::Zero(static_cast<Eigen::Index>(rows.size()),
                          static_cast<Eigen::Index>(2 * orders.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const int n1 = orders[static_cast<std::size_t>(rows[r].first)];
    const int n2 = orders[static_cast<std::size_t>(rows[r].second)];
    G(static_cast<Eigen::Index>(r), 2 * rows[r].first) = 1.0 / n1;
    G(static_cast<Eigen::Index>(r), 2 * rows[r].second + 1) = 1.0 / n2;
  }
  return G;
}

namespace {

Matrix shrinkage_metric(const Matrix& V, double tau2) {
  Matrix M = V + tau2 * Matrix::Identity(V.rows(), V.cols());
  M = 0.5 * (M + M.transpose());
  Eigen::LLT<Matrix> llt(M);
  if (llt.info() != Eigen::Success || llt.matrixLLT().diagonal().minCoeff() <= 1e-12)
    M += 1e-10 * Matrix::Identity(V.rows(), V.cols());
  return M;
}

}  // namespace

Vector project_onto_B0(const Vector& beta, const Matrix& V, double tau2,
                       const std::vector<int>& orders) {
  check_orders(orders);
  if (beta.size() != static_cast<Eigen::Index>(2 * orders.size()) || V.rows() != beta.size() ||
      V.cols() != beta.size())
    throw ArgumentError("project_onto_B0: beta, V and orders disagree in size");
  if (!(tau2 >= 0.0)) throw ArgumentError("project_onto_B0: tau2 must be nonnegative");
  const Matrix G = b0_constraints(orders);
  if (G.rows() == 0)
    throw ArgumentError("project_onto_B0: no B0 inequality is expressible from these orders");
  const ProjectionResult pr =
      project_polyhedron(beta, shrinkage_metric(V, tau2), G, Vector::Zero(G.rows()));
  return pr.x;
}

Vector eb_combine(const Vector& beta, const Vector& beta0, const Matrix& V, double tau2) {
  if (beta.size() != beta0.size() || V.rows() != beta.size() || V.cols() != beta.size())
    throw ArgumentError("eb_combine: size mismatch");
  if (!(tau2 >= 0.0)) throw ArgumentError("eb_combine: tau2 must be nonnegative");
  if (tau2 == 0.0) return beta0;
  const Matrix M = V + tau2 * Matrix::Identity(V.rows(), V.cols());
  const Vector z = M.ldlt().solve(tau2 * (beta - beta0));
  return beta0 + z;
}

Vector eb_estimator(const Vector& beta, const Matrix& V, double tau2,
                    const std::vector<int>& orders) {
  return eb_combine(beta, project_onto_B0(beta, V, tau2, orders), V, tau2);
}

std::vector<double> default_tau2_grid(const Matrix& V) {
  const double tr = V.trace();
  const double scale = tr > 0.0 ? tr / static_cast<double>(V.rows()) : 1.0;
  std::vector<double> g(25);
  for (int i = 0; i < 25; ++i) g[static_cast<std::size_t>(i)] = scale * std::pow(10.0, -4.0 + i / 3.0);
  return g;
}

double sure_value(const Vector& beta, const Matrix& V, double tau2, const std::vector<int>& orders) {
  const Vector g = eb_estimator(beta, V, tau2, orders);
  double div = 0.0;
  for (Eigen::Index j = 0; j < beta.size(); ++j) {
    const double h = 1e-6 * (1.0 + std::abs(beta[j]));
    Vector up = beta, dn = beta;
    up[j] += h;
    dn[j] -= h;
    const Vector col = (eb_estimator(up, V, tau2, orders) - eb_estimator(dn, V, tau2, orders)) / (2.0 * h);
    div += col.dot(V.col(j));  // sum_i J_ij V_ji
  }
  return (beta - g).squaredNorm() + 2.0 * div - V.trace();
}

SureSelection sure_select_tau(const Vector& beta, const Matrix& V,
                              const std::vector<double>& tau2_grid,
                              const std::vector<int>& orders) {
  if (tau2_grid.empty()) throw ArgumentError("sure_select_tau: empty tau2 grid");
  for (double t : tau2_grid)
    if (!(t > 0.0)) throw ArgumentError("sure_select_tau: grid entries must be positive");
  SureSelection out;
  out.curve.resize(tau2_grid.size());
  parallel_for(tau2_grid.size(), [&](std::size_t i) {
    out.curve[i] = {tau2_grid[i], sure_value(beta, V, tau2_grid[i], orders)};
  });
  double best = std::numeric_limits<double>::infinity();
  for (const SurePoint& pt : out.curve) best = std::min(best, pt.sure);
  const double tie = 1e-12 * (1.0 + std::abs(best));
  out.tau2 = -1.0;
  for (const SurePoint& pt : out.curve)
    if (pt.sure <= best + tie && pt.tau2 > out.tau2) out.tau2 = pt.tau2;
  return out;
}

ShrinkageResult eb_estimate(const CrossSection& data, const Budget& b, const EbOptions& opts) {
  const Bandwidth bw = opts.bandwidth ? *opts.bandwidth : silverman_bandwidth(data);
  ShrinkageResult res;
  res.slopes = local_linear_moments(data, b, opts.orders, bw, opts.kernel);
  res.slopes.V = bootstrap_covariance(data, b, opts.orders, bw, opts.kernel, opts.n_boot,
                                      derive_seed(opts.seed, {0xb007}));
  res.beta_hat = res.slopes.stacked();
  const std::vector<double> grid =
      opts.tau2_grid.empty() ? default_tau2_grid(res.slopes.V) : opts.tau2_grid;
  const SureSelection sel = sure_select_tau(res.beta_hat, res.slopes.V, grid, opts.orders);
  res.tau2 = sel.tau2;
  res.sure_curve = sel.curve;
  res.beta_0 = project_onto_B0(res.beta_hat, res.slopes.V, res.tau2, opts.orders);
  res.beta_eb = eb_combine(res.beta_hat, res.beta_0, res.slopes.V, res.tau2);
  return res;
}

}  // namespace mrt
