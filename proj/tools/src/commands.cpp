#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <sstream>

#include <spdlog/spdlog.h>

#include "mrt/error.hpp"
#include "mrt/estimation.hpp"
#include "mrt/manygood.hpp"
#include "mrt/moments.hpp"
#include "mrt/parallel.hpp"
#include "mrt/quantiles.hpp"
#include "mrt/random.hpp"
#include "mrt/twogood_tests.hpp"
#include "output.hpp"

namespace mrt::cli {

namespace {

// Stream tags so that each subcommand draws from its own seed family.
enum SeedTag : std::uint64_t {
  kShareSeed = 1,
  kMomentSeed,
  kQuantileSeed,
  kBernsteinSeed,
  kManyGoodSeed,
  kIdentitySeed,
  kDataSeed,
  kBootstrapSeed,
  kDirectionSeed,
};

std::uint64_t sub_seed(const Config& c, SeedTag tag) { return derive_seed(c.seed, {tag}); }

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) v[i] = lo + (hi - lo) * i / (n - 1);
  v.back() = hi;
  return v;
}

const char* flag(bool b) { return b ? "1" : "0"; }

Vector to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::string heatmap_of(const std::vector<bool>& v, const Grid& g) {
  std::vector<double> d(v.begin(), v.end());
  return render_heatmap(d, static_cast<int>(g.p.size()), static_cast<int>(g.y.size()), 0.0, 1.0);
}

void warn_nonpositive(const Config& c) {
  const auto pop = population_of(c);
  const double qmin =
      rc_min_demand_on_box(pop, c.grid.p_min, c.grid.p_max, c.grid.y_min, c.grid.y_max);
  if (!(qmin > 0.0))
    spdlog::warn("population admits non-positive demand on the grid (min q = {:.6g}); "
                 "cells with q_min <= 0 are refused by the moment tests",
                 qmin);
}

double tensor_se_bound(const SymmetricTensor& se) {
  double s = 0.0;
  for (std::size_t r = 0; r < se.size(); ++r) s += se.multiplicity(r) * se.data()[r];
  return s;
}

// ---------------------------------------------------------------------------

std::vector<std::string> cmd_share_map(const Config& c, OutputDir& out) {
  const Grid g = Grid::from(c.grid);
  const std::vector<double> share = compute_share_map(c);
  CsvTable t({"p", "y", "share"});
  for (std::size_t i = 0; i < g.cells(); ++i) t.row().num(g.price(i)).num(g.income(i)).num(share[i]);
  out.write_csv("share_map.csv", t);
  out.write("share_map.ppm", render_heatmap(share, static_cast<int>(g.p.size()),
                                            static_cast<int>(g.y.size()), 0.0, 1.0));
  const auto [lo, hi] = std::minmax_element(share.begin(), share.end());
  std::ostringstream r;
  r << "irrational share over " << g.p.size() << "x" << g.y.size() << " budgets\n"
    << "method: " << c.share.method << "\n"
    << "min: " << fmt_num(*lo) << "\n"
    << "max: " << fmt_num(*hi) << "\n"
    << "share(p_max, y_min): " << fmt_num(share[g.p.size() - 1]) << "\n"
    << "share(p_min, y_max): " << fmt_num(share[g.cells() - g.p.size()]) << "\n";
  out.write("share_map.txt", r.str());
  return out.written();
}

std::vector<std::string> cmd_test_moments(const Config& c, OutputDir& out) {
  warn_nonpositive(c);
  const Grid g = Grid::from(c.grid);
  const std::vector<MomentCell> m = compute_moment_map(c);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  CsvTable t({"p", "y", "gamma0", "gamma1", "ineq3", "ineq4", "rejected"});
  CsvTable t2({"p", "y", "gamma0", "rejected"});
  std::vector<bool> rej3, rej2;
  std::size_t n3 = 0, n2 = 0, refused = 0;
  for (std::size_t i = 0; i < g.cells(); ++i) {
    const MomentCell& x = m[i];
    t.row().num(g.price(i)).num(g.income(i)).num(x.gamma0).num(x.gamma1);
    t.num(x.positive ? x.ineq3 : nan).num(x.positive ? x.ineq4 : nan).text(flag(x.rejected));
    t2.row().num(g.price(i)).num(g.income(i)).num(x.gamma0).text(flag(x.rejected_two));
    rej3.push_back(x.rejected);
    rej2.push_back(x.rejected_two);
    n3 += x.rejected;
    n2 += x.rejected_two;
    refused += !x.positive;
  }
  out.write_csv("test_moments.csv", t);
  out.write_csv("test_moments_mom2.csv", t2);
  out.write("test_moments.ppm", heatmap_of(rej3, g));
  out.write("test_moments_mom2.ppm", heatmap_of(rej2, g));
  std::ostringstream r;
  r << "moment tests over " << g.cells() << " budgets (" << c.moments.method << ")\n"
    << "three-moment rejections: " << n3 << "\n"
    << "two-moment rejections: " << n2 << "\n"
    << "refused (q_min <= 0): " << refused << "\n";
  out.write("test_moments.txt", r.str());
  return out.written();
}

std::vector<std::string> cmd_test_quantiles(const Config& c, OutputDir& out) {
  const Grid g = Grid::from(c.grid);
  const std::vector<QuantileCell> q = compute_quantile_map(c);
  const auto& taus = c.quantiles.taus;
  for (std::size_t k = 0; k < taus.size(); ++k) {
    CsvTable t({"p", "y", "quantile", "restriction", "exact", "rejected"});
    std::vector<bool> rej;
    for (std::size_t i = 0; i < g.cells(); ++i) {
      t.row().num(g.price(i)).num(g.income(i)).num(q[i].quantile[k]).num(q[i].restriction[k]);
      t.text(flag(q[i].exact[k])).text(flag(q[i].rejected[k]));
      rej.push_back(q[i].rejected[k]);
    }
    out.write_csv("test_quantiles_tau" + fmt_num(taus[k]) + ".csv", t);
  }
  CsvTable all({"p", "y", "rejected", "n_rejected", "exact"});
  std::vector<bool> any;
  std::size_t n_any = 0, n_inexact = 0;
  for (std::size_t i = 0; i < g.cells(); ++i) {
    const auto nr = std::count(q[i].rejected.begin(), q[i].rejected.end(), true);
    const bool ex = std::all_of(q[i].exact.begin(), q[i].exact.end(), [](bool b) { return b; });
    all.row().num(g.price(i)).num(g.income(i)).text(flag(q[i].any_rejected)).integer(nr).text(flag(ex));
    any.push_back(q[i].any_rejected);
    n_any += q[i].any_rejected;
    n_inexact += !ex;
  }
  out.write_csv("test_quantiles.csv", all);
  out.write("test_quantiles.ppm", heatmap_of(any, g));

  const std::vector<MomentCell> m = compute_moment_map(c);
  std::size_t diff = 0;
  for (std::size_t i = 0; i < g.cells(); ++i) diff += m[i].rejected != q[i].any_rejected;
  std::ostringstream r;
  r << "quantile tests over " << g.cells() << " budgets (" << c.quantiles.method << ")\n";
  for (std::size_t k = 0; k < taus.size(); ++k) {
    std::size_t n = 0;
    for (const auto& cell : q) n += cell.rejected[k];
    r << "tau " << fmt_num(taus[k]) << " rejections: " << n << "\n";
  }
  r << "any-tau rejections: " << n_any << "\n"
    << "cells with a clipped (inexact) closed form: " << n_inexact << "\n"
    << "symmetric difference vs three-moment map: " << diff << " cells ("
    << fmt_num(static_cast<double>(diff) / static_cast<double>(g.cells())) << ")\n";
  out.write("test_quantiles.txt", r.str());
  return out.written();
}

std::vector<std::string> cmd_test_bernstein(const Config& c, OutputDir& out) {
  warn_nonpositive(c);
  const Grid g = Grid::from(c.grid);
  const std::vector<BernsteinCell> b = compute_bernstein_map(c);
  CsvTable t({"p", "y", "rejected", "degree", "lp_max", "threshold"});
  std::vector<bool> rej;
  std::map<int, std::size_t> by_degree;
  for (std::size_t i = 0; i < g.cells(); ++i) {
    t.row().num(g.price(i)).num(g.income(i)).text(flag(b[i].rejected)).integer(b[i].degree);
    t.num(b[i].lp_max).num(b[i].threshold);
    rej.push_back(b[i].rejected);
    if (b[i].rejected) ++by_degree[b[i].degree];
  }
  out.write_csv("test_bernstein.csv", t);
  out.write("test_bernstein.ppm", heatmap_of(rej, g));
  std::ostringstream r;
  r << "Bernstein enumeration up to degree " << c.bernstein.max_degree << " (" << c.bernstein.method
    << ", support " << c.bernstein.support << ", " << c.bernstein.variant << ")\n";
  std::size_t total = 0;
  for (const auto& [d, n] : by_degree) {
    r << "first rejected at degree " << d << ": " << n << "\n";
    total += n;
  }
  r << "rejected: " << total << "\ninconclusive: " << g.cells() - total << "\n";
  out.write("test_bernstein.txt", r.str());
  return out.written();
}

SamplerPtr many_good_sampler(const ManyGoodConfig& m, Budget& b) {
  if (m.fixture == "gorman") return gorman_rational_fixture(to_vector(m.gorman_slope));
  if (m.fixture == "nonidentified_pair") {
    const NonidentifiedPair f = nonidentified_pair();
    b = f.anchor;
    return f.symmetric;
  }
  std::vector<Vector> shares;
  for (const auto& s : m.shares) shares.push_back(to_vector(s));
  return cobb_douglas_mixture_sampler(shares, m.weights);
}

std::vector<std::string> cmd_many_good(const Config& c, OutputDir& out) {
  const ManyGoodConfig& m = c.many_good;
  Budget b(to_vector(m.prices), m.income);
  const SamplerPtr s = many_good_sampler(m, b);
  const auto k = static_cast<int>(s->goods());
  TensorMomentOptions o;
  o.max_order = m.max_order;
  o.draws = m.draws;
  o.seed = sub_seed(c, kManyGoodSeed);
  const TensorMomentSet mc = tensor_moments_monte_carlo(*s, b, o);
  const Matrix S = slutsky_from_moments(mc);
  const NormativityReport nr = normativity_distance(mc);
  std::optional<TensorMomentSet> exact;
  if (s->enumerate(b)) exact = tensor_moments_enumerated(*s, b, m.max_order);
  const double nan = std::numeric_limits<double>::quiet_NaN();

  CsvTable t({"i", "j", "slutsky", "slutsky_se", "slutsky_exact", "normativity", "normativity_se"});
  const Matrix Sx = exact ? slutsky_from_moments(*exact) : Matrix::Constant(k, k, nan);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j)
      t.row().integer(i).integer(j).num(S(i, j)).num(mc.slutsky_se(i, j)).num(Sx(i, j))
          .num(nr.matrix(i, j)).num(nr.standard_errors(i, j));
  out.write_csv("many_good_slutsky.csv", t);

  CsvTable rt({"n", "domain", "max_value", "tolerance", "nsd"});
  std::ostringstream r;
  r << "many-good report: fixture " << m.fixture << ", " << k << " goods, " << m.draws
    << " draws\n";
  {
    const Matrix P = p_matrix(mc);
    const double se = 3.0 * mc.p_matrix_se.cwiseAbs().sum();
    const NsdReport rep = nsd_check_matrix(P, se > 0 ? std::optional<double>(se + 1e-10) : std::nullopt);
    rt.row().integer(1).text("sphere").num(rep.max_value).num(rep.tolerance).text(flag(rep.is_nsd));
    r << "P matrix (n=1): max eigenvalue " << fmt_num(rep.max_value) << ", "
      << (rep.is_nsd ? "NSD" : "NOT NSD") << "\n";
  }
  for (int n = 2; n <= m.max_order; ++n) {
    TensorNsdOptions to;
    to.directions = m.directions;
    to.seed = derive_seed(sub_seed(c, kDirectionSeed), {static_cast<std::uint64_t>(n)});
    to.domain = restriction_domain(n);
    to.tol = 3.0 * tensor_se_bound(mc.restriction_se[static_cast<std::size_t>(n - 1)]) + 1e-10;
    const NsdReport rep = nsd_check_tensor(higher_tensor_restriction(mc, n), to);
    const char* dom = to.domain == DirectionDomain::Sphere ? "sphere" : "orthant";
    rt.row().integer(n).text(dom).num(rep.max_value).num(rep.tolerance).text(flag(rep.is_nsd));
    r << "order " << n << " restriction (" << dom << "): max " << fmt_num(rep.max_value) << ", "
      << (rep.is_nsd ? "no violation found" : "VIOLATED") << "\n";
  }
  out.write_csv("many_good_restrictions.csv", rt);

  r << "normativity distance: " << fmt_num(nr.frobenius_norm) << " (se " << fmt_num(nr.norm_se)
    << ")\n";
  if (exact) {
    r << "max |Slutsky(MC) - Slutsky(exact)|: " << fmt_num((S - Sx).cwiseAbs().maxCoeff()) << "\n"
      << "exact normativity distance: " << fmt_num(normativity_distance(*exact).frobenius_norm)
      << "\n";
  }
  if (m.fixture == "nonidentified_pair") {
    const NonidentifiedPair f = nonidentified_pair();
    const TensorMomentSet a = tensor_moments_enumerated(*f.symmetric, f.anchor, 1);
    const TensorMomentSet p = tensor_moments_enumerated(*f.perturbed, f.anchor, 1);
    const double gap = (income_cross_moment(*f.perturbed, f.anchor) -
                        income_cross_moment(*f.symmetric, f.anchor)).norm();
    r << "perturbed pair: Slutsky difference "
      << fmt_num((slutsky_from_moments(a) - slutsky_from_moments(p)).norm())
      << ", E[dq/dy q'] difference " << fmt_num(gap) << "\n";
  }
  out.write("many_good.txt", r.str());
  return out.written();
}

std::vector<std::string> cmd_identity(const Config& c, OutputDir& out) {
  const auto pop = population_of(c);
  const RandomCoefficientSampler s(pop);
  const IdentityConfig& id = c.identity;
  CsvTable t({"p", "y", "n", "path", "gamma_direct", "gamma_quantile", "abs_diff", "error_bound",
              "within"});
  std::ostringstream r;
  r << "weighting identity: Gamma_n against the quantile-weighted integral\n";
  std::size_t bi = 0;
  for (const auto& bb : id.budgets) {
    const Budget b = Budget::two_good(bb[0], bb[1]);
    for (int n : id.orders) {
      const IdentityCheck cf = weighting_identity_closed_form(pop, b, n);
      const bool cf_ok = cf.abs_diff <= 1e-12 * (1.0 + std::abs(cf.gamma_direct));
      t.row().num(bb[0]).num(bb[1]).integer(n).text("closed_form").num(cf.gamma_direct);
      t.num(cf.gamma_via_quantiles).num(cf.abs_diff).num(cf.error_bound).text(flag(cf_ok));
      const std::uint64_t seed =
          derive_seed(sub_seed(c, kIdentitySeed), {bi, static_cast<std::uint64_t>(n)});
      const IdentityCheck em = weighting_identity_check(
          s, b, n, id.draws, static_cast<std::size_t>(id.quad_points), seed, id.bandwidth);
      const bool em_ok = em.abs_diff < 3.0 * em.error_bound;
      t.row().num(bb[0]).num(bb[1]).integer(n).text("empirical").num(em.gamma_direct);
      t.num(em.gamma_via_quantiles).num(em.abs_diff).num(em.error_bound).text(flag(em_ok));
      r << "(" << fmt_num(bb[0]) << ", " << fmt_num(bb[1]) << ") n=" << n
        << ": closed-form gap " << fmt_num(cf.abs_diff) << (cf_ok ? "" : " (clipped quantiles)")
        << "; empirical gap " << fmt_num(em.abs_diff) << " vs 3 x bound " << fmt_num(3.0 * em.error_bound)
        << (em_ok ? "" : " EXCEEDED") << "\n";
    }
    ++bi;
  }
  out.write_csv("identity.csv", t);
  out.write("identity.txt", r.str());
  return out.written();
}

CrossSection load_data(const Config& c, OutputDir& out) {
  const EstimationConfig& e = c.estimation;
  if (!e.data.empty()) return read_cross_section(e.data);
  const RandomCoefficientSampler s(population_of(c));
  const BudgetLaw law{c.grid.p_min, c.grid.p_max, c.grid.y_min, c.grid.y_max};
  CrossSection d = generate_cross_section(s, law, e.synthetic_rows, e.noise_sd, sub_seed(c, kDataSeed));
  CsvTable t({"p", "y", "q"});
  for (std::size_t i = 0; i < d.size(); ++i) t.row().num(d.p[i]).num(d.y[i]).num(d.q[i]);
  out.write_csv("synthetic_data.csv", t);
  return d;
}

Bandwidth bandwidth_of(const EstimationConfig& e, const CrossSection& d) {
  if (!e.bandwidth) return silverman_bandwidth(d);
  const auto& h = *e.bandwidth;
  return h.size() == 1 ? Bandwidth(h[0]) : Bandwidth(h[0], h[1]);
}

Kernel kernel_of(const EstimationConfig& e) {
  return e.kernel == "epanechnikov" ? Kernel::Epanechnikov : Kernel::Gaussian;
}

std::vector<std::string> cmd_estimate(const Config& c, OutputDir& out) {
  const EstimationConfig& e = c.estimation;
  const CrossSection d = load_data(c, out);
  const Budget b = Budget::two_good(e.budget[0], e.budget[1]);
  const Bandwidth bw = bandwidth_of(e, d);
  SlopeEstimate est = local_linear_moments(d, b, e.orders, bw, kernel_of(e));
  est.V = bootstrap_covariance(d, b, e.orders, bw, kernel_of(e), e.n_boot, sub_seed(c, kBootstrapSeed));
  CsvTable t({"order", "alpha", "beta_p", "beta_y", "se_beta_p", "se_beta_y"});
  for (std::size_t i = 0; i < e.orders.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(2 * i);
    t.row().integer(e.orders[i]).num(est.alpha[i]).num(est.beta_p[i]).num(est.beta_y[i]);
    t.num(std::sqrt(est.V(k, k))).num(std::sqrt(est.V(k + 1, k + 1)));
  }
  out.write_csv("estimate.csv", t);
  CsvTable cv({"row", "col", "cov"});
  for (Eigen::Index i = 0; i < est.V.rows(); ++i)
    for (Eigen::Index j = 0; j < est.V.cols(); ++j) cv.row().integer(i).integer(j).num(est.V(i, j));
  out.write_csv("estimate_cov.csv", cv);
  std::ostringstream r;
  r << "local linear moment slopes at (" << fmt_num(e.budget[0]) << ", " << fmt_num(e.budget[1])
    << ")\nrows: " << d.size() << "\nbandwidth: " << fmt_num(bw.h_p) << ", " << fmt_num(bw.h_y)
    << "\nkernel: " << e.kernel << "\nbootstrap replicates: " << e.n_boot << "\n";
  for (std::size_t i = 0; i < e.orders.size(); ++i)
    r << "M_" << e.orders[i] << ": level " << fmt_num(est.alpha[i]) << ", dp " << fmt_num(est.beta_p[i])
      << ", dy " << fmt_num(est.beta_y[i]) << "\n";
  out.write("estimate.txt", r.str());
  return out.written();
}

std::vector<std::string> cmd_shrink(const Config& c, OutputDir& out) {
  const EstimationConfig& e = c.estimation;
  const CrossSection d = load_data(c, out);
  const Budget b = Budget::two_good(e.budget[0], e.budget[1]);
  EbOptions o;
  o.orders = e.orders;
  if (e.bandwidth) o.bandwidth = bandwidth_of(e, d);
  o.kernel = kernel_of(e);
  o.n_boot = e.n_boot;
  o.tau2_grid = e.tau2_grid;
  o.seed = sub_seed(c, kBootstrapSeed);
  const ShrinkageResult res = eb_estimate(d, b, o);
  CsvTable t({"index", "order", "slope", "beta_hat", "beta_0", "beta_eb"});
  for (Eigen::Index i = 0; i < res.beta_hat.size(); ++i) {
    t.row().integer(i).integer(e.orders[static_cast<std::size_t>(i / 2)]).text(i % 2 ? "y" : "p");
    t.num(res.beta_hat[i]).num(res.beta_0[i]).num(res.beta_eb[i]);
  }
  out.write_csv("shrink.csv", t);
  CsvTable st({"tau2", "sure"});
  for (const SurePoint& pt : res.sure_curve) st.row().num(pt.tau2).num(pt.sure);
  out.write_csv("shrink_sure.csv", st);
  const Matrix G = b0_constraints(e.orders);
  std::ostringstream r;
  r << "empirical Bayes shrinkage toward B0 at (" << fmt_num(e.budget[0]) << ", "
    << fmt_num(e.budget[1]) << ")\nrows: " << d.size() << "\nselected tau2: " << fmt_num(res.tau2)
    << "\n";
  if (G.rows() > 0) {
    r << "max B0 constraint, beta_hat: " << fmt_num((G * res.beta_hat).maxCoeff()) << "\n"
      << "max B0 constraint, beta_0: " << fmt_num((G * res.beta_0).maxCoeff()) << "\n"
      << "max B0 constraint, beta_eb: " << fmt_num((G * res.beta_eb).maxCoeff()) << "\n";
  }
  out.write("shrink.txt", r.str());
  return out.written();
}

using CommandFn = std::vector<std::string> (*)(const Config&, OutputDir&);

const std::vector<std::pair<std::string, CommandFn>>& registry() {
  static const std::vector<std::pair<std::string, CommandFn>> r = {
      {"share-map", cmd_share_map},       {"test-moments", cmd_test_moments},
      {"test-bernstein", cmd_test_bernstein}, {"test-quantiles", cmd_test_quantiles},
      {"many-good", cmd_many_good},       {"identity", cmd_identity},
      {"estimate", cmd_estimate},         {"shrink", cmd_shrink},
  };
  return r;
}

}  // namespace

Grid Grid::from(const GridConfig& g) {
  return {linspace(g.p_min, g.p_max, g.n_p), linspace(g.y_min, g.y_max, g.n_y)};
}

Budget Grid::at(std::size_t cell) const { return Budget::two_good(price(cell), income(cell)); }

RandomCoefficientPopulation population_of(const Config& c) {
  const auto& p = c.population;
  return {p.a_p, p.b_p, p.a_y, p.b_y};
}

std::vector<double> compute_share_map(const Config& c) {
  const Grid g = Grid::from(c.grid);
  const auto pop = population_of(c);
  const std::uint64_t seed = sub_seed(c, kShareSeed);
  std::vector<double> out(g.cells());
  parallel_for(g.cells(), [&](std::size_t i) {
    const Budget b = g.at(i);
    if (c.share.method == "analytic")
      out[i] = rc_irrational_share(pop, b, AnalyticQuadrature{static_cast<std::size_t>(c.share.quad_points)});
    else
      out[i] = rc_irrational_share(pop, b, MonteCarloShare{c.share.draws, moment_seed(seed, b, 0)});
  });
  return out;
}

std::vector<MomentCell> compute_moment_map(const Config& c) {
  const Grid g = Grid::from(c.grid);
  const auto pop = population_of(c);
  const RandomCoefficientSampler s(pop);
  const std::uint64_t seed = sub_seed(c, kMomentSeed);
  const bool mc = c.moments.method == "monte_carlo";
  std::vector<MomentCell> out(g.cells());
  parallel_for(g.cells(), [&](std::size_t i) {
    const Budget b = g.at(i);
    const MomentSet ms = mc ? monte_carlo_moments(s, b, 3, {c.moments.draws, moment_seed(seed, b, 3)})
                            : rc_closed_form_moments(pop, b, 3);
    const TranslationSet ts = translations(ms);
    const SupportBounds sb = rc_support_bounds(pop, b);
    MomentCell& x = out[i];
    x.gamma0 = ts[0];
    x.gamma1 = ts[1];
    const double se0 = ts.standard_errors[0];
    const double se1 = ts.standard_errors[1];
    x.rejected_two = x.gamma0 > c.moments.tol + 3.0 * se0;
    x.positive = sb.positive && sb.q_min > 0.0;
    if (!x.positive) {
      x.rejected = false;
      return;
    }
    const double tol = c.moments.tol + 3.0 * (sb.q_max * se0 + se1);
    const TestVerdict v = four_inequality_test(x.gamma0, x.gamma1, sb.q_min, sb.q_max, tol);
    x.ineq3 = v.witnesses[2].value;
    x.ineq4 = v.witnesses[3].value;
    x.rejected = v.rejected;
  });
  return out;
}

std::vector<QuantileCell> compute_quantile_map(const Config& c) {
  const Grid g = Grid::from(c.grid);
  const auto pop = population_of(c);
  const RandomCoefficientSampler s(pop);
  const std::uint64_t seed = sub_seed(c, kQuantileSeed);
  const auto& taus = c.quantiles.taus;
  const bool emp = c.quantiles.method == "empirical";
  std::vector<QuantileCell> out(g.cells());
  parallel_for(g.cells(), [&](std::size_t i) {
    const Budget b = g.at(i);
    const QuantileFn fn = emp ? empirical_quantile_fn(s, b, c.quantiles.draws, moment_seed(seed, b, 0),
                                                      c.quantiles.bandwidth)
                              : QuantileFn::closed_form(pop, b);
    QuantileCell& x = out[i];
    for (double tau : taus) {
      const double r = fn.restriction(tau);
      const bool rej = r > c.quantiles.tol;
      x.quantile.push_back(fn.quantile(tau));
      x.restriction.push_back(r);
      x.exact.push_back(fn.exact(tau));
      x.rejected.push_back(rej);
      x.any_rejected = x.any_rejected || rej;
    }
  });
  return out;
}

std::vector<BernsteinCell> compute_bernstein_map(const Config& c) {
  const Grid g = Grid::from(c.grid);
  const auto pop = population_of(c);
  const RandomCoefficientSampler s(pop);
  const BernsteinConfig& bc = c.bernstein;
  const std::uint64_t seed = sub_seed(c, kBernsteinSeed);
  LpTestOptions lo;
  lo.grid_size = bc.grid_size;
  lo.tol = bc.tol;
  lo.variant = bc.variant == "per_grid_point" ? LpVariant::PerGridPoint : LpVariant::AllGridPoints;
  std::vector<BernsteinCell> out(g.cells());
  parallel_for(g.cells(), [&](std::size_t i) {
    const Budget b = g.at(i);
    const SupportBounds sb = rc_support_bounds(pop, b);
    BernsteinCell& x = out[i];
    if (!(sb.positive && sb.q_min > 0.0)) return;  // refused
    const Support sup = bc.support == "affordable" ? Support::affordable(b) : Support::of(sb);
    if (bc.method == "closed_form") {
      const auto gamma = [&](int n) { return rc_gamma_exact(pop, b, n); };
      const EnumerationResult r = enumeration_test(gamma, bc.max_degree, sup, lo);
      x.rejected = r.rejected();
      x.degree = r.degree;
      x.lp_max = r.verdict.worst_slack;
      x.threshold = r.verdict.tolerance;
      return;
    }
    for (int d = 1; d <= bc.max_degree; ++d) {
      const BernsteinTranslations bt =
          bernstein_translations(s, b, d, bc.draws, moment_seed(seed, b, d), sup);
      const TestVerdict v = bernstein_lp_test(bt, lo);
      x.lp_max = v.worst_slack;
      x.threshold = v.tolerance;
      if (v.rejected) {
        x.rejected = true;
        x.degree = d;
        return;
      }
    }
  });
  return out;
}

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (const auto& [k, f] : registry()) n.push_back(k);
    return n;
  }();
  return names;
}

std::vector<std::string> run_command(const std::string& name, const Config& c,
                                     const std::filesystem::path& out) {
  for (const auto& [k, f] : registry()) {
    if (k != name) continue;
    OutputDir dir(out);
    dir.write("config.json", serialize_config(c));
    return f(c, dir);
  }
  throw ConfigError("unknown subcommand '" + name + "'");
}

}  // namespace mrt::cli
