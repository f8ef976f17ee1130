#include "config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "mrt/error.hpp"

namespace mrt::cli {

using nlohmann::json;

namespace {

// Reads fields out of one JSON object and rejects keys nobody asked for.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(where() + ": expected an object");
  }

  template <class T>
  void get(const char* key, T& dst) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) return;
    try {
      dst = it->template get<T>();
    } catch (const json::exception&) {
      throw ConfigError(where() + "." + key + ": wrong type (" + it->type_name() + ")");
    }
  }

  template <class T>
  void get_optional(const char* key, std::optional<T>& dst) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) return;
    if (it->is_null()) {
      dst.reset();
      return;
    }
    T v{};
    get(key, v);
    dst = std::move(v);
  }

  Section sub(const char* key) {
    seen_.insert(key);
    auto it = j_.find(key);
    static const json empty = json::object();
    return Section(it == j_.end() ? empty : *it, path_ + "." + key);
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) throw ConfigError(where() + ": unknown key '" + it.key() + "'");
  }

 private:
  std::string where() const { return path_; }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void require(bool ok, const std::string& msg) {
  if (!ok) throw ConfigError(msg);
}

bool finite_positive(double v) { return std::isfinite(v) && v > 0.0; }

}  // namespace

Config parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  Config c;
  Section root(j, "config");
  root.get("version", c.version);
  if (c.version != kConfigVersion)
    throw ConfigError("config.version: unsupported version " + std::to_string(c.version) +
                      " (expected " + std::to_string(kConfigVersion) + ")");
  root.get("seed", c.seed);
  root.get("threads", c.threads);
  root.get("out", c.out);

  {
    Section s = root.sub("population");
    auto& p = c.population;
    s.get("a_p", p.a_p);
    s.get("b_p", p.b_p);
    s.get("a_y", p.a_y);
    s.get("b_y", p.b_y);
    s.finish();
  }
  {
    Section s = root.sub("grid");
    auto& g = c.grid;
    s.get("p_min", g.p_min);
    s.get("p_max", g.p_max);
    s.get("y_min", g.y_min);
    s.get("y_max", g.y_max);
    s.get("n_p", g.n_p);
    s.get("n_y", g.n_y);
    s.finish();
  }
  {
    Section s = root.sub("share");
    s.get("method", c.share.method);
    s.get("quad_points", c.share.quad_points);
    s.get("draws", c.share.draws);
    s.finish();
  }
  {
    Section s = root.sub("moments");
    s.get("method", c.moments.method);
    s.get("draws", c.moments.draws);
    s.get("tol", c.moments.tol);
    s.finish();
  }
  {
    Section s = root.sub("quantiles");
    auto& q = c.quantiles;
    s.get("taus", q.taus);
    s.get("method", q.method);
    s.get("draws", q.draws);
    s.get("bandwidth", q.bandwidth);
    s.get("tol", q.tol);
    s.finish();
  }
  {
    Section s = root.sub("bernstein");
    auto& b = c.bernstein;
    s.get("max_degree", b.max_degree);
    s.get("grid_size", b.grid_size);
    s.get("support", b.support);
    s.get("variant", b.variant);
    s.get("method", b.method);
    s.get("draws", b.draws);
    s.get("tol", b.tol);
    s.finish();
  }
  {
    Section s = root.sub("many_good");
    auto& m = c.many_good;
    s.get("fixture", m.fixture);
    s.get("shares", m.shares);
    s.get("weights", m.weights);
    s.get("gorman_slope", m.gorman_slope);
    s.get("prices", m.prices);
    s.get("income", m.income);
    s.get("max_order", m.max_order);
    s.get("draws", m.draws);
    s.get("directions", m.directions);
    s.finish();
  }
  {
    Section s = root.sub("identity");
    auto& i = c.identity;
    s.get("orders", i.orders);
    s.get("budgets", i.budgets);
    s.get("draws", i.draws);
    s.get("quad_points", i.quad_points);
    s.get("bandwidth", i.bandwidth);
    s.finish();
  }
  {
    const json& raw = j.contains("estimation") ? j["estimation"] : json::object();
    Section s = root.sub("estimation");
    auto& e = c.estimation;
    s.get("data", e.data);
    s.get("synthetic_rows", e.synthetic_rows);
    s.get("noise_sd", e.noise_sd);
    s.get("budget", e.budget);
    s.get("orders", e.orders);
    if (raw.is_object() && raw.contains("bandwidth") && raw["bandwidth"].is_number()) {
      std::optional<double> h;
      s.get_optional("bandwidth", h);
      e.bandwidth = std::vector<double>{*h};
    } else {
      s.get_optional("bandwidth", e.bandwidth);
    }
    s.get("kernel", e.kernel);
    s.get("n_boot", e.n_boot);
    s.get("tau2_grid", e.tau2_grid);
    s.finish();
  }
  root.finish();
  validate(c);
  return c;
}

Config load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const Config& c) {
  json j;
  j["version"] = c.version;
  j["seed"] = c.seed;
  j["threads"] = c.threads;
  j["out"] = c.out;
  const auto& p = c.population;
  j["population"] = {{"a_p", p.a_p}, {"b_p", p.b_p}, {"a_y", p.a_y}, {"b_y", p.b_y}};
  const auto& g = c.grid;
  j["grid"] = {{"p_min", g.p_min}, {"p_max", g.p_max}, {"y_min", g.y_min},
               {"y_max", g.y_max}, {"n_p", g.n_p},     {"n_y", g.n_y}};
  j["share"] = {{"method", c.share.method},
                {"quad_points", c.share.quad_points},
                {"draws", c.share.draws}};
  j["moments"] = {{"method", c.moments.method}, {"draws", c.moments.draws}, {"tol", c.moments.tol}};
  const auto& q = c.quantiles;
  j["quantiles"] = {{"taus", q.taus},   {"method", q.method},       {"draws", q.draws},
                    {"bandwidth", q.bandwidth}, {"tol", q.tol}};
  const auto& b = c.bernstein;
  j["bernstein"] = {{"max_degree", b.max_degree}, {"grid_size", b.grid_size},
                    {"support", b.support},       {"variant", b.variant},
                    {"method", b.method},         {"draws", b.draws},
                    {"tol", b.tol}};
  const auto& m = c.many_good;
  j["many_good"] = {{"fixture", m.fixture},       {"shares", m.shares},
                    {"weights", m.weights},       {"gorman_slope", m.gorman_slope},
                    {"prices", m.prices},         {"income", m.income},
                    {"max_order", m.max_order},   {"draws", m.draws},
                    {"directions", m.directions}};
  const auto& i = c.identity;
  j["identity"] = {{"orders", i.orders},           {"budgets", i.budgets},
                   {"draws", i.draws},             {"quad_points", i.quad_points},
                   {"bandwidth", i.bandwidth}};
  const auto& e = c.estimation;
  j["estimation"] = {{"data", e.data},
                     {"synthetic_rows", e.synthetic_rows},
                     {"noise_sd", e.noise_sd},
                     {"budget", e.budget},
                     {"orders", e.orders},
                     {"bandwidth", e.bandwidth ? json(*e.bandwidth) : json(nullptr)},
                     {"kernel", e.kernel},
                     {"n_boot", e.n_boot},
                     {"tau2_grid", e.tau2_grid}};
  return j.dump(2) + "\n";
}

void validate(const Config& c) {
  const auto& p = c.population;
  require(std::isfinite(p.a_p) && std::isfinite(p.b_p) && p.a_p <= p.b_p,
          "population: need a_p <= b_p");
  require(std::isfinite(p.a_y) && std::isfinite(p.b_y) && p.a_y <= p.b_y,
          "population: need a_y <= b_y");
  const auto& g = c.grid;
  require(finite_positive(g.p_min) && finite_positive(g.p_max) && g.p_min < g.p_max,
          "grid: need 0 < p_min < p_max");
  require(finite_positive(g.y_min) && finite_positive(g.y_max) && g.y_min < g.y_max,
          "grid: need 0 < y_min < y_max");
  require(g.n_p >= 2 && g.n_y >= 2, "grid: resolution must be at least 2 per axis");

  require(c.share.method == "analytic" || c.share.method == "monte_carlo",
          "share.method: expected analytic or monte_carlo");
  require(c.share.quad_points >= 2, "share.quad_points: must be at least 2");
  require(c.share.draws >= 1, "share.draws: must be positive");

  require(c.moments.method == "closed_form" || c.moments.method == "monte_carlo",
          "moments.method: expected closed_form or monte_carlo");
  require(c.moments.draws >= 2, "moments.draws: must be at least 2");
  require(std::isfinite(c.moments.tol) && c.moments.tol >= 0, "moments.tol: must be >= 0");

  const auto& q = c.quantiles;
  require(!q.taus.empty(), "quantiles.taus: empty");
  for (double t : q.taus) require(t > 0.0 && t < 1.0, "quantiles.taus: each tau must lie in (0,1)");
  require(q.method == "closed_form" || q.method == "empirical",
          "quantiles.method: expected closed_form or empirical");
  require(q.draws >= 100, "quantiles.draws: must be at least 100");
  require(q.bandwidth > 0.0 && q.bandwidth < 0.5, "quantiles.bandwidth: must lie in (0, 0.5)");
  require(std::isfinite(q.tol) && q.tol >= 0, "quantiles.tol: must be >= 0");

  const auto& b = c.bernstein;
  require(b.max_degree >= 1 && b.max_degree <= 30, "bernstein.max_degree: must lie in [1, 30]");
  require(b.grid_size >= 1, "bernstein.grid_size: must be positive");
  require(b.support == "population" || b.support == "affordable",
          "bernstein.support: expected population or affordable");
  require(b.variant == "all_grid_points" || b.variant == "per_grid_point",
          "bernstein.variant: expected all_grid_points or per_grid_point");
  require(b.method == "closed_form" || b.method == "monte_carlo",
          "bernstein.method: expected closed_form or monte_carlo");
  require(b.draws >= 2, "bernstein.draws: must be at least 2");
  require(std::isfinite(b.tol) && b.tol >= 0, "bernstein.tol: must be >= 0");

  const auto& m = c.many_good;
  require(m.fixture == "cobb_douglas_mixture" || m.fixture == "gorman" || m.fixture == "nonidentified_pair",
          "many_good.fixture: expected cobb_douglas_mixture, gorman or nonidentified_pair");
  require(!m.prices.empty(), "many_good.prices: empty");
  for (double v : m.prices) require(finite_positive(v), "many_good.prices: must be positive");
  require(finite_positive(m.income), "many_good.income: must be positive");
  require(m.max_order >= 1 && m.max_order <= 6, "many_good.max_order: must lie in [1, 6]");
  require(m.draws >= 64, "many_good.draws: must be at least 64");
  require(m.directions >= 1, "many_good.directions: must be positive");
  if (m.fixture == "cobb_douglas_mixture") {
    require(!m.shares.empty() && m.shares.size() == m.weights.size(),
            "many_good: shares and weights must be nonempty and of equal length");
    for (const auto& s : m.shares)
      require(s.size() == m.prices.size(), "many_good.shares: each row needs one share per price");
  }
  if (m.fixture == "gorman")
    require(m.gorman_slope.size() == m.prices.size(),
            "many_good.gorman_slope: needs one entry per price");
  if (m.fixture == "nonidentified_pair") require(m.prices.size() == 2, "many_good: nonidentified_pair fixture has two goods");

  const auto& i = c.identity;
  require(!i.orders.empty(), "identity.orders: empty");
  for (int n : i.orders) require(n >= 0 && n <= 12, "identity.orders: each n must lie in [0, 12]");
  require(!i.budgets.empty(), "identity.budgets: empty");
  for (const auto& bb : i.budgets)
    require(bb.size() == 2 && finite_positive(bb[0]) && finite_positive(bb[1]),
            "identity.budgets: each budget is a positive [p, y] pair");
  require(i.draws >= 100, "identity.draws: must be at least 100");
  require(i.quad_points >= 2, "identity.quad_points: must be at least 2");
  require(i.bandwidth > 0.0 && i.bandwidth < 0.5, "identity.bandwidth: must lie in (0, 0.5)");

  const auto& e = c.estimation;
  require(e.synthetic_rows >= 10, "estimation.synthetic_rows: must be at least 10");
  require(std::isfinite(e.noise_sd) && e.noise_sd >= 0, "estimation.noise_sd: must be >= 0");
  require(e.budget.size() == 2 && finite_positive(e.budget[0]) && finite_positive(e.budget[1]),
          "estimation.budget: expected a positive [p, y] pair");
  require(!e.orders.empty(), "estimation.orders: empty");
  for (int n : e.orders) require(n >= 1, "estimation.orders: orders must be >= 1");
  if (e.bandwidth) {
    require(e.bandwidth->size() == 1 || e.bandwidth->size() == 2,
            "estimation.bandwidth: expected h or [h_p, h_y]");
    for (double h : *e.bandwidth) require(finite_positive(h), "estimation.bandwidth: must be positive");
  }
  require(e.kernel == "gaussian" || e.kernel == "epanechnikov",
          "estimation.kernel: expected gaussian or epanechnikov");
  require(e.n_boot >= 2, "estimation.n_boot: must be at least 2");
  for (double t : e.tau2_grid) require(finite_positive(t), "estimation.tau2_grid: entries must be positive");
}

}  // namespace mrt::cli
