#include "mrt/symmetric_tensor.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <mutex>
#include <utility>

#include "mrt/error.hpp"

namespace mrt {

namespace {

double choose(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return std::round(r);
}

struct Layout {
  std::shared_ptr<const std::vector<std::vector<int>>> indices;
  std::shared_ptr<const std::vector<double>> multiplicity;
};

// Entries are enumerated in colex order of the strictly increasing sequence
// a_i + i, which is the order produced by the combinatorial rank below.
Layout make_layout(int order, int dim) {
  const std::size_t count = static_cast<std::size_t>(choose(order + dim - 1, order));
  std::vector<std::vector<int>> idx(count);
  std::vector<double> mult(count);
  std::vector<int> a(static_cast<std::size_t>(order), 0);
  double fact_n = 1.0;
  for (int i = 2; i <= order; ++i) fact_n *= i;
  std::vector<std::vector<int>> all;
  // Enumerate nondecreasing sequences, then place each at its rank.
  std::function<void(int, int)> rec = [&](int pos, int lo) {
    if (pos == order) {
      all.push_back(a);
      return;
    }
    for (int v = lo; v < dim; ++v) {
      a[static_cast<std::size_t>(pos)] = v;
      rec(pos + 1, v);
    }
  };
  rec(0, 0);
  for (const auto& s : all) {
    std::size_t r = 0;
    for (int i = 0; i < order; ++i) r += static_cast<std::size_t>(choose(s[i] + i, i + 1));
    double m = fact_n;
    for (std::size_t i = 0; i < s.size();) {
      std::size_t j = i;
      while (j < s.size() && s[j] == s[i]) ++j;
      for (std::size_t f = 2; f <= j - i; ++f) m /= static_cast<double>(f);
      i = j;
    }
    idx[r] = s;
    mult[r] = m;
  }
  return {std::make_shared<const std::vector<std::vector<int>>>(std::move(idx)),
          std::make_shared<const std::vector<double>>(std::move(mult))};
}

Layout cached_layout(int order, int dim) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, Layout> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find({order, dim});
  if (it == cache.end()) it = cache.emplace(std::make_pair(order, dim), make_layout(order, dim)).first;
  return it->second;
}

}  // namespace

SymmetricTensor::SymmetricTensor(int order, int dim) : order_(order), dim_(dim) {
  if (order < 1) throw ArgumentError("SymmetricTensor: order must be at least 1");
  if (dim < 1) throw ArgumentError("SymmetricTensor: dim must be at least 1");
  const Layout l = cached_layout(order, dim);
  indices_ = l.indices;
  multiplicity_ = l.multiplicity;
  data_.assign(indices_->size(), 0.0);
}

SymmetricTensor SymmetricTensor::rank_one(const Eigen::VectorXd& q, int order) {
  SymmetricTensor t(order, static_cast<int>(q.size()));
  for (std::size_t r = 0; r < t.size(); ++r) {
    double v = 1.0;
    for (int a : t.multi_index(r)) v *= q[a];
    t.data_[r] = v;
  }
  return t;
}

SymmetricTensor SymmetricTensor::from_matrix(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) throw ArgumentError("SymmetricTensor::from_matrix: not square");
  SymmetricTensor t(2, static_cast<int>(m.rows()));
  for (std::size_t r = 0; r < t.size(); ++r) {
    const auto& a = t.multi_index(r);
    t.data_[r] = 0.5 * (m(a[0], a[1]) + m(a[1], a[0]));
  }
  return t;
}

std::size_t SymmetricTensor::rank(std::span<const int> s) const {
  std::size_t r = 0;
  for (int i = 0; i < order_; ++i) r += static_cast<std::size_t>(choose(s[i] + i, i + 1));
  return r;
}

std::size_t SymmetricTensor::locate(std::span<const int> index) const {
  if (static_cast<int>(index.size()) != order_)
    throw ArgumentError("SymmetricTensor: index length does not match the order");
  int buf[16];
  std::vector<int> heap;
  int* s = buf;
  if (index.size() > 16) {
    heap.resize(index.size());
    s = heap.data();
  }
  for (std::size_t i = 0; i < index.size(); ++i) {
    if (index[i] < 0 || index[i] >= dim_) throw ArgumentError("SymmetricTensor: index out of range");
    s[i] = index[i];
  }
  std::sort(s, s + index.size());
  return rank(std::span<const int>(s, index.size()));
}

double SymmetricTensor::operator()(std::span<const int> index) const { return data_[locate(index)]; }
double& SymmetricTensor::operator()(std::span<const int> index) { return data_[locate(index)]; }
double SymmetricTensor::operator()(std::initializer_list<int> index) const {
  return (*this)(std::span<const int>(index.begin(), index.size()));
}

Eigen::MatrixXd SymmetricTensor::to_matrix() const {
  if (order_ != 2) throw ArgumentError("SymmetricTensor::to_matrix: order must be 2");
  Eigen::MatrixXd m(dim_, dim_);
  for (std::size_t r = 0; r < size(); ++r) {
    const auto& a = multi_index(r);
    m(a[0], a[1]) = m(a[1], a[0]) = data_[r];
  }
  return m;
}

double SymmetricTensor::max_abs() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

SymmetricTensor& SymmetricTensor::operator+=(const SymmetricTensor& o) {
  if (o.order_ != order_ || o.dim_ != dim_) throw ArgumentError("SymmetricTensor: shape mismatch");
  for (std::size_t r = 0; r < data_.size(); ++r) data_[r] += o.data_[r];
  return *this;
}

SymmetricTensor& SymmetricTensor::operator*=(double s) {
  for (double& v : data_) v *= s;
  return *this;
}

SymmetricTensor operator+(SymmetricTensor a, const SymmetricTensor& b) { return a += b; }
SymmetricTensor operator*(double s, SymmetricTensor a) { return a *= s; }

double tensor_form(const SymmetricTensor& T, const Eigen::VectorXd& v) {
  if (v.size() != T.dim()) throw ArgumentError("tensor_form: dimension mismatch");
  double total = 0.0;
  for (std::size_t r = 0; r < T.size(); ++r) {
    double term = T.multiplicity(r) * T.data()[r];
    for (int a : T.multi_index(r)) term *= v[a];
    total += term;
  }
  return total;
}

}  // namespace mrt
