#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace mrt {

/// Order-n symmetric tensor over k goods. Only the C(n+k-1, n) distinct
/// entries are stored, keyed by the sorted multi-index, so every permutation
/// of an index addresses the same entry.
class SymmetricTensor {
 public:
  SymmetricTensor() = default;
  SymmetricTensor(int order, int dim);

  /// Entries q_{a_1} ... q_{a_n} of the n-fold outer power of q.
  static SymmetricTensor rank_one(const Eigen::VectorXd& q, int order);
  static SymmetricTensor from_matrix(const Eigen::MatrixXd& symmetric);

  int order() const noexcept { return order_; }
  int dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return data_.size(); }

  double operator()(std::span<const int> index) const;
  double& operator()(std::span<const int> index);
  double operator()(std::initializer_list<int> index) const;

  /// Sorted multi-index of stored entry r.
  const std::vector<int>& multi_index(std::size_t r) const { return (*indices_)[r]; }
  /// Number of distinct orderings of stored entry r.
  double multiplicity(std::size_t r) const { return (*multiplicity_)[r]; }

  std::vector<double>& data() noexcept { return data_; }
  const std::vector<double>& data() const noexcept { return data_; }

  /// Dense k x k matrix of an order-2 tensor.
  Eigen::MatrixXd to_matrix() const;
  double max_abs() const;

  SymmetricTensor& operator+=(const SymmetricTensor& o);
  SymmetricTensor& operator*=(double s);

 private:
  std::size_t rank(std::span<const int> sorted) const;
  std::size_t locate(std::span<const int> index) const;

  int order_ = 0;
  int dim_ = 0;
  std::vector<double> data_;
  std::shared_ptr<const std::vector<std::vector<int>>> indices_;
  std::shared_ptr<const std::vector<double>> multiplicity_;
};

SymmetricTensor operator+(SymmetricTensor a, const SymmetricTensor& b);
SymmetricTensor operator*(double s, SymmetricTensor a);

/// T(v, ..., v) = sum over stored entries of multiplicity * entry * prod v_{a_i}.
double tensor_form(const SymmetricTensor& T, const Eigen::VectorXd& v);

}  // namespace mrt
