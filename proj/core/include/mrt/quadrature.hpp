#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace mrt {

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Computes the n-point rule by Newton iteration on P_n. Cached per n.
const GaussLegendreRule& gauss_legendre(std::size_t n);

/// Integrates f over [a, b] with the n-point rule.
double integrate_gauss_legendre(const std::function<double(double)>& f, double a, double b,
                                std::size_t n = 64);

}  // namespace mrt
