#ifndef SGW_QUADRATURE_HPP
#define SGW_QUADRATURE_HPP

#include <complex>
#include <functional>
#include <vector>

namespace sgw {

struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule mapped to [lo, hi]; nodes increasing.
Rule gauss_legendre(int n, double lo, double hi);

struct AdaptiveResult {
  std::complex<double> value;
  double error = 0.0;
};

/// Adaptive Gauss-Kronrod (7/15) on [lo, hi] for complex integrands.
AdaptiveResult integrate_adaptive(const std::function<std::complex<double>(double)>& f, double lo, double hi,
                                  double tol = 1e-13, int max_depth = 20);

}  // namespace sgw

#endif  // SGW_QUADRATURE_HPP
