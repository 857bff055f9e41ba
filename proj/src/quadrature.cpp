#include "sgw/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

#include "sgw/error.hpp"

namespace sgw {

Rule gauss_legendre(int n, double lo, double hi) {
  if (n < 1) fail(ErrorCode::InvalidArgument, "Gauss-Legendre rule needs n >= 1");
  Rule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p2) / j;
      }
      dp = n * (x * p0 - p1) / (x * x - 1.0);
      const double dx = p0 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    r.nodes[i] = mid - half * x;
    r.nodes[n - 1 - i] = mid + half * x;
    r.weights[i] = r.weights[n - 1 - i] = half * w;
  }
  return r;
}

AdaptiveResult integrate_adaptive(const std::function<std::complex<double>(double)>& f, double lo, double hi,
                                  double tol, int max_depth) {
  using boost::math::quadrature::gauss_kronrod;
  double err = 0.0;
  const auto v = gauss_kronrod<double, 15>::integrate(f, lo, hi, static_cast<unsigned>(max_depth), tol, &err);
  return {v, err};
}

}  // namespace sgw
