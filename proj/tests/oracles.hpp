// Test-side reference computations, written against the textbook formulas
// rather than against the library internals.
#ifndef SGW_TESTS_ORACLES_HPP
#define SGW_TESTS_ORACLES_HPP

#include <cmath>
#include <complex>
#include <functional>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;
inline constexpr double pi = 3.14159265358979323846;
inline const cplx I{0.0, 1.0};

inline cplx block(double a, double delta, int e, cplx z) {
  const cplx w = z + I * delta;
  const double s = std::sin(pi * a);
  const cplx v = (std::sinh(w) + I * s) / (std::sinh(w) - I * s);
  return e == 1 ? v : 1.0 / v;
}

struct Blk {
  double a, delta;
  int e;
};

inline cplx product(int sign, const std::vector<Blk>& bs, cplx z) {
  cplx v = double(sign);
  for (const auto& b : bs) v *= block(b.a, b.delta, b.e, z);
  return v;
}

// Winding number of f around the rectangle [x0,x1] x [y0,y1], i.e. zeros
// minus poles inside.
inline int winding(const std::function<cplx(cplx)>& f, double x0, double x1, double y0, double y1,
                   int per_side = 800) {
  const cplx c[5] = {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}, {x0, y0}};
  double total = 0.0;
  cplx prev = f(c[0]);
  for (int s = 0; s < 4; ++s) {
    for (int j = 1; j <= per_side; ++j) {
      const cplx z = c[s] + (c[s + 1] - c[s]) * (double(j) / per_side);
      const cplx v = f(z);
      total += std::arg(v / prev);
      prev = v;
    }
  }
  return static_cast<int>(std::lround(total / (2 * pi)));
}

struct Singularity {
  double im;  // centre of the slice where it was found
  int net;    // zeros minus poles
};

// Slices the band |Re| < half_width, Im in [lo, hi] into n pieces and reports
// every slice with nonzero winding. Slice edges are offset so that typical
// rational multiples of pi fall inside slices.
inline std::vector<Singularity> scan_axis(const std::function<cplx(cplx)>& f, double lo, double hi,
                                          int n = 400, double half_width = 0.05) {
  std::vector<Singularity> out;
  const double h = (hi - lo) / n;
  for (int j = 0; j < n; ++j) {
    const double y0 = lo + j * h, y1 = y0 + h;
    const int w = winding(f, -half_width, half_width, y0, y1, 200);
    if (w != 0) out.push_back({0.5 * (y0 + y1), w});
  }
  return out;
}

inline cplx contour_residue(const std::function<cplx(cplx)>& f, cplx z0, double r = 2e-3, int n = 256) {
  cplx s = 0.0;
  for (int j = 0; j < n; ++j) {
    const cplx e = std::exp(I * (2 * pi * (j + 0.5) / n));
    s += f(z0 + r * e) * r * e;
  }
  return s / double(n);
}

}  // namespace oracle

#endif
