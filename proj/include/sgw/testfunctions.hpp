#ifndef SGW_TESTFUNCTIONS_HPP
#define SGW_TESTFUNCTIONS_HPP

#include <string>
#include <variant>
#include <vector>

#include "sgw/amplitude.hpp"

namespace sgw {

struct ScatteringModel;

enum class Wedge { Left, Right };

inline Wedge opposite(Wedge w) { return w == Wedge::Left ? Wedge::Right : Wedge::Left; }
std::string to_string(Wedge w);

struct SpacetimePoint {
  double x0 = 0.0;
  double x1 = 0.0;
};

/// Left: x1 < -|x0|. Right: x1 > |x0|.
bool in_wedge(Wedge w, SpacetimePoint x);
/// Euclidean distance to the wedge boundary, negative outside.
double wedge_margin(Wedge w, SpacetimePoint x);

/// Closed-form rapidity atom. On the left wedge
///   f+(z) = c exp(i p(z).x) exp(-beta (z - i pi/2 - theta0)^2),  f-(z) = f+(z + i pi);
/// on the right wedge the same form defines g- with exp(-i p(z).x), and
/// g+(z) = g-(z + i pi).
struct RapidityAtom {
  int species = 1;
  SpacetimePoint x;
  double theta0 = 0.0;
  double beta = 1.0;
  cplx coeff{1.0, 0.0};
};

/// amplitude * exp(-1 / (1 - r^2/R^2)) on the disc |x - center| < R.
struct PositionBump {
  int species = 1;
  SpacetimePoint center;
  double radius = 1.0;
  cplx amplitude{1.0, 0.0};
  int nodes = 96;
};

using Atom = std::variant<RapidityAtom, PositionBump>;

struct TestFunction {
  Wedge wedge = Wedge::Left;
  std::vector<Atom> atoms;
  /// Set only by reflect_unconjugated: transforms are taken from the
  /// opposite-wedge formulas without conjugation.
  bool scrambled = false;

  bool has_species(int k) const;
  bool only_species(int k) const;
};

struct FourierOptions {
  double tol = 1e-10;     // for the node-doubling estimate of bumps
  bool warn = false;      // throw QuadratureWarning when exceeded
};

/// f+(z) = (1/2pi) int exp(i p(z).x) f(x) d^2x for species k. Continuation
/// off the real line is certified for left-wedge data with 0 <= Im z <= pi
/// (right wedge: -pi <= Im z <= 0); elsewhere StripViolation.
cplx fourier_plus(const ScatteringModel& model, const TestFunction& f, int species, cplx zeta,
                  const FourierOptions& opt = {});
/// f-(z) with exp(-i p(z).x); certified region mirrored.
cplx fourier_minus(const ScatteringModel& model, const TestFunction& f, int species, cplx zeta,
                   const FourierOptions& opt = {});

/// Same transforms without the certification check, for diagnostics on
/// entire (atom) data.
cplx fourier_plus_unchecked(const ScatteringModel& model, const TestFunction& f, int species, cplx zeta);
cplx fourier_minus_unchecked(const ScatteringModel& model, const TestFunction& f, int species, cplx zeta);

/// Node-doubling error estimate of a bump transform at z.
double bump_quadrature_error(const ScatteringModel& model, const PositionBump& b, Wedge w, cplx zeta, int sign);

/// g_j(x) = conj g(-x); flips the wedge.
TestFunction reflect(const TestFunction& g);
/// Negative control: relabels g as its reflection but keeps g's transforms.
TestFunction reflect_unconjugated(const TestFunction& g);
/// f*(x) = conj f(x).
TestFunction star(const TestFunction& f);
/// True when every coefficient is real (f = f*).
bool is_real(const TestFunction& f);
TestFunction scaled(const TestFunction& f, cplx s);

struct SupportCertificate {
  bool ok = false;
  double margin = 0.0;      // distance to the boundary minus the radius
  double strip_sup = 0.0;   // sampled sup of |f+| (left) or |g-| (right)
  double strip_bound = 0.0; // analytic bound
  std::string detail;
};

SupportCertificate wedge_support_check(const ScatteringModel& model, const Atom& atom, Wedge w);
SupportCertificate wedge_support_check(const ScatteringModel& model, const TestFunction& f);

}  // namespace sgw

#endif  // SGW_TESTFUNCTIONS_HPP
