#ifndef SGW_AMPLITUDE_HPP
#define SGW_AMPLITUDE_HPP

#include <complex>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "sgw/report.hpp"

namespace sgw {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

/// Point in the complexified rapidity plane.
struct ComplexRapidity {
  double re = 0.0;
  double im = 0.0;

  constexpr ComplexRapidity() = default;
  constexpr ComplexRapidity(double r, double i) : re(r), im(i) {}
  explicit ComplexRapidity(cplx z) : re(z.real()), im(z.imag()) {}

  cplx value() const { return {re, im}; }
  bool in_strip() const { return im >= 0.0 && im <= kPi; }
  bool in_open_strip() const { return im > 0.0 && im < kPi; }
};

/// Numerical knobs shared by amplitude evaluation and residue checks.
struct AmplitudeOptions {
  double pole_eps = 1e-9;
  double contour_radius = 1e-3;
  int contour_nodes = 64;
  double residue_rel_tol = 1e-6;
  double merge_tol = 1e-12;  // in units of pi on the imaginary axis
};

/// B_a(w) = (sinh w + i sin(pi a)) / (sinh w - i sin(pi a)), evaluated at
/// w = zeta + i*shift and raised to `exponent` (+1 or -1).
class Block {
 public:
  Block(double a, double shift = 0.0, int exponent = 1);

  double a() const { return a_; }
  double shift() const { return shift_; }
  int exponent() const { return exponent_; }

  bool operator==(const Block&) const = default;

 private:
  double a_;
  double shift_;
  int exponent_;
};

enum class PoleChannel { S, T, Other };

/// Pole or zero on the imaginary axis. `order` > 0 is a pole of that order,
/// < 0 a zero. Residue is filled for simple poles only.
struct PoleData {
  ComplexRapidity location;
  int order = 1;
  cplx residue{0.0, 0.0};
  bool has_residue = false;
  PoleChannel channel = PoleChannel::Other;
};

/// sign * prod(blocks). Value semantics; immutable after construction.
class Amplitude {
 public:
  Amplitude() = default;
  explicit Amplitude(int sign, std::vector<Block> blocks = {});

  static Amplitude one() { return Amplitude(1); }

  int sign() const { return sign_; }
  const std::vector<Block>& blocks() const { return blocks_; }

  Amplitude operator*(const Amplitude& other) const;
  /// z -> A(z + i*delta)
  Amplitude shifted(double delta) const;

  bool operator==(const Amplitude&) const = default;

 private:
  int sign_ = 1;
  std::vector<Block> blocks_;
};

cplx eval_block(const Block& b, cplx zeta, const AmplitudeOptions& opt = {});
cplx eval_block(const Block& b, ComplexRapidity zeta, const AmplitudeOptions& opt = {});

/// Value of the amplitude. Removable singularities (pole cancelled by a zero
/// of another block) are evaluated as the circle mean around the point.
cplx eval_amplitude(const Amplitude& A, cplx zeta, const AmplitudeOptions& opt = {});
cplx eval_amplitude(const Amplitude& A, ComplexRapidity zeta, const AmplitudeOptions& opt = {});

/// Net poles (order > 0) with 0 <= Im <= pi, sorted by Im.
std::vector<PoleData> poles_in_strip(const Amplitude& A, const AmplitudeOptions& opt = {});
/// Net zeros (reported with positive multiplicity in `order`) in the strip.
std::vector<PoleData> zeros_in_strip(const Amplitude& A, const AmplitudeOptions& opt = {});
/// Net order (poles positive) at an imaginary-axis point, or 0.
int net_order_at(const Amplitude& A, double im, const AmplitudeOptions& opt = {});

/// Residue at a simple pole: analytic Laurent bookkeeping cross-checked by a
/// circle integral. Throws NotASimplePole / OracleMismatch.
cplx residue(const Amplitude& A, ComplexRapidity z0, const AmplitudeOptions& opt = {});
/// Analytic branch only.
cplx residue_analytic(const Amplitude& A, ComplexRapidity z0, const AmplitudeOptions& opt = {});
/// Circle-integral branch only.
cplx residue_contour(const Amplitude& A, ComplexRapidity z0, const AmplitudeOptions& opt = {});

/// Unitarity, crossing and S(-t)S(t)=1 on the given real grid plus a strip
/// sample. Crossing is measured relative to max(1, |A|).
VerificationReport verify_axioms(const Amplitude& A, std::span<const double> grid, double tol,
                                 const AmplitudeOptions& opt = {});

/// Text record: "amplitude v1", "sign <s>", one "block <a> <shift> <exp>" per
/// line, "end". Doubles use 17 significant digits.
std::string serialize(const Amplitude& A);
Amplitude deserialize_amplitude(const std::string& text);
std::ostream& operator<<(std::ostream& os, const Amplitude& A);

}  // namespace sgw

#endif  // SGW_AMPLITUDE_HPP
