#include "sgw/amplitude.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "sgw/error.hpp"

namespace sgw {

namespace {

constexpr cplx kI{0.0, 1.0};

bool is_integer(double a) { return std::abs(a - std::round(a)) < 1e-14; }

// Singular points of B_a on the imaginary w-axis, as Im w / pi modulo 2.
struct Roots {
  double pole1, pole2;  // a, 1 - a
  double zero1, zero2;  // -a, 1 + a
};

Roots roots_of(double a) { return {a, 1.0 - a, -a, 1.0 + a}; }

// Distance (in units of pi) from t to the lattice c + 2Z.
double lattice_dist(double t, double c) {
  const double k = std::round((t - c) / 2.0);
  return std::abs(t - c - 2.0 * k);
}

// Local power of B_a at w (positive for zeros, negative for poles); w is
// considered on a root when |w - root| < tol (absolute, in rapidity units).
int raw_local_power(double a, cplx w, double tol) {
  if (std::abs(w.real()) >= tol) return 0;
  const double t = w.imag() / kPi;
  const double tt = tol / kPi;
  const Roots r = roots_of(a);
  int p = 0;
  if (lattice_dist(t, r.pole1) < tt) --p;
  if (lattice_dist(t, r.pole2) < tt) --p;
  if (lattice_dist(t, r.zero1) < tt) ++p;
  if (lattice_dist(t, r.zero2) < tt) ++p;
  return p;
}

int block_local_power(const Block& b, cplx zeta, double tol) {
  return b.exponent() * raw_local_power(b.a(), zeta + kI * b.shift(), tol);
}

cplx raw_block(double a, cplx w) {
  const double s = std::sin(kPi * a);
  if (std::abs(w.real()) > 20.0) {
    const cplx u = kI * s / std::sinh(w);
    return (1.0 + u) / (1.0 - u);
  }
  const cplx sh = std::sinh(w);
  return (sh + kI * s) / (sh - kI * s);
}

// Leading Laurent coefficient of B_a at a point w0 of local power p.
cplx raw_leading(double a, cplx w0, int p) {
  const double s = std::sin(kPi * a);
  const cplx N = std::sinh(w0) + kI * s;
  const cplx D = std::sinh(w0) - kI * s;
  switch (p) {
    case 0: return N / D;
    case -1: return N / std::cosh(w0);
    case 1: return std::cosh(w0) / D;
    case -2: return N / (0.5 * std::sinh(w0));
    case 2: return 0.5 * std::sinh(w0) / D;
    default: fail(ErrorCode::Internal, "unexpected local power of block");
  }
}

cplx direct_product(const Amplitude& A, cplx zeta, const AmplitudeOptions& opt) {
  cplx v = static_cast<double>(A.sign());
  for (const auto& b : A.blocks()) v *= eval_block(b, zeta, opt);
  return v;
}

struct Point {
  double im;  // units of pi
  int order;
};

// All singular points (poles and zeros) of A with Im in [lo, hi] (units of
// pi), merged. Order > 0 for poles.
std::vector<Point> enumerate(const Amplitude& A, double lo, double hi, double tol) {
  std::vector<Point> raw;
  for (const auto& b : A.blocks()) {
    const double d = b.shift() / kPi;
    const Roots r = roots_of(b.a());
    const double cs[4] = {r.pole1, r.pole2, r.zero1, r.zero2};
    const int ord[4] = {1, 1, -1, -1};
    for (int j = 0; j < 4; ++j) {
      // Im zeta / pi = c + 2k - d
      const double base = cs[j] - d;
      const double kmin = std::ceil((lo - tol - base) / 2.0);
      for (double k = kmin;; k += 1.0) {
        const double t = base + 2.0 * k;
        if (t > hi + tol) break;
        raw.push_back({t, ord[j] * b.exponent()});
      }
    }
  }
  std::sort(raw.begin(), raw.end(), [](const Point& x, const Point& y) { return x.im < y.im; });
  std::vector<Point> merged;
  for (const auto& p : raw) {
    if (!merged.empty() && std::abs(p.im - merged.back().im) <= tol) {
      merged.back().order += p.order;
    } else {
      merged.push_back(p);
    }
  }
  return merged;
}

ComplexRapidity snap_to_pole(const Amplitude& A, ComplexRapidity z0, const AmplitudeOptions& opt,
                             int& order) {
  const double t = z0.im / kPi;
  const auto pts = enumerate(A, t - 1e-6, t + 1e-6, opt.merge_tol);
  order = 0;
  if (std::abs(z0.re) > 1e-8 || pts.empty()) return z0;
  const Point* best = nullptr;
  for (const auto& p : pts)
    if (!best || std::abs(p.im - t) < std::abs(best->im - t)) best = &p;
  if (std::abs(best->im - t) * kPi > 1e-8) return z0;
  order = best->order;
  return {0.0, best->im * kPi};
}

}  // namespace

Block::Block(double a, double shift, int exponent) : a_(a), shift_(shift), exponent_(exponent) {
  if (!std::isfinite(a) || !std::isfinite(shift)) fail(ErrorCode::DomainError, "block parameters must be finite");
  if (a == 0.0 || is_integer(a)) fail(ErrorCode::DomainError, "block parameter a must be non-integer");
  if (exponent != 1 && exponent != -1) fail(ErrorCode::DomainError, "block exponent must be +1 or -1");
}

Amplitude::Amplitude(int sign, std::vector<Block> blocks) : sign_(sign), blocks_(std::move(blocks)) {
  if (sign != 1 && sign != -1) fail(ErrorCode::DomainError, "amplitude sign must be +1 or -1");
}

Amplitude Amplitude::operator*(const Amplitude& other) const {
  std::vector<Block> bs = blocks_;
  bs.insert(bs.end(), other.blocks_.begin(), other.blocks_.end());
  return Amplitude(sign_ * other.sign_, std::move(bs));
}

Amplitude Amplitude::shifted(double delta) const {
  std::vector<Block> bs;
  bs.reserve(blocks_.size());
  for (const auto& b : blocks_) bs.emplace_back(b.a(), b.shift() + delta, b.exponent());
  return Amplitude(sign_, std::move(bs));
}

cplx eval_block(const Block& b, cplx zeta, const AmplitudeOptions& opt) {
  const cplx w = zeta + kI * b.shift();
  if (block_local_power(b, zeta, opt.pole_eps) < 0)
    fail(ErrorCode::PoleProximity, "evaluation point within pole_eps of a block pole");
  const cplx v = raw_block(b.a(), w);
  return b.exponent() == 1 ? v : 1.0 / v;
}

cplx eval_block(const Block& b, ComplexRapidity zeta, const AmplitudeOptions& opt) {
  return eval_block(b, zeta.value(), opt);
}

cplx eval_amplitude(const Amplitude& A, cplx zeta, const AmplitudeOptions& opt) {
  // Near a block singularity, decide from the net order whether the point is
  // a genuine pole or a removable one.
  const double near = std::max(opt.pole_eps, 1e-5);
  bool close = false;
  for (const auto& b : A.blocks())
    if (raw_local_power(b.a(), zeta + kI * b.shift(), near) != 0) close = true;
  if (!close) return direct_product(A, zeta, opt);

  int net = 0;
  for (const auto& b : A.blocks()) net -= block_local_power(b, zeta, opt.pole_eps);
  if (net > 0) fail(ErrorCode::PoleProximity, "evaluation point within pole_eps of a pole");
  bool on_singular = false;
  for (const auto& b : A.blocks())
    if (block_local_power(b, zeta, opt.pole_eps) != 0) on_singular = true;
  if (!on_singular) {
    // close to, but not on, a singular point; a removable neighbour still
    // costs digits, so average whenever any order cancels nearby
    int net_near = 0;
    bool any_pole = false;
    for (const auto& b : A.blocks()) {
      const int p = block_local_power(b, zeta, near);
      net_near -= p;
      if (p < 0) any_pole = true;
    }
    if (!any_pole || net_near > 0) return direct_product(A, zeta, opt);
  }
  constexpr int kNodes = 16;
  const double r = opt.contour_radius;
  cplx sum = 0.0;
  for (int j = 0; j < kNodes; ++j) {
    const double t = 2.0 * kPi * j / kNodes;
    sum += direct_product(A, zeta + r * cplx(std::cos(t), std::sin(t)), opt);
  }
  return sum / static_cast<double>(kNodes);
}

cplx eval_amplitude(const Amplitude& A, ComplexRapidity zeta, const AmplitudeOptions& opt) {
  return eval_amplitude(A, zeta.value(), opt);
}

std::vector<PoleData> poles_in_strip(const Amplitude& A, const AmplitudeOptions& opt) {
  std::vector<PoleData> out;
  for (const auto& p : enumerate(A, 0.0, 1.0, opt.merge_tol)) {
    if (p.order <= 0) continue;
    PoleData pd;
    pd.location = {0.0, std::clamp(p.im, 0.0, 1.0) * kPi};
    pd.order = p.order;
    out.push_back(pd);
  }
  return out;
}

std::vector<PoleData> zeros_in_strip(const Amplitude& A, const AmplitudeOptions& opt) {
  std::vector<PoleData> out;
  for (const auto& p : enumerate(A, 0.0, 1.0, opt.merge_tol)) {
    if (p.order >= 0) continue;
    PoleData pd;
    pd.location = {0.0, std::clamp(p.im, 0.0, 1.0) * kPi};
    pd.order = -p.order;
    out.push_back(pd);
  }
  return out;
}

int net_order_at(const Amplitude& A, double im, const AmplitudeOptions& opt) {
  const double t = im / kPi;
  for (const auto& p : enumerate(A, t - 2 * opt.merge_tol, t + 2 * opt.merge_tol, opt.merge_tol))
    if (std::abs(p.im - t) <= opt.merge_tol) return p.order;
  return 0;
}

cplx residue_analytic(const Amplitude& A, ComplexRapidity z0, const AmplitudeOptions& opt) {
  int order = 0;
  const ComplexRapidity z = snap_to_pole(A, z0, opt, order);
  if (order != 1) fail(ErrorCode::NotASimplePole, "residue requested at a point that is not a simple pole");
  const double tol = opt.merge_tol * kPi * 4.0;
  cplx c = static_cast<double>(A.sign());
  int total = 0;
  for (const auto& b : A.blocks()) {
    const cplx w0 = z.value() + kI * b.shift();
    const int p = raw_local_power(b.a(), w0, tol);
    // evaluate at the exact lattice point to avoid cancellation
    cplx w_exact = w0;
    if (p != 0) w_exact = cplx(0.0, w0.imag());
    cplx lc = raw_leading(b.a(), w_exact, p);
    if (b.exponent() == -1) lc = 1.0 / lc;
    c *= lc;
    total += b.exponent() * p;
  }
  if (total != -1) fail(ErrorCode::NotASimplePole, "net Laurent order is not -1");
  return c;
}

cplx residue_contour(const Amplitude& A, ComplexRapidity z0, const AmplitudeOptions& opt) {
  int order = 0;
  const ComplexRapidity z = snap_to_pole(A, z0, opt, order);
  const int n = opt.contour_nodes;
  const double r = opt.contour_radius;
  cplx sum = 0.0;
  for (int j = 0; j < n; ++j) {
    const double t = 2.0 * kPi * j / n;
    const cplx e(std::cos(t), std::sin(t));
    sum += eval_amplitude(A, z.value() + r * e, opt) * (r * e);
  }
  return sum / static_cast<double>(n);
}

cplx residue(const Amplitude& A, ComplexRapidity z0, const AmplitudeOptions& opt) {
  const cplx an = residue_analytic(A, z0, opt);
  const cplx ct = residue_contour(A, z0, opt);
  const double rel = std::abs(an - ct) / std::max(std::abs(an), 1e-300);
  if (!(rel <= opt.residue_rel_tol)) {
    std::ostringstream os;
    os << "analytic residue " << an << " vs contour " << ct << " (rel " << rel << ")";
    fail(ErrorCode::OracleMismatch, os.str());
  }
  return an;
}

VerificationReport verify_axioms(const Amplitude& A, std::span<const double> grid, double tol,
                                 const AmplitudeOptions& opt) {
  VerificationReport rep;
  rep.subject = "axioms";
  double unit = 0.0, refl = 0.0, cross = 0.0;
  for (double th : grid) {
    const cplx v = eval_amplitude(A, cplx(th, 0.0), opt);
    const cplx vm = eval_amplitude(A, cplx(-th, 0.0), opt);
    unit = std::max(unit, std::abs(v * std::conj(v) - 1.0));
    refl = std::max(refl, std::abs(vm * v - 1.0));
    const cplx vc = eval_amplitude(A, cplx(-th, kPi), opt);
    cross = std::max(cross, std::abs(vc - v) / std::max(1.0, std::abs(v)));
  }
  // 10 x 10 strip sample, real parts kept off the imaginary axis
  for (int j = 0; j < 10; ++j) {
    for (int l = 0; l < 10; ++l) {
      const cplx z(-3.0 + 6.0 * (j + 0.5) / 10.0, kPi * (0.05 + 0.9 * l / 9.0));
      const cplx v = eval_amplitude(A, z, opt);
      const cplx vc = eval_amplitude(A, kI * kPi - z, opt);
      cross = std::max(cross, std::abs(vc - v) / std::max(1.0, std::abs(v)));
    }
  }
  rep.add("unitarity", unit, tol);
  rep.add("crossing", cross, tol);
  rep.add("reflection", refl, tol);
  return rep;
}

std::string serialize(const Amplitude& A) {
  std::string out = "amplitude v1\n";
  char buf[128];
  std::snprintf(buf, sizeof buf, "sign %d\n", A.sign());
  out += buf;
  for (const auto& b : A.blocks()) {
    std::snprintf(buf, sizeof buf, "block %.17g %.17g %d\n", b.a(), b.shift(), b.exponent());
    out += buf;
  }
  out += "end\n";
  return out;
}

Amplitude deserialize_amplitude(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "amplitude v1") fail(ErrorCode::ParseError, "missing amplitude header");
  int sign = 0;
  std::vector<Block> blocks;
  bool have_sign = false, ended = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag == "sign") {
      if (!(ls >> sign)) fail(ErrorCode::ParseError, "bad sign line");
      have_sign = true;
    } else if (tag == "block") {
      std::string sa, sd;
      int e = 0;
      if (!(ls >> sa >> sd >> e)) fail(ErrorCode::ParseError, "bad block line");
      blocks.emplace_back(std::strtod(sa.c_str(), nullptr), std::strtod(sd.c_str(), nullptr), e);
    } else if (tag == "end") {
      ended = true;
      break;
    } else {
      fail(ErrorCode::ParseError, "unknown record '" + tag + "'");
    }
  }
  if (!have_sign || !ended) fail(ErrorCode::ParseError, "truncated amplitude record");
  return Amplitude(sign, std::move(blocks));
}

std::ostream& operator<<(std::ostream& os, const Amplitude& A) { return os << serialize(A); }

}  // namespace sgw
