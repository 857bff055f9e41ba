#include "sgw/testfunctions.hpp"

#include <cmath>

#include "sgw/error.hpp"
#include "sgw/model.hpp"
#include "sgw/quadrature.hpp"

namespace sgw {

namespace {

constexpr cplx kI{0.0, 1.0};

double species_mass(const ScatteringModel& model, int k) {
  if (k < 1 || k > model.K) fail(ErrorCode::DomainError, "species b" + std::to_string(k) + " not in the model");
  return model.mass(k);
}

cplx gaussian(const RapidityAtom& a, cplx z) {
  const cplx u = z - kI * (kPi / 2) - a.theta0;
  return std::exp(-a.beta * u * u);
}

// sign = +1 for the plus transform, -1 for minus; side is the formula side.
cplx atom_transform(double m, const RapidityAtom& a, Wedge side, int sign, cplx z) {
  if (side == Wedge::Left) {
    if (sign < 0) z += kI * kPi;
    return a.coeff * std::exp(kI * minkowski(momentum(m, z), a.x.x0, a.x.x1)) * gaussian(a, z);
  }
  if (sign > 0) z += kI * kPi;
  return a.coeff * std::exp(-kI * minkowski(momentum(m, z), a.x.x0, a.x.x1)) * gaussian(a, z);
}

double bump_profile(const PositionBump& b, double x0, double x1) {
  const double d0 = x0 - b.center.x0, d1 = x1 - b.center.x1;
  const double q = (d0 * d0 + d1 * d1) / (b.radius * b.radius);
  if (q >= 1.0) return 0.0;
  return std::exp(-1.0 / (1.0 - q));
}

cplx bump_transform_n(double m, const PositionBump& b, int sign, cplx z, int n) {
  const Rule r0 = gauss_legendre(n, b.center.x0 - b.radius, b.center.x0 + b.radius);
  const Rule r1 = gauss_legendre(n, b.center.x1 - b.radius, b.center.x1 + b.radius);
  const auto p = momentum(m, z);
  cplx sum = 0.0;
  for (int i = 0; i < n; ++i) {
    cplx row = 0.0;
    const cplx e0 = std::exp(kI * (sign * 1.0) * p.p0 * r0.nodes[i]);
    for (int j = 0; j < n; ++j) {
      const double f = bump_profile(b, r0.nodes[i], r1.nodes[j]);
      if (f == 0.0) continue;
      row += r1.weights[j] * f * std::exp(-kI * (sign * 1.0) * p.p1 * r1.nodes[j]);
    }
    sum += r0.weights[i] * e0 * row;
  }
  return b.amplitude * sum / (2.0 * kPi);
}

Wedge formula_side(const TestFunction& f) { return f.scrambled ? opposite(f.wedge) : f.wedge; }

cplx transform(const ScatteringModel& model, const TestFunction& f, int species, cplx z, int sign) {
  const double m = species_mass(model, species);
  const Wedge side = formula_side(f);
  cplx sum = 0.0;
  for (const auto& atom : f.atoms) {
    if (const auto* a = std::get_if<RapidityAtom>(&atom)) {
      if (a->species == species) sum += atom_transform(m, *a, side, sign, z);
    } else {
      const auto& b = std::get<PositionBump>(atom);
      if (b.species == species) sum += bump_transform_n(m, b, sign, z, b.nodes);
    }
  }
  return sum;
}

void certify(const TestFunction& f, cplx z, int sign) {
  const double y = z.imag();
  if (y == 0.0) return;
  // plus continues upward for left data, minus continues upward for right data
  const bool up = (f.wedge == Wedge::Left) == (sign > 0);
  const double eps = 1e-12;
  const bool ok = up ? (y >= -eps && y <= kPi + eps) : (y <= eps && y >= -kPi - eps);
  if (!ok)
    fail(ErrorCode::StripViolation, "transform of " + to_string(f.wedge) +
                                        "-wedge data is not certified at Im z = " + std::to_string(y));
}

void check_bumps(const ScatteringModel& model, const TestFunction& f, int species, cplx z, int sign,
                 const FourierOptions& opt) {
  if (!opt.warn) return;
  for (const auto& atom : f.atoms) {
    const auto* b = std::get_if<PositionBump>(&atom);
    if (!b || b->species != species) continue;
    const double err = bump_quadrature_error(model, *b, f.wedge, z, sign);
    if (err > opt.tol)
      fail(ErrorCode::QuadratureWarning, "bump transform error estimate " + std::to_string(err) + " exceeds tolerance");
  }
}

}  // namespace

std::string to_string(Wedge w) { return w == Wedge::Left ? "left" : "right"; }

bool in_wedge(Wedge w, SpacetimePoint x) {
  return w == Wedge::Left ? x.x1 < -std::abs(x.x0) : x.x1 > std::abs(x.x0);
}

double wedge_margin(Wedge w, SpacetimePoint x) {
  const double s = w == Wedge::Left ? -x.x1 : x.x1;
  return (s - std::abs(x.x0)) / std::sqrt(2.0);
}

bool TestFunction::has_species(int k) const {
  for (const auto& a : atoms) {
    const int s = std::visit([](const auto& v) { return v.species; }, a);
    if (s == k) return true;
  }
  return false;
}

bool TestFunction::only_species(int k) const {
  for (const auto& a : atoms) {
    const int s = std::visit([](const auto& v) { return v.species; }, a);
    if (s != k) return false;
  }
  return true;
}

cplx fourier_plus(const ScatteringModel& model, const TestFunction& f, int species, cplx zeta,
                  const FourierOptions& opt) {
  certify(f, zeta, +1);
  check_bumps(model, f, species, zeta, +1, opt);
  return transform(model, f, species, zeta, +1);
}

cplx fourier_minus(const ScatteringModel& model, const TestFunction& f, int species, cplx zeta,
                   const FourierOptions& opt) {
  certify(f, zeta, -1);
  check_bumps(model, f, species, zeta, -1, opt);
  return transform(model, f, species, zeta, -1);
}

cplx fourier_plus_unchecked(const ScatteringModel& model, const TestFunction& f, int species, cplx zeta) {
  return transform(model, f, species, zeta, +1);
}

cplx fourier_minus_unchecked(const ScatteringModel& model, const TestFunction& f, int species, cplx zeta) {
  return transform(model, f, species, zeta, -1);
}

double bump_quadrature_error(const ScatteringModel& model, const PositionBump& b, Wedge, cplx zeta, int sign) {
  const double m = species_mass(model, b.species);
  return std::abs(bump_transform_n(m, b, sign, zeta, b.nodes) - bump_transform_n(m, b, sign, zeta, 2 * b.nodes));
}

TestFunction reflect(const TestFunction& g) {
  TestFunction out;
  out.wedge = opposite(g.wedge);
  out.scrambled = g.scrambled;
  for (const auto& atom : g.atoms) {
    if (const auto* a = std::get_if<RapidityAtom>(&atom)) {
      RapidityAtom r = *a;
      r.x = {-a->x.x0, -a->x.x1};
      r.coeff = std::conj(a->coeff);
      out.atoms.emplace_back(r);
    } else {
      PositionBump b = std::get<PositionBump>(atom);
      b.center = {-b.center.x0, -b.center.x1};
      b.amplitude = std::conj(b.amplitude);
      out.atoms.emplace_back(b);
    }
  }
  return out;
}

TestFunction reflect_unconjugated(const TestFunction& g) {
  TestFunction out = g;
  out.wedge = opposite(g.wedge);
  out.scrambled = !g.scrambled;
  return out;
}

TestFunction star(const TestFunction& f) {
  TestFunction out = f;
  for (auto& atom : out.atoms) {
    if (auto* a = std::get_if<RapidityAtom>(&atom)) a->coeff = std::conj(a->coeff);
    else std::get<PositionBump>(atom).amplitude = std::conj(std::get<PositionBump>(atom).amplitude);
  }
  return out;
}

bool is_real(const TestFunction& f) {
  for (const auto& atom : f.atoms) {
    const cplx c = std::holds_alternative<RapidityAtom>(atom) ? std::get<RapidityAtom>(atom).coeff
                                                               : std::get<PositionBump>(atom).amplitude;
    if (c.imag() != 0.0) return false;
  }
  return true;
}

TestFunction scaled(const TestFunction& f, cplx s) {
  TestFunction out = f;
  for (auto& atom : out.atoms) {
    if (auto* a = std::get_if<RapidityAtom>(&atom)) a->coeff *= s;
    else std::get<PositionBump>(atom).amplitude *= s;
  }
  return out;
}

SupportCertificate wedge_support_check(const ScatteringModel& model, const Atom& atom, Wedge w) {
  SupportCertificate c;
  TestFunction f;
  f.wedge = w;
  f.atoms.push_back(atom);
  int species = 1;
  if (const auto* a = std::get_if<RapidityAtom>(&atom)) {
    species = a->species;
    c.margin = wedge_margin(w, a->x);
    c.strip_bound = std::abs(a->coeff) * std::exp(a->beta * kPi * kPi / 4.0);
  } else {
    const auto& b = std::get<PositionBump>(atom);
    species = b.species;
    c.margin = wedge_margin(w, b.center) - b.radius;
    c.strip_bound = std::abs(b.amplitude) * std::exp(-1.0) * b.radius * b.radius / 2.0;
  }
  if (c.margin <= 0.0) {
    c.ok = false;
    c.detail = "support not strictly inside the " + to_string(w) + " wedge";
    return c;
  }
  const int sign = w == Wedge::Left ? +1 : -1;  // the transform continued upward
  double theta0 = 0.0;
  if (const auto* a = std::get_if<RapidityAtom>(&atom)) theta0 = a->theta0;
  for (int i = 0; i < 21; ++i) {
    for (int j = 0; j < 21; ++j) {
      const cplx z(theta0 - 5.0 + 10.0 * i / 20.0, kPi * j / 20.0);
      c.strip_sup = std::max(c.strip_sup, std::abs(transform(model, f, species, z, sign)));
    }
  }
  c.ok = std::isfinite(c.strip_sup) && c.strip_sup <= c.strip_bound * (1.0 + 1e-9);
  c.detail = c.ok ? "inside wedge; strip sample bounded" : "strip sample exceeds the analytic bound";
  return c;
}

SupportCertificate wedge_support_check(const ScatteringModel& model, const TestFunction& f) {
  SupportCertificate all;
  all.ok = !f.atoms.empty();
  all.margin = 1e300;
  all.detail = all.ok ? "all atoms certified" : "no atoms";
  for (const auto& atom : f.atoms) {
    const auto c = wedge_support_check(model, atom, f.wedge);
    all.margin = std::min(all.margin, c.margin);
    all.strip_sup = std::max(all.strip_sup, c.strip_sup);
    all.strip_bound = std::max(all.strip_bound, c.strip_bound);
    if (!c.ok) {
      all.ok = false;
      all.detail = c.detail;
    }
  }
  return all;
}

}  // namespace sgw
