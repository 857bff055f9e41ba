#include "sgw/fields.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <variant>

#include "sgw/error.hpp"
#include "sgw/model.hpp"

namespace sgw {

namespace {

constexpr cplx kI{0.0, 1.0};

SmearedWavefunction transform_on_grid(const FockSpace& F, const TestFunction& f, int k, bool plus) {
  SmearedWavefunction h{k, std::vector<cplx>(F.n())};
  for (int i = 0; i < F.n(); ++i) {
    const cplx z(F.grid().nodes[i], 0.0);
    h.values[i] = plus ? fourier_plus(F.model(), f, k, z) : fourier_minus(F.model(), f, k, z);
  }
  return h;
}

void append(std::string& s, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g,", v);
  s += buf;
}

std::string describe(const TestFunction& f) {
  std::string s = to_string(f.wedge) + (f.scrambled ? "*" : "") + ":";
  for (const auto& a : f.atoms) {
    if (const auto* r = std::get_if<RapidityAtom>(&a)) {
      s += "atom" + std::to_string(r->species) + "(";
      for (double v : {r->x.x0, r->x.x1, r->theta0, r->beta, r->coeff.real(), r->coeff.imag()}) append(s, v);
    } else {
      const auto& b = std::get<PositionBump>(a);
      s += "bump" + std::to_string(b.species) + "(";
      for (double v : {b.center.x0, b.center.x1, b.radius, b.amplitude.real(), b.amplitude.imag()}) append(s, v);
    }
    s += ")";
  }
  return s;
}

std::string describe(const DomainVector& v) {
  std::string s = "dv(";
  append(s, v.vacuum.real());
  append(s, v.vacuum.imag());
  for (std::size_t k = 0; k < v.xi.size(); ++k) {
    s += "|" + std::to_string(k + 1) + ":";
    for (const auto& t : v.xi[k])
      for (double x : {t.c.real(), t.c.imag(), t.alpha, t.mu}) append(s, x);
  }
  return s + (v.higher.empty() ? ")" : "+grid)");
}

// int conj(a(x - i y)) b(x - i y) dx for two Gaussian terms
cplx gaussian_overlap(const GaussianTerm& a, const GaussianTerm& b, double y) {
  const cplx A = a.mu - kI * y, B = b.mu + kI * y;
  const double s = a.alpha + b.alpha;
  return std::conj(a.c) * b.c * std::sqrt(M_PI / s) * std::exp(-a.alpha * b.alpha * (A - B) * (A - B) / s);
}

}  // namespace

cplx DomainVector::xi_at(int species, cplx z) const {
  if (species < 1 || species > static_cast<int>(xi.size())) return 0.0;
  cplx s = 0.0;
  for (const auto& t : xi[species - 1]) s += t(z);
  return s;
}

DomainVector DomainVector::conjugated() const {
  DomainVector out;
  out.vacuum = std::conj(vacuum);
  out.xi = xi;
  for (auto& terms : out.xi)
    for (auto& t : terms) t.c = std::conj(t.c);
  out.higher = cpt(higher);
  return out;
}

FockVector DomainVector::to_fock(const FockSpace& F) const {
  FockVector v;
  if (vacuum != cplx(0.0, 0.0)) v.sectors[{}] = {vacuum};
  for (std::size_t k = 0; k < xi.size(); ++k) {
    if (xi[k].empty()) continue;
    if (static_cast<int>(k) >= F.species()) fail(ErrorCode::InvalidArgument, "domain vector species out of range");
    std::vector<cplx> vals(F.n());
    for (int i = 0; i < F.n(); ++i) vals[i] = xi_at(static_cast<int>(k) + 1, cplx(F.grid().nodes[i], 0.0));
    v.sectors[{static_cast<int>(k) + 1}] = std::move(vals);
  }
  v += higher;
  return v;
}

VerificationReport certify_domain(const FockSpace& F, const DomainVector& v) {
  VerificationReport rep;
  rep.subject = "domain";
  const auto fv = v.to_fock(F);
  const auto& g = F.grid();
  double node_err = 0.0, line_err = 0.0, sup = 0.0;
  for (std::size_t k = 0; k < v.xi.size(); ++k) {
    const int s = static_cast<int>(k) + 1;
    auto it = fv.sectors.find({s});
    for (int i = 0; i < F.n() && it != fv.sectors.end(); ++i)
      node_err = std::max(node_err, std::abs(it->second[i] - v.xi_at(s, cplx(g.nodes[i], 0.0))));
    for (int j = 0; j <= 10; ++j) {
      const double y = 0.5 * M_PI * j / 10.0;
      double quad = 0.0;
      for (int i = 0; i < F.n(); ++i) quad += g.weights[i] * std::norm(v.xi_at(s, cplx(g.nodes[i], -y)));
      cplx exact = 0.0;
      for (const auto& a : v.xi[k])
        for (const auto& b : v.xi[k]) exact += gaussian_overlap(a, b, y);
      line_err = std::max(line_err, std::abs(quad - exact.real()) / std::max(1.0, exact.real()));
      sup = std::max(sup, std::sqrt(std::max(0.0, exact.real())));
    }
  }
  rep.add("node_agreement", node_err, 1e-12);
  rep.add("strip_l2_lines", line_err, 1e-10, "sup L2 norm on 11 lines = " + std::to_string(sup));
  rep.add_flag("strip_l2_finite", std::isfinite(sup));
  rep.add_flag("higher_sectors_uncertified", v.higher.empty(),
               v.higher.empty() ? "" : "n >= 2 sectors carry no continuation certificate");
  return rep;
}

std::pair<cplx, cplx> bound_state_residues(const ScatteringModel& model, bool require_positive) {
  if (model.K != 2) fail(ErrorCode::DomainError, "bound-state operator implemented for two breathers");
  const auto& e1 = model.entry(1, 2, 1);
  const auto& e2 = model.entry(1, 1, 2);
  const cplx r1 = residue(model.amp(1, 2), ComplexRapidity{0.0, e1.angle}, model.amp_opt);
  const cplx r2 = residue(model.amp(1, 1), ComplexRapidity{0.0, e2.angle}, model.amp_opt);
  if (require_positive) {
    for (cplx r : {r1, r2}) {
      const cplx q = -kI * r;
      if (!(q.real() > 0.0) || std::abs(std::arg(q)) > 1e-6)
        fail(ErrorCode::NegativeResidue,
             "-i res S = " + std::to_string(q.real()) + (q.imag() < 0 ? "" : "+") + std::to_string(q.imag()) +
                 "i is not in R+; no real normalization of the bound-state term");
    }
  }
  return {r1, r2};
}

EtaCoefficients eta_from_scale(const ScatteringModel& model, double c1, double c2, bool require_positive) {
  const auto [r1, r2] = bound_state_residues(model, require_positive);
  EtaCoefficients e;
  e.res1 = r1;
  e.res2 = r2;
  e.c1 = c1;
  e.c2 = c2;
  e.eta1 = kI * c1 * std::sqrt(-kI * r1);
  e.eta2 = kI * c2 * std::sqrt(-kI * r2);
  return e;
}

FockVector phi_creation(const FockSpace& F, const TestFunction& f, const FockVector& psi) {
  FockVector out;
  for (int k = 1; k <= F.species(); ++k)
    if (f.has_species(k)) out += create(F, transform_on_grid(F, f, k, true), psi);
  return out;
}

FockVector phi_annihilation(const FockSpace& F, const TestFunction& f, const FockVector& psi) {
  FockVector out;
  for (int k = 1; k <= F.species(); ++k)
    if (f.has_species(k)) out += annihilate(F, transform_on_grid(F, f, k, false), psi);
  return out;
}

FockVector phi(const FockSpace& F, const TestFunction& f, const FockVector& psi) {
  return phi_creation(F, f, psi) + phi_annihilation(F, f, psi);
}

FockVector phi_prime_reflected(const FockSpace& F, const TestFunction& gj, const FockVector& psi) {
  return cpt(phi(F, gj, cpt(psi)));
}

FockVector phi_prime(const FockSpace& F, const TestFunction& g, const FockVector& psi) {
  return phi_prime_reflected(F, reflect(g), psi);
}

std::vector<SmearedWavefunction> chi1(const FockSpace& F, const TestFunction& f, const DomainVector& xi,
                                      const EtaCoefficients& eta) {
  const auto& m = F.model();
  if (m.K != 2) fail(ErrorCode::DomainError, "bound-state operator implemented for two breathers");
  if (f.wedge != Wedge::Left) fail(ErrorCode::DomainViolation, "chi needs left-wedge data");
  const auto& e1 = m.entry(1, 2, 1);
  const auto& e2 = m.entry(1, 1, 2);
  std::vector<SmearedWavefunction> out{{1, std::vector<cplx>(F.n())}, {2, std::vector<cplx>(F.n())}};
  if (!f.has_species(1)) return out;
  for (int i = 0; i < F.n(); ++i) {
    const double t = F.grid().nodes[i];
    const cplx x2 = xi.xi_at(2, cplx(t, -e1.shiftB));
    const cplx x1 = xi.xi_at(1, cplx(t, -e2.shiftB));
    if (x2 != cplx(0.0, 0.0) && eta.eta1 != cplx(0.0, 0.0))
      out[0].values[i] = -kI * eta.eta1 * fourier_plus(m, f, 1, cplx(t, e1.shiftA)) * x2;
    if (x1 != cplx(0.0, 0.0) && eta.eta2 != cplx(0.0, 0.0))
      out[1].values[i] = -kI * eta.eta2 * fourier_plus(m, f, 1, cplx(t, e2.shiftA)) * x1;
  }
  return out;
}

FockVector chi(const FockSpace& F, const TestFunction& f, const DomainVector& psi, const EtaCoefficients& eta) {
  if (!psi.higher.empty())
    fail(ErrorCode::DomainViolation, "chi on n >= 2 sectors needs a continuation certificate");
  FockVector out;
  bool any = false;
  for (const auto& terms : psi.xi) any = any || !terms.empty();
  if (!any) return out;
  for (auto& h : chi1(F, f, psi, eta)) out.sectors[{h.species}] = std::move(h.values);
  return out;
}

FockVector chi_prime_reflected(const FockSpace& F, const TestFunction& gj, const DomainVector& psi,
                               const EtaCoefficients& eta) {
  return cpt(chi(F, gj, psi.conjugated(), eta));
}

FockVector chi_prime(const FockSpace& F, const TestFunction& g, const DomainVector& psi,
                     const EtaCoefficients& eta) {
  return chi_prime_reflected(F, reflect(g), psi, eta);
}

FockVector phitilde(const FockSpace& F, const TestFunction& f, const DomainVector& psi, const EtaCoefficients& eta) {
  return phi(F, f, psi.to_fock(F)) + chi(F, f, psi, eta);
}

FockVector phitilde_prime(const FockSpace& F, const TestFunction& g, const DomainVector& psi,
                          const EtaCoefficients& eta) {
  return phi_prime(F, g, psi.to_fock(F)) + chi_prime(F, g, psi, eta);
}

CommutatorPieces weak_pieces(const FockSpace& F, const TestFunction& f, const TestFunction& g,
                             const DomainVector& P, const DomainVector& Q, const EtaCoefficients& eta,
                             bool scrambled) {
  const TestFunction gj = scrambled ? reflect_unconjugated(g) : reflect(g);
  const auto Pv = P.to_fock(F), Qv = Q.to_fock(F);
  const auto phiP = phi(F, f, Pv), phiQ = phi(F, f, Qv);
  const auto phpP = phi_prime_reflected(F, gj, Pv), phpQ = phi_prime_reflected(F, gj, Qv);
  const auto chiP = chi(F, f, P, eta), chiQ = chi(F, f, Q, eta);
  const auto chpP = chi_prime_reflected(F, gj, P, eta), chpQ = chi_prime_reflected(F, gj, Q, eta);
  CommutatorPieces c;
  auto term = [&](const FockVector& a1, const FockVector& b1, const FockVector& a2, const FockVector& b2) {
    const cplx x = inner_product(F, a1, b1), y = inner_product(F, a2, b2);
    c.lhs += x;
    c.rhs += y;
    c.max_term = std::max({c.max_term, std::abs(x), std::abs(y)});
    return x - y;
  };
  c.pp = term(phiP, phpQ, phpP, phiQ);
  c.cc = term(chiP, chpQ, chpP, chiQ);
  c.pc = term(phiP, chpQ, chpP, phiQ);
  c.cp = term(chiP, phpQ, phpP, chiQ);
  return c;
}

std::string probe_hash(const EtaProbe& p) {
  const std::string s = describe(p.f) + "/" + describe(p.g) + "/" + describe(p.P) + "/" + describe(p.Q);
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

EtaCoefficients determine_eta(const FockSpace& F, const std::vector<EtaProbe>& fit,
                              const std::vector<EtaProbe>& holdout, const EtaFitOptions& opt) {
  const auto& m = F.model();
  const auto unit = eta_from_scale(m, 1.0, 1.0);
  EtaCoefficients only1 = unit, only2 = unit, none = unit;
  only1.eta2 = 0.0;
  only2.eta1 = 0.0;
  none.eta1 = none.eta2 = 0.0;

  std::vector<double> est[2];
  VerificationReport rep;
  rep.subject = "eta";
  for (std::size_t p = 0; p < fit.size(); ++p) {
    const auto& pr = fit[p];
    const cplx D0 = weak_pieces(F, pr.f, pr.g, pr.P, pr.Q, none).pp;
    const auto a = weak_pieces(F, pr.f, pr.g, pr.P, pr.Q, only1);
    const auto b = weak_pieces(F, pr.f, pr.g, pr.P, pr.Q, only2);
    const cplx L[2] = {a.pc + a.cp, b.pc + b.cp};
    const cplx A[2] = {a.cc, b.cc};
    const double s0 = std::abs(D0) + std::abs(L[0]) + std::abs(L[1]) + std::abs(A[0]) + std::abs(A[1]);
    bool active[2];
    for (int i = 0; i < 2; ++i) active[i] = std::abs(A[i]) + std::abs(L[i]) > 1e-12 * s0;
    if (active[0] == active[1]) continue;  // joint or empty: validation only
    const int i = active[0] ? 0 : 1;
    const cplx disc = std::sqrt(L[i] * L[i] - 4.0 * A[i] * D0);
    double best = -1.0, best_im = 1e300;
    for (cplx r : {(-L[i] + disc) / (2.0 * A[i]), (-L[i] - disc) / (2.0 * A[i])}) {
      if (r.real() <= 0.0) continue;
      const double im = std::abs(r.imag()) / std::abs(r);
      if (im < best_im) best_im = im, best = r.real();
    }
    if (best < 0.0) fail(ErrorCode::FitInconsistent, "probe " + std::to_string(p) + ": no positive scale");
    const cplx W = D0 + best * L[i] + best * best * A[i];
    const double sc = std::abs(D0) + best * std::abs(L[i]) + best * best * std::abs(A[i]);
    const double r = std::abs(W) / sc;
    if (r > opt.fit_tol)
      fail(ErrorCode::FitInconsistent, "probe " + std::to_string(p) + ": residual " + std::to_string(r));
    est[i].push_back(best);
  }
  double c[2], spread = 0.0;
  for (int i = 0; i < 2; ++i) {
    if (est[i].empty())
      fail(ErrorCode::FitInconsistent, "no fitting probe isolates eta" + std::to_string(i + 1));
    double s = 0.0;
    for (double v : est[i]) s += v;
    c[i] = s / est[i].size();
    const auto [lo, hi] = std::minmax_element(est[i].begin(), est[i].end());
    spread = std::max(spread, (*hi - *lo) / c[i]);
  }
  if (spread > opt.consistency_tol)
    fail(ErrorCode::FitInconsistent, "fitted scale varies by " + std::to_string(spread) + " across probes");

  auto out = eta_from_scale(m, c[0], c[1]);
  out.consistency = spread;
  for (const auto& pr : fit) {
    const auto pc = weak_pieces(F, pr.f, pr.g, pr.P, pr.Q, out);
    out.fit_residual = std::max(out.fit_residual, std::abs(pc.total()) / pc.scale());
    out.probe_hashes.push_back(probe_hash(pr));
  }
  for (std::size_t p = 0; p < holdout.size(); ++p) {
    const auto pc = weak_pieces(F, holdout[p].f, holdout[p].g, holdout[p].P, holdout[p].Q, out);
    const double r = std::abs(pc.total()) / pc.scale();
    out.holdout_residual = std::max(out.holdout_residual, r);
    rep.add("holdout[" + std::to_string(p) + "]", r, opt.holdout_tol, probe_hash(holdout[p]));
  }
  rep.add("fit_residual", out.fit_residual, opt.fit_tol);
  rep.add("consistency", spread, opt.consistency_tol);
  const double ang1 = std::abs(std::arg(-(out.eta1 * out.eta1) / (-kI * out.res1)));
  const double ang2 = std::abs(std::arg(-(out.eta2 * out.eta2) / (-kI * out.res2)));
  rep.add("eta_phase", std::max(ang1, ang2), 1e-6, "eta^2 / (-i res) in -R+");
  out.report = rep;
  return out;
}

}  // namespace sgw
