#include "sgw/verify.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <memory>
#include <random>
#include <thread>

#include "sgw/error.hpp"
#include "sgw/model.hpp"
#include "sgw/quadrature.hpp"

namespace sgw {

namespace {

constexpr cplx kI{0.0, 1.0};

template <class Fn>
void parallel_for(std::size_t n, int threads, Fn&& fn) {
  unsigned t = threads > 0 ? threads : std::max(1u, std::thread::hardware_concurrency());
  t = std::min<unsigned>(t, std::max<std::size_t>(n, 1));
  if (t <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr err;
  std::atomic<bool> failed{false};
  for (unsigned w = 0; w < t; ++w)
    pool.emplace_back([&] {
      for (std::size_t i; !failed && (i = next++) < n;) {
        try {
          fn(i);
        } catch (...) {
          if (!failed.exchange(true)) err = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

void require_b1(const TestFunction& f, const char* what) {
  if (!f.only_species(1)) fail(ErrorCode::DomainError, std::string(what) + " must have b1 components only");
}

cplx twist(const ScatteringModel& m, const SpeciesTuple& t, const std::vector<double>& th, cplx z) {
  cplx s = 1.0;
  for (std::size_t p = 0; p < t.size(); ++p) s *= eval_amplitude(m.amp(1, t[p]), z - th[p], m.amp_opt);
  return s;
}

cplx twist_conj(const ScatteringModel& m, const SpeciesTuple& t, const std::vector<double>& th, double x) {
  cplx s = 1.0;
  for (std::size_t p = 0; p < t.size(); ++p) s *= std::conj(eval_amplitude(m.amp(1, t[p]), cplx(x - th[p], 0.0), m.amp_opt));
  return s;
}

void tail_check(double v, double tol, const char* where) {
  if (v > tol) fail(ErrorCode::TailWarning, std::string(where) + ": integrand " + std::to_string(v) + " at the cutoff");
}

// residues of g- prod S f+ between the two contours
std::vector<ResidueTerm> residue_terms(const ScatteringModel& m, const TestFunction& f, const TestFunction& g,
                                       const std::vector<double>& th, const SpeciesTuple& t) {
  std::vector<ResidueTerm> out;
  std::vector<PoleData> data;
  for (std::size_t p = 0; p < t.size(); ++p) {
    for (const auto& pole : poles_in_strip(m.amp(1, t[p]), m.amp_opt)) {
      const double im = pole.location.im;
      if (im < 1e-3 || im > kPi - 1e-3) {
        if (im > -1e-3 && im < kPi + 1e-3) fail(ErrorCode::PoleOnPath, "pole within 1e-3 of a contour");
        continue;
      }
      if (pole.order != 1) fail(ErrorCode::NotASimplePole, "integrand pole is not simple");
      const cplx z0(th[p] + pole.location.re, im);
      for (const auto& o : out)
        if (std::abs(o.location.value() - z0) < 1e-3)
          fail(ErrorCode::PoleOnPath, "two integrand poles within 1e-3; perturb theta");
      out.push_back({static_cast<int>(p), ComplexRapidity{z0.real(), z0.imag()}, 0.0});
      data.push_back(pole);
    }
  }
  for (std::size_t j = 0; j < out.size(); ++j) {
    const std::size_t p = out[j].factor;
    const cplx z0 = out[j].location.value();
    cplx r = residue(m.amp(1, t[p]), data[j].location, m.amp_opt);
    for (std::size_t q = 0; q < t.size(); ++q)
      if (q != p) r *= eval_amplitude(m.amp(1, t[q]), z0 - th[q], m.amp_opt);
    out[j].residue = r * fourier_minus(m, g, 1, z0) * fourier_plus(m, f, 1, z0);
  }
  return out;
}

}  // namespace

KernelValue commutator_kernel(const ScatteringModel& m, const TestFunction& f, const TestFunction& g,
                              const SpeciesTuple& t, const std::vector<double>& th, const IntegralOptions& opt,
                              const RapidityGrid* grid) {
  require_b1(f, "f");
  require_b1(g, "g");
  if (t.size() != th.size()) fail(ErrorCode::InvalidArgument, "species and rapidity tuples differ in length");
  auto h = [&](double x) {
    const cplx a = fourier_minus(m, g, 1, cplx(x, 0.0)) * twist(m, t, th, cplx(x, 0.0)) * fourier_plus(m, f, 1, cplx(x, 0.0));
    const cplx b = fourier_plus(m, g, 1, cplx(x, 0.0)) * twist_conj(m, t, th, x) * fourier_minus(m, f, 1, cplx(x, 0.0));
    return a - b;
  };
  tail_check(std::max(std::abs(h(-opt.cutoff)), std::abs(h(opt.cutoff))), opt.tail_tol, "commutator kernel");
  const auto r = integrate_adaptive(h, -opt.cutoff, opt.cutoff, opt.tol);
  KernelValue out{r.value, r.error, 0.0};
  if (grid) {
    cplx a = 0.0, b = 0.0;
    for (int i = 0; i < grid->size(); ++i) a += grid->weights[i] * h(grid->nodes[i]);
    const auto fine = gauss_legendre(2 * grid->size(), -grid->cutoff, grid->cutoff);
    for (std::size_t i = 0; i < fine.nodes.size(); ++i) b += fine.weights[i] * h(fine.nodes[i]);
    out.grid_error = std::abs(a - b);
  }
  return out;
}

namespace {

// theta' rule with g-f+ and g+f- and the S_{1k}(x - theta_i) tables at its nodes
struct KernelTable {
  std::vector<double> w;
  std::vector<cplx> A, B;
  std::vector<std::vector<cplx>> S;  // S[k-1][node * N + i]

  KernelTable(const ScatteringModel& m, const TestFunction& f, const TestFunction& g, const Rule& r,
              const std::vector<double>& theta)
      : w(r.weights) {
    const std::size_t M = r.nodes.size(), N = theta.size();
    A.resize(M);
    B.resize(M);
    for (std::size_t n = 0; n < M; ++n) {
      const cplx x(r.nodes[n], 0.0);
      A[n] = fourier_minus(m, g, 1, x) * fourier_plus(m, f, 1, x);
      B[n] = fourier_plus(m, g, 1, x) * fourier_minus(m, f, 1, x);
    }
    S.assign(m.K, std::vector<cplx>(M * N));
    for (int k = 1; k <= m.K; ++k)
      for (std::size_t n = 0; n < M; ++n)
        for (std::size_t i = 0; i < N; ++i)
          S[k - 1][n * N + i] = eval_amplitude(m.amp(1, k), cplx(r.nodes[n] - theta[i], 0.0), m.amp_opt);
  }

  cplx kernel(const SpeciesTuple& t, const std::vector<std::size_t>& idx, std::size_t N) const {
    cplx sum = 0.0;
    for (std::size_t n = 0; n < w.size(); ++n) {
      cplx s = 1.0;
      for (std::size_t p = 0; p < t.size(); ++p) s *= S[t[p] - 1][n * N + idx[p]];
      sum += w[n] * (A[n] * s - B[n] * std::conj(s));
    }
    return sum;
  }
};

Rule composite(int panels, int q, double lo, double hi) {
  Rule r;
  const double h = (hi - lo) / panels;
  for (int p = 0; p < panels; ++p) {
    const auto g = gauss_legendre(q, lo + p * h, lo + (p + 1) * h);
    r.nodes.insert(r.nodes.end(), g.nodes.begin(), g.nodes.end());
    r.weights.insert(r.weights.end(), g.weights.begin(), g.weights.end());
  }
  return r;
}

}  // namespace

SectorResult commutator_integral(const FockSpace& F, const TestFunction& f, const TestFunction& g,
                                 const FockVector& psi, const IntegralOptions& opt) {
  SectorResult res;
  const auto& x = F.grid().nodes;
  const std::size_t N = F.n();
  std::unique_ptr<KernelTable> fine, coarse, grid, grid2;
  for (const auto& [t, v] : psi.sectors) {
    const int n = static_cast<int>(t.size());
    std::vector<cplx> out(v.size());
    if (n <= 1) {
      std::vector<double> err(v.size(), 0.0), gerr(v.size(), 0.0);
      parallel_for(v.size(), opt.threads, [&](std::size_t L) {
        const std::vector<double> th = n ? std::vector<double>{x[L]} : std::vector<double>{};
        const auto k = commutator_kernel(F.model(), f, g, t, th, opt, &F.grid());
        out[L] = k.value * v[L];
        err[L] = k.error * std::abs(v[L]);
        gerr[L] = k.grid_error * std::abs(v[L]);
      });
      for (std::size_t L = 0; L < v.size(); ++L) {
        res.error_bound = std::max(res.error_bound, err[L]);
        res.grid_bound = std::max(res.grid_bound, gerr[L]);
      }
    } else {
      // tabulated composite rule; panel halving for the error, adaptive spot checks
      require_b1(f, "f");
      require_b1(g, "g");
      if (!fine) {
        const double c = opt.cutoff;
        fine = std::make_unique<KernelTable>(F.model(), f, g, composite(128, 12, -c, c), x);
        coarse = std::make_unique<KernelTable>(F.model(), f, g, composite(64, 12, -c, c), x);
        grid = std::make_unique<KernelTable>(F.model(), f, g, Rule{F.grid().nodes, F.grid().weights}, x);
        grid2 = std::make_unique<KernelTable>(
            F.model(), f, g, gauss_legendre(2 * F.n(), -F.grid().cutoff, F.grid().cutoff), x);
      }
      std::vector<std::size_t> idx(n, 0);
      for (std::size_t L = 0; L < v.size(); ++L) {
        const cplx k = fine->kernel(t, idx, N);
        out[L] = k * v[L];
        res.error_bound = std::max(res.error_bound, std::abs(k - coarse->kernel(t, idx, N)) * std::abs(v[L]));
        res.grid_bound = std::max(res.grid_bound,
                                  std::abs(grid->kernel(t, idx, N) - grid2->kernel(t, idx, N)) * std::abs(v[L]));
        if (L % 997 == 0) {
          std::vector<double> th(n);
          for (int d = 0; d < n; ++d) th[d] = x[idx[d]];
          const auto a = commutator_kernel(F.model(), f, g, t, th, opt);
          res.error_bound = std::max(res.error_bound, (std::abs(a.value - k) + a.error) * std::abs(v[L]));
        }
        for (int d = n - 1; d >= 0; --d) {
          if (++idx[d] < N) break;
          idx[d] = 0;
        }
      }
    }
    res.vector.sectors[t] = std::move(out);
  }
  return res;
}

FockVector operator_commutator(const FockSpace& F, const TestFunction& f, const TestFunction& g,
                               const FockVector& psi) {
  const TestFunction gj = reflect(g);
  auto pc = [&](const FockVector& v) { return cpt(phi_creation(F, gj, cpt(v))); };
  auto pa = [&](const FockVector& v) { return cpt(phi_annihilation(F, gj, cpt(v))); };
  return pa(phi_creation(F, f, psi)) + pc(phi_annihilation(F, f, psi)) - phi_annihilation(F, f, pc(psi)) -
         phi_creation(F, f, pa(psi));
}

ContourShiftReport contour_shift_report(const ScatteringModel& m, const TestFunction& f, const TestFunction& g,
                                        const std::vector<double>& th, const SpeciesTuple& t,
                                        const IntegralOptions& opt, double tol) {
  require_b1(f, "f");
  require_b1(g, "g");
  if (f.wedge != Wedge::Left || g.wedge != Wedge::Right)
    fail(ErrorCode::DomainError, "contour shift needs f in the left and g in the right wedge");
  if (t.size() != th.size()) fail(ErrorCode::InvalidArgument, "species and rapidity tuples differ in length");
  ContourShiftReport rep;
  rep.poles = residue_terms(m, f, g, th, t);
  for (const auto& p : rep.poles) rep.R += 2.0 * kPi * kI * p.residue;

  auto h = [&](cplx z) { return fourier_minus(m, g, 1, z) * twist(m, t, th, z) * fourier_plus(m, f, 1, z); };
  auto crossed = [&](double x) {
    return fourier_plus(m, g, 1, cplx(x, 0.0)) * twist_conj(m, t, th, x) * fourier_minus(m, f, 1, cplx(x, 0.0));
  };
  const double c = opt.cutoff;
  const double tail = std::max({std::abs(h(cplx(-c, 0))), std::abs(h(cplx(c, 0))), std::abs(h(cplx(-c, kPi))),
                                std::abs(h(cplx(c, kPi)))});
  tail_check(tail, opt.tail_tol, "contour shift");
  const auto a = integrate_adaptive([&](double x) { return h(cplx(x, 0.0)); }, -c, c, opt.tol);
  const auto b = integrate_adaptive([&](double x) { return h(cplx(x, kPi)); }, -c, c, opt.tol);
  const auto d = integrate_adaptive(crossed, -c, c, opt.tol);
  rep.I0 = a.value;
  rep.Ipi = b.value;
  rep.crossed = d.value;
  rep.residual = std::abs(rep.I0 - rep.Ipi - rep.R);
  rep.crossing_residual = std::abs(rep.Ipi - rep.crossed);
  // vertical sides bounded by pi * tail
  rep.error_bound = a.error + b.error + kPi * tail;
  rep.report.subject = "contour_shift";
  rep.report.add("cauchy", rep.residual, std::max(tol, rep.error_bound));
  rep.report.add("crossing", rep.crossing_residual, std::max(1e-8, b.error + d.error));
  return rep;
}

void check_hypotheses(const FockSpace& F, const TestFunction& f, const TestFunction& g, const DomainVector& Phi,
                      const DomainVector& Psi) {
  auto need = [](bool ok, const std::string& what) {
    if (!ok) fail(ErrorCode::HypothesisViolation, "hypothesis failed: " + what);
  };
  need(f.wedge == Wedge::Left && !f.scrambled, "f supported in the left wedge");
  need(g.wedge == Wedge::Right && !g.scrambled, "g supported in the right wedge");
  const auto cf = wedge_support_check(F.model(), f);
  need(cf.ok, "left-wedge support certificate for f (" + cf.detail + ")");
  const auto cg = wedge_support_check(F.model(), g);
  need(cg.ok, "right-wedge support certificate for g (" + cg.detail + ")");
  need(is_real(f), "f = f*");
  need(is_real(g), "g = g*");
  need(f.only_species(1), "f has b1 components only");
  need(g.only_species(1), "g has b1 components only");
  need(certify_domain(F, Phi).pass(), "Phi in the certified n <= 1 domain");
  need(certify_domain(F, Psi).pass(), "Psi in the certified n <= 1 domain");
}

CommutatorReport weak_commutator(const FockSpace& F, const TestFunction& f, const TestFunction& g,
                                 const DomainVector& Phi, const DomainVector& Psi, const EtaCoefficients& eta,
                                 double tol, bool scrambled) {
  check_hypotheses(F, f, g, Phi, Psi);
  CommutatorReport r;
  r.tolerance = tol;
  const TestFunction gj = scrambled ? reflect_unconjugated(g) : reflect(g);
  const auto Pv = Phi.to_fock(F), Qv = Psi.to_fock(F);
  const auto tfP = phi(F, f, Pv) + chi(F, f, Phi, eta);
  const auto tfQ = phi(F, f, Qv) + chi(F, f, Psi, eta);
  const auto tgP = phi_prime_reflected(F, gj, Pv) + chi_prime_reflected(F, gj, Phi, eta);
  const auto tgQ = phi_prime_reflected(F, gj, Qv) + chi_prime_reflected(F, gj, Psi, eta);
  r.lhs = inner_product(F, tfP, tgQ);
  r.rhs = inner_product(F, tgP, tfQ);
  r.pieces = weak_pieces(F, f, g, Phi, Psi, eta, scrambled);
  r.difference = std::abs(r.lhs - r.rhs);
  r.scale = std::max({r.pieces.max_term, std::abs(r.lhs), std::abs(r.rhs)});
  const double s = r.scale > 0.0 ? r.scale : 1.0;
  r.decomposition_residual = std::abs((r.lhs - r.rhs) - r.pieces.total()) / s;
  r.pass = r.difference <= tol * s;
  auto& rep = r.report;
  rep.subject = "weak_commutator";
  rep.add("difference", r.difference / s, tol);
  rep.add("decomposition", r.decomposition_residual, 1e-12);
  rep.add("pieces/phi_phi'+chi_chi'", std::abs(r.pieces.pp + r.pieces.cc) / s, tol);
  rep.add_info("pieces/phi_chi'", std::abs(r.pieces.pc) / s, tol, "individual cross piece");
  rep.add_info("pieces/chi_phi'", std::abs(r.pieces.cp) / s, tol, "individual cross piece");
  rep.add("pieces/phi_chi'+chi_phi'", std::abs(r.pieces.pc + r.pieces.cp) / s, tol);
  r.note = "verified on the n <= 1 domain subspace";
  return r;
}

cplx predicted_residue_term(const FockSpace& F, const TestFunction& f, const TestFunction& g,
                            const DomainVector& Phi, const DomainVector& Psi, const IntegralOptions&) {
  const auto& m = F.model();
  const auto& w = F.grid().weights;
  cplx sum = 0.0;
  for (int k = 1; k <= F.species(); ++k) {
    for (int i = 0; i < F.n(); ++i) {
      const double t = F.grid().nodes[i];
      const cplx pq = std::conj(Phi.xi_at(k, cplx(t, 0.0))) * Psi.xi_at(k, cplx(t, 0.0));
      if (pq == cplx(0.0, 0.0)) continue;
      cplx R = 0.0;
      for (const auto& p : residue_terms(m, f, g, {t}, {k})) R += 2.0 * kPi * kI * p.residue;
      sum += w[i] * pq * R;
    }
  }
  return -sum;
}

VerificationReport negative_controls(const FockSpace& F, const std::vector<ControlProbe>& probes,
                                     const EtaCoefficients& eta, double tol, const IntegralOptions& opt) {
  VerificationReport rep;
  rep.subject = "negative_controls";
  const std::size_t need = (probes.size() * 8 + 9) / 10;

  const EtaCoefficients none;
  std::size_t matched = 0, broken = 0;
  std::string ratios;
  for (std::size_t p = 0; p < probes.size(); ++p) {
    const auto& pr = probes[p];
    const auto pc = weak_pieces(F, pr.f, pr.g, pr.Phi, pr.Psi, none);
    const cplx pred = predicted_residue_term(F, pr.f, pr.g, pr.Phi, pr.Psi, opt);
    const double d = std::abs(pc.total()), q = std::abs(pred);
    const bool ok = d > tol * pc.max_term && d >= 0.5 * q && d <= 2.0 * q;
    matched += ok;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s%.4g", p ? "," : "", d / q);
    ratios += buf;
    const auto sc = weak_commutator(F, pr.f, pr.g, pr.Phi, pr.Psi, eta, tol, true);
    broken += !sc.pass;
  }
  rep.add_flag("a/eta_zero_leaves_residues", matched >= need,
               std::to_string(matched) + "/" + std::to_string(probes.size()) + " probes within a factor 2; |difference|/|R| = " + ratios);

  const auto& m = F.model();
  bool raised = false;
  std::string msg;
  try {
    const auto u = build_model(m.nu, m.m1, CddSpec::trivial());
    eta_from_scale(u, 1.0, 1.0);
  } catch (const Error& e) {
    raised = e.code() == ErrorCode::NegativeResidue;
    msg = e.what();
  }
  rep.add_flag("b/undeformed_negative_residue", raised, msg);
  rep.add_flag("c/scrambled_reflection_breaks", broken >= need,
               std::to_string(broken) + "/" + std::to_string(probes.size()) + " probes fail");
  return rep;
}

namespace {

struct ProbeRng {
  std::mt19937_64 eng;
  explicit ProbeRng(std::uint64_t seed) : eng(seed) {}
  double u(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(eng); }
  double n() { return std::normal_distribution<double>(0.0, 1.0)(eng); }

  TestFunction atom(Wedge w, const ProbeOptions& o) {
    const double x0 = u(-0.5, 0.5);
    const double d = std::abs(x0) + u(o.margin_lo, o.margin_hi) * std::sqrt(2.0);
    const double x1 = w == Wedge::Left ? -d : d;
    const double sign = u(0.0, 1.0) < 0.5 ? -1.0 : 1.0;
    RapidityAtom a{1, {x0, x1}, u(-o.theta0_max, o.theta0_max), u(o.beta_lo, o.beta_hi), sign * u(0.5, 1.5)};
    return {w, {a}, false};
  }
  GaussianTerm gauss(const ProbeOptions& o) {
    return {cplx(n(), n()) * 0.7, u(o.alpha_lo, o.alpha_hi), u(-o.mu_max, o.mu_max)};
  }
  DomainVector vec(const ProbeOptions& o, bool b1, bool b2) {
    DomainVector v;
    v.vacuum = cplx(n(), n()) * 0.5;
    v.xi.resize(2);
    if (b1) v.xi[0].push_back(gauss(o));
    if (b2) v.xi[1].push_back(gauss(o));
    return v;
  }
};

}  // namespace

std::vector<ControlProbe> random_probes(int count, std::uint64_t seed, const ProbeOptions& opt) {
  ProbeRng r(seed);
  std::vector<ControlProbe> out;
  for (int p = 0; p < count; ++p) {
    ControlProbe c;
    c.f = r.atom(Wedge::Left, opt);
    c.g = r.atom(Wedge::Right, opt);
    c.Phi = r.vec(opt, true, true);
    c.Psi = r.vec(opt, true, true);
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<EtaProbe> eta_fit_probes(int count, std::uint64_t seed, const ProbeOptions& opt) {
  ProbeRng r(seed);
  std::vector<EtaProbe> out;
  for (int p = 0; p < count; ++p) {
    const bool b1 = p % 2 == 0;
    EtaProbe e;
    e.f = r.atom(Wedge::Left, opt);
    e.g = r.atom(Wedge::Right, opt);
    e.P = r.vec(opt, b1, !b1);
    e.Q = r.vec(opt, b1, !b1);
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<EtaProbe> as_eta_probes(const std::vector<ControlProbe>& probes) {
  std::vector<EtaProbe> out;
  for (const auto& p : probes) out.push_back({p.f, p.g, p.Phi, p.Psi});
  return out;
}

}  // namespace sgw
