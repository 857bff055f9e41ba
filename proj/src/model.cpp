#include "sgw/model.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <thread>

#include "sgw/error.hpp"

namespace sgw {

namespace {

constexpr cplx kI{0.0, 1.0};

std::vector<double> real_grid(int n, double lo, double hi) {
  std::vector<double> g(n);
  for (int j = 0; j < n; ++j) g[j] = n == 1 ? lo : lo + (hi - lo) * j / (n - 1);
  return g;
}

void check_nu(double nu) {
  if (!(nu > 0.0 && nu < 1.0)) fail(ErrorCode::DomainError, "coupling nu must lie in (0,1)");
}

// Undeformed S_1k, k = 1..K.
std::vector<Amplitude> first_row(double nu, int K) {
  std::vector<Amplitude> row;
  row.push_back(minimal_S11(nu));
  const double h = kPi * nu / 2.0;
  for (int l = 1; l < K; ++l) {
    // (b_l b_1) -> b_{l+1}
    FusionEntry e{l, 1, l + 1, h, h * l, h * (l + 1)};
    row.push_back(bootstrap_fuse(row[l - 1], row[0], e));
  }
  return row;
}

// Angles of s-channel poles for fusions of b1 with b_k.
std::vector<double> s_channel_angles(const std::vector<FusionEntry>& table, int k) {
  std::vector<double> out;
  for (const auto& e : table) {
    if (!((e.alpha == 1 && e.beta == k) || (e.alpha == k && e.beta == 1))) continue;
    bool dup = false;
    for (double x : out) dup = dup || std::abs(x - e.angle) < 1e-12;
    if (!dup) out.push_back(e.angle);
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Real value of B_a at i x.
double block_on_axis(double a, double x) {
  const double s = std::sin(kPi * a);
  return (std::sin(x) + s) / (std::sin(x) - s);
}

std::string fmt_g(double v, int digits = 10) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

}  // namespace

int breather_count(double nu) {
  check_nu(nu);
  const double q = 2.0 / nu;
  const double r = std::round(q);
  if (std::abs(q - r) < 1e-12 * q) return static_cast<int>(r) - 1;
  return static_cast<int>(std::floor(q));
}

double breather_mass(int k, double nu, double m1) {
  return m1 * std::sin(k * kPi * nu / 2.0) / std::sin(kPi * nu / 2.0);
}

TwoMomentum momentum(double mass, cplx zeta) { return {mass * std::cosh(zeta), mass * std::sinh(zeta)}; }

cplx minkowski(const TwoMomentum& p, double x0, double x1) { return p.p0 * x0 - p.p1 * x1; }

std::vector<FusionEntry> fusion_table(double nu, int K) {
  check_nu(nu);
  const double h = kPi * nu / 2.0;
  std::vector<FusionEntry> out;
  for (int k = 1; k <= K; ++k)
    for (int l = 1; k + l <= K; ++l) out.push_back({k, l, k + l, h * l, h * k, h * l + h * k});
  for (int k = 1; k <= K; ++k) {
    for (int l = 1; k + l <= K; ++l) {
      const double a = h * k;
      const double b = kPi * (1.0 - nu * (k + l) / 2.0);
      out.push_back({k + l, k, l, a, b, a + b});
      out.push_back({k, k + l, l, b, a, b + a});
    }
  }
  return out;
}

Amplitude minimal_S11(double nu) {
  check_nu(nu);
  return Amplitude(1, {Block(nu)});
}

Amplitude bootstrap_fuse(const Amplitude& S_da, const Amplitude& S_db, const FusionEntry& fusion) {
  return S_da.shifted(-fusion.shiftA) * S_db.shifted(fusion.shiftB);
}

Amplitude bootstrap_fuse(const Amplitude& S_d1, const FusionEntry& fusion) {
  const Amplitude out = bootstrap_fuse(S_d1, S_d1, fusion);
  const auto grid = real_grid(200, -5.0, 5.0);
  const auto rep = verify_axioms(out, grid, 1e-10);
  if (!rep.pass()) fail(ErrorCode::AxiomViolation, "bootstrap product fails unitarity or crossing");
  return out;
}

std::vector<std::vector<Amplitude>> sine_gordon_amplitudes(double nu, int K) {
  std::vector<std::vector<Amplitude>> S(K, std::vector<Amplitude>(K));
  const auto row = first_row(nu, K);
  const double h = kPi * nu / 2.0;
  for (int d = 1; d <= K; ++d) {
    if (d == 1) {
      for (int l = 1; l <= K; ++l) S[0][l - 1] = row[l - 1];
      continue;
    }
    S[d - 1][0] = row[d - 1];
    for (int l = 1; l < K; ++l) {
      if (l + 1 < d) continue;
      const Amplitude& prev = l + 1 - 1 >= d ? S[d - 1][l - 1] : S[l - 1][d - 1];
      FusionEntry e{l, 1, l + 1, h, h * l, h * (l + 1)};
      S[d - 1][l] = bootstrap_fuse(prev, row[d - 1], e);
    }
  }
  for (int k = 0; k < K; ++k)
    for (int l = 0; l < k; ++l) S[k][l] = S[l][k];
  return S;
}

std::string to_string(ResidueSign s) {
  switch (s) {
    case ResidueSign::Plus: return "plus";
    case ResidueSign::Minus: return "minus";
    case ResidueSign::Double: return "double";
    case ResidueSign::Other: return "other";
  }
  return "other";
}

ResidueSign classify_residue(cplx r, double angle_tol) {
  if (std::abs(r) == 0.0) return ResidueSign::Other;
  const double ang = std::arg(r);
  if (std::abs(ang - kPi / 2) <= angle_tol) return ResidueSign::Plus;
  if (std::abs(ang + kPi / 2) <= angle_tol) return ResidueSign::Minus;
  return ResidueSign::Other;
}

std::vector<CddConstraint> positivity_constraints(double nu, int K, const AmplitudeOptions& opt) {
  const auto row = first_row(nu, K);
  const auto table = fusion_table(nu, K);
  std::vector<CddConstraint> out;
  for (int k = 1; k <= K; ++k) {
    for (double x : s_channel_angles(table, k)) {
      CddConstraint c{k, x, net_order_at(row[k - 1], x, opt), 0};
      if (c.order == 1) {
        const auto s = classify_residue(residue(row[k - 1], {0.0, x}, opt));
        c.required_sign = s == ResidueSign::Plus ? 1 : s == ResidueSign::Minus ? -1 : 0;
      }
      out.push_back(c);
    }
  }
  return out;
}

namespace {

struct ComponentSearch {
  std::vector<double> grid;               // block parameters
  std::vector<std::vector<double>> cval;  // [param][constraint] value at constraint
  std::vector<std::vector<double>> pmod;  // [param][pole] modulus at strip pole
  std::vector<int> required;
  int max_blocks = 4;
  long long tried = 0;

  double best_margin = -1.0;
  std::vector<int> best;

  void run(int count) {
    std::vector<int> idx(count, 0);
    std::vector<double> sgn(required.size(), 1.0);
    std::vector<double> mod(pmod.empty() ? 0 : pmod[0].size(), 1.0);
    recurse(idx, 0, 0, sgn, mod);
  }

  void recurse(std::vector<int>& idx, int pos, int start, const std::vector<double>& sgn,
               const std::vector<double>& mod) {
    if (pos == static_cast<int>(idx.size())) {
      ++tried;
      for (std::size_t c = 0; c < required.size(); ++c)
        if ((sgn[c] > 0 ? 1 : -1) != required[c]) return;
      double margin = 1e300;
      for (double m : mod) margin = std::min(margin, m);
      if (margin <= 1e-10) return;
      if (margin > best_margin) {
        best_margin = margin;
        best = idx;
      }
      return;
    }
    std::vector<double> s2(sgn.size()), m2(mod.size());
    for (int j = start; j < static_cast<int>(grid.size()); ++j) {
      for (std::size_t c = 0; c < sgn.size(); ++c) s2[c] = sgn[c] * (cval[j][c] > 0 ? 1.0 : -1.0);
      for (std::size_t p = 0; p < mod.size(); ++p) m2[p] = mod[p] * pmod[j][p];
      idx[pos] = j;
      recurse(idx, pos + 1, j, s2, m2);
    }
  }
};

}  // namespace

CddResult find_cdd(double nu, const CddSearchOptions& opt, const AmplitudeOptions& aopt) {
  const int K = breather_count(nu);
  return find_cdd(nu, positivity_constraints(nu, K, aopt), opt, aopt);
}

CddResult find_cdd(double nu, const std::vector<CddConstraint>& constraints, const CddSearchOptions& opt,
                   const AmplitudeOptions& aopt) {
  const int K = breather_count(nu);
  const auto row = first_row(nu, K);
  CddResult res;
  res.verification.subject = "cdd";
  res.factors.assign(K, Amplitude::one());

  const int n = static_cast<int>(std::lround((opt.a_max - opt.a_min) / opt.a_step));
  std::vector<double> params;
  for (int j = 0; j <= n; ++j) {
    const double a = opt.a_min + j * opt.a_step;
    if (a > 1.0 && a < 2.0) params.push_back(a);
  }
  const auto grid = real_grid(200, -5.0, 5.0);

  res.found = true;
  for (int k = 1; k <= K; ++k) {
    std::vector<CddConstraint> cs;
    for (const auto& c : constraints)
      if (c.component == k) cs.push_back(c);
    if (cs.empty()) continue;
    for (const auto& c : cs) {
      if (c.required_sign == 0) {
        res.found = false;
        res.note = "S1" + std::to_string(k) + ": pole at i*" + fmt_g(c.location / kPi) +
                   "*pi has order " + std::to_string(c.order) + " or a non-imaginary residue; no block factor can fix it";
        return res;
      }
    }
    const auto strip_poles = poles_in_strip(row[k - 1], aopt);

    ComponentSearch s;
    s.grid = params;
    s.max_blocks = opt.max_blocks;
    for (const auto& c : cs) s.required.push_back(c.required_sign);
    s.cval.assign(params.size(), {});
    s.pmod.assign(params.size(), {});
    for (std::size_t j = 0; j < params.size(); ++j) {
      for (const auto& c : cs) s.cval[j].push_back(block_on_axis(params[j], c.location));
      for (const auto& p : strip_poles) s.pmod[j].push_back(std::abs(block_on_axis(params[j], p.location.im)));
    }
    bool trivial_ok = true;
    for (int r : s.required) trivial_ok = trivial_ok && r == 1;
    if (trivial_ok) continue;

    for (int count = 1; count <= opt.max_blocks && s.best.empty(); ++count) s.run(count);
    res.candidates += s.tried;
    if (s.best.empty()) {
      res.found = false;
      res.note = "S1" + std::to_string(k) + ": no factor with at most " + std::to_string(opt.max_blocks) +
                 " blocks on the parameter grid (budget exhausted; not a proof of nonexistence)";
      return res;
    }
    std::vector<Block> bs;
    for (int j : s.best) bs.emplace_back(params[j]);
    res.factors[k - 1] = Amplitude(1, std::move(bs));
  }

  // post-hoc verification of every deformed b1 component
  for (int k = 1; k <= K; ++k) {
    const Amplitude def = row[k - 1] * res.factors[k - 1];
    const std::string name = "S1" + std::to_string(k);
    auto ax = verify_axioms(def, grid, 1e-10, aopt);
    ax.subject = name;
    res.verification.merge(ax);
    const auto p0 = poles_in_strip(row[k - 1], aopt);
    const auto p1 = poles_in_strip(def, aopt);
    bool same = p0.size() == p1.size();
    for (std::size_t j = 0; same && j < p0.size(); ++j)
      same = p0[j].order == p1[j].order && std::abs(p0[j].location.im - p1[j].location.im) <= 1e-10;
    res.verification.add_flag(name + "/pole_set_unchanged", same);
    for (const auto& c : constraints) {
      if (c.component != k) continue;
      const cplx r = residue(def, {0.0, c.location}, aopt);
      res.verification.add(name + "/residue_angle@" + fmt_g(c.location / kPi, 6) + "pi",
                           std::abs(std::arg(r) - kPi / 2), opt.angle_tol);
    }
  }
  if (!res.verification.pass()) {
    res.found = false;
    res.note = "candidate failed post-hoc verification";
  }
  return res;
}

const FusionEntry& ScatteringModel::entry(int alpha, int beta, int gamma) const {
  for (const auto& e : fusion)
    if (e.alpha == alpha && e.beta == beta && e.gamma == gamma) return e;
  fail(ErrorCode::DomainError, "no fusion (b" + std::to_string(alpha) + " b" + std::to_string(beta) + ") -> b" +
                                   std::to_string(gamma) + " at this coupling");
}

ScatteringModel build_model(double nu, double m1, const CddSpec& cdd, const BuildOptions& opt) {
  check_nu(nu);
  if (!(m1 > 0.0)) fail(ErrorCode::DomainError, "m1 must be positive");
  ScatteringModel M;
  M.nu = nu;
  M.m1 = m1;
  M.K = breather_count(nu);
  M.amp_opt = opt.amp;
  for (int k = 1; k <= M.K; ++k) M.species.push_back({k, breather_mass(k, nu, m1)});
  M.fusion = fusion_table(nu, M.K);
  M.S_sg = sine_gordon_amplitudes(nu, M.K);

  M.cdd.assign(M.K, Amplitude::one());
  switch (cdd.kind) {
    case CddSpec::Kind::Auto: {
      const auto r = find_cdd(nu, cdd.search, opt.amp);
      for (int k = 0; k < M.K; ++k) M.cdd[k] = r.factors[k];
      break;
    }
    case CddSpec::Kind::Trivial: break;
    case CddSpec::Kind::Explicit:
      if (static_cast<int>(cdd.factors.size()) > M.K)
        fail(ErrorCode::DomainError, "more CDD factors than b1 components");
      for (std::size_t k = 0; k < cdd.factors.size(); ++k) {
        for (const auto& b : cdd.factors[k].blocks())
          if (!(b.a() > 1.0 && b.a() < 2.0) || b.shift() != 0.0)
            fail(ErrorCode::DomainError, "explicit CDD blocks need a in (1,2) and no shift");
        M.cdd[k] = cdd.factors[k];
      }
      break;
  }
  M.S = M.S_sg;
  for (int k = 0; k < M.K; ++k) {
    M.S[0][k] = M.S_sg[0][k] * M.cdd[k];
    M.S[k][0] = M.S[0][k];
  }
  for (const auto& c : M.cdd)
    for (const auto& z : zeros_in_strip(c, opt.amp)) M.cdd_zeros.push_back(z.location.im);

  const auto grid = real_grid(opt.axiom_grid, -5.0, 5.0);
  M.axioms.subject = "axioms";
  for (int k = 1; k <= M.K; ++k) {
    for (int l = k; l <= M.K; ++l) {
      auto r = verify_axioms(M.amp(k, l), grid, opt.axiom_tol, opt.amp);
      r.subject = "S" + std::to_string(k) + std::to_string(l);
      M.axioms.merge(r);
    }
  }
  if (!M.axioms.pass()) fail(ErrorCode::AxiomViolation, "built model violates unitarity or crossing");

  // pole structure of the b1 components
  M.poles.subject = "poles";
  for (int k = 1; k <= M.K; ++k) {
    const std::string name = "S1" + std::to_string(k);
    const auto p0 = poles_in_strip(M.S_sg[0][k - 1], opt.amp);
    const auto p1 = poles_in_strip(M.amp(1, k), opt.amp);
    bool same = p0.size() == p1.size();
    for (std::size_t j = 0; same && j < p0.size(); ++j)
      same = p0[j].order == p1[j].order && std::abs(p0[j].location.im - p1[j].location.im) <= 1e-10;
    M.poles.add_flag(name + "/pole_set_unchanged", same);

    std::vector<double> expected;
    for (double x : s_channel_angles(M.fusion, k)) {
      expected.push_back(x);
      expected.push_back(kPi - x);
    }
    for (double x : expected) {
      double err = 1e300;
      int order = 0;
      for (const auto& p : p1) {
        if (std::abs(p.location.im - x) < err) {
          err = std::abs(p.location.im - x);
          order = p.order;
        }
      }
      M.poles.add(name + "/location@" + fmt_g(x / kPi, 6) + "pi", err, 1e-10);
      if (M.K == 2) {
        M.poles.add_flag(name + "/simple@" + fmt_g(x / kPi, 6) + "pi", order == 1);
        if (order == 1) {
          const cplx an = residue_analytic(M.amp(1, k), {0.0, x}, opt.amp);
          const cplx ct = residue_contour(M.amp(1, k), {0.0, x}, opt.amp);
          M.poles.add(name + "/residue_rel@" + fmt_g(x / kPi, 6) + "pi", std::abs(an - ct) / std::abs(an),
                      opt.amp.residue_rel_tol);
        }
      }
    }
    if (M.K == 2) {
      int count = 0;
      for (const auto& p : p1) count += p.order;
      M.poles.add(name + "/extra_poles", std::abs(count - static_cast<int>(expected.size())), 0.0);
    }
  }

  M.positivity.subject = "positivity";
  for (int k = 1; k <= M.K; ++k) {
    for (double x : s_channel_angles(M.fusion, k)) {
      const std::string name = "S1" + std::to_string(k) + "/residue_angle@" + fmt_g(x / kPi, 6) + "pi";
      if (net_order_at(M.amp(1, k), x, opt.amp) != 1) {
        M.positivity.add_flag(name, false, "pole is not simple");
        continue;
      }
      const cplx r = residue(M.amp(1, k), {0.0, x}, opt.amp);
      M.positivity.add(name, std::abs(std::arg(r) - kPi / 2), opt.angle_tol);
    }
  }
  M.positivity_violation = !M.positivity.pass();

  // undeformed chain against the closed form B_{(k+1)nu/2} B_{(k-1)nu/2}
  M.bootstrap.subject = "bootstrap";
  for (int k = 2; k <= M.K; ++k) {
    std::vector<Block> bs;
    for (double a : {(k + 1) * nu / 2, (k - 1) * nu / 2})
      if (std::abs(a - std::round(a)) > 1e-12) bs.emplace_back(a);
    const Amplitude closed(1, bs);
    double err = 0.0;
    for (double th : grid) {
      const cplx z(th, 0.3);
      err = std::max(err, std::abs(eval_amplitude(M.S_sg[0][k - 1], z, opt.amp) - eval_amplitude(closed, z, opt.amp)));
    }
    M.bootstrap.add("S1" + std::to_string(k) + "/closed_form", err, 1e-10);
  }
  return M;
}

std::vector<PoleData> classified_poles(const ScatteringModel& model, int k, int l) {
  auto poles = poles_in_strip(model.amp(k, l), model.amp_opt);
  for (auto& p : poles) {
    for (const auto& e : model.fusion) {
      if (!((e.alpha == k && e.beta == l) || (e.alpha == l && e.beta == k))) continue;
      if (std::abs(p.location.im - e.angle) < 1e-10) p.channel = PoleChannel::S;
      else if (p.channel == PoleChannel::Other && std::abs(p.location.im - (kPi - e.angle)) < 1e-10)
        p.channel = PoleChannel::T;
    }
    if (p.order == 1) {
      p.residue = residue(model.amp(k, l), p.location, model.amp_opt);
      p.has_residue = true;
    }
  }
  return poles;
}

VerificationReport check_fusion_kinematics(const ScatteringModel& model, std::span<const double> grid, double tol) {
  VerificationReport rep;
  rep.subject = "fusion_kinematics";
  for (const auto& e : model.fusion) {
    double worst = 0.0;
    for (double th : grid) {
      const auto pa = momentum(model.mass(e.alpha), cplx(th, e.shiftA));
      const auto pb = momentum(model.mass(e.beta), cplx(th, -e.shiftB));
      const auto pc = momentum(model.mass(e.gamma), cplx(th, 0.0));
      const cplx d0 = pa.p0 + pb.p0 - pc.p0, d1 = pa.p1 + pb.p1 - pc.p1;
      worst = std::max(worst, std::sqrt(std::norm(d0) + std::norm(d1)));
    }
    rep.add("(b" + std::to_string(e.alpha) + "b" + std::to_string(e.beta) + ")->b" + std::to_string(e.gamma), worst,
            tol);
  }
  if (model.K >= 2) {
    const double m2 = 2.0 * model.m1 * std::cos(kPi * model.nu / 2.0);
    rep.add("m2_closed_form", std::abs(model.mass(2) - m2), 1e-12);
  }
  // masses from repeated fusion with b1 at theta = 0
  double m = model.m1;
  const double h = kPi * model.nu / 2.0;
  for (int k = 1; k < model.K; ++k) {
    const auto pa = momentum(m, cplx(0.0, h));
    const auto pb = momentum(model.m1, cplx(0.0, -h * k));
    m = (pa.p0 + pb.p0).real();
    rep.add("mass_recursion_b" + std::to_string(k + 1), std::abs(m - model.mass(k + 1)), 1e-12);
  }
  return rep;
}

std::string describe_factors(const std::vector<Amplitude>& factors) {
  std::string out;
  for (std::size_t k = 0; k < factors.size(); ++k) {
    if (factors[k].blocks().empty()) continue;
    if (!out.empty()) out += ';';
    out += "S1" + std::to_string(k + 1) + "=";
    for (std::size_t j = 0; j < factors[k].blocks().size(); ++j) {
      if (j) out += '+';
      out += fmt_g(factors[k].blocks()[j].a(), 6);
    }
  }
  return out;
}

ScanRow scan_point(double nu, const CddSearchOptions& opt, bool search_cdd) {
  ScanRow row;
  row.nu = nu;
  row.K = breather_count(nu);
  const auto chain = first_row(nu, row.K);
  auto sign_at = [](const Amplitude& A, double x) {
    const int ord = net_order_at(A, x);
    if (ord == 2) return ResidueSign::Double;
    if (ord != 1) return ResidueSign::Other;
    return classify_residue(residue(A, {0.0, x}));
  };
  row.res_sign_S11 = sign_at(chain[0], kPi * nu);
  for (int k = 1; k < row.K; ++k) row.chain_signs.push_back(sign_at(chain[k - 1], kPi * nu * (k + 1) / 2.0));
  if (search_cdd) {
    const auto r = find_cdd(nu, opt);
    row.cdd_found = r.found;
    if (r.found) row.cdd_blocks = describe_factors(r.factors);
  }
  return row;
}

std::vector<ScanRow> scan_coupling(double lo, double hi, int steps, const CddSearchOptions& opt, bool search_cdd,
                                   int threads) {
  if (steps < 1) fail(ErrorCode::DomainError, "scan needs at least one step");
  if (!(lo > 0.0 && hi < 1.0 && lo <= hi)) fail(ErrorCode::DomainError, "scan range must lie inside (0,1)");
  const auto nus = real_grid(steps, lo, hi);
  std::vector<ScanRow> rows(steps);
  std::vector<std::exception_ptr> errs(steps);
  if (threads <= 0) threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  threads = std::min(threads, steps);
  std::atomic<int> next{0};
  auto work = [&] {
    for (int j = next++; j < steps; j = next++) {
      try {
        rows[j] = scan_point(nus[j], opt, search_cdd);
      } catch (...) {
        errs[j] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);
  return rows;
}

std::string scan_csv(const std::vector<ScanRow>& rows) {
  std::string out = "nu,K,res_sign_S11,chain_signs,cdd_found,cdd_blocks\n";
  for (const auto& r : rows) {
    std::string chain;
    for (std::size_t j = 0; j < r.chain_signs.size(); ++j) {
      if (j) chain += ';';
      chain += to_string(r.chain_signs[j]);
    }
    out += fmt_g(r.nu) + "," + std::to_string(r.K) + "," + to_string(r.res_sign_S11) + "," + chain + "," +
           (r.cdd_found ? "true" : "false") + "," + r.cdd_blocks + "\n";
  }
  return out;
}

}  // namespace sgw
