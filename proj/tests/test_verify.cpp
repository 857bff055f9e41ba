#include "doctest.h"
#include "oracles.hpp"
#include "sgw/error.hpp"
#include "sgw/verify.hpp"

using namespace sgw;
using oracle::cplx;
using oracle::I;
using oracle::pi;

namespace {

const ScatteringModel& deformed() {
  static const ScatteringModel m = build_model(0.75, 1.0, CddSpec::automatic());
  return m;
}

ScatteringModel free_model() {
  ScatteringModel m = deformed();
  for (auto& row : m.S)
    for (auto& a : row) a = Amplitude::one();
  return m;
}

const FockSpace& space() {
  static const FockSpace F(deformed(), RapidityGrid::gauss_legendre(), 3);
  return F;
}

const TestFunction f0{Wedge::Left, {RapidityAtom{1, {0.2, -1.0}, 0.1, 1.0, 1.0}}, false};
const TestFunction g0{Wedge::Right, {RapidityAtom{1, {-0.1, 0.8}, -0.2, 0.8, 1.0}}, false};

// closed forms of the two atoms above, continued into the strip
cplx f0_plus(cplx z) {
  const cplx a = z - I * pi / 2.0 - 0.1;
  return std::exp(I * (std::cosh(z) * 0.2 + std::sinh(z))) * std::exp(-a * a);
}
cplx g0_minus(cplx z) {
  const cplx a = z - I * pi / 2.0 + 0.2;
  return std::exp(-I * (std::cosh(z) * -0.1 - std::sinh(z) * 0.8)) * std::exp(-0.8 * a * a);
}

DomainVector dv(cplx v, std::vector<GaussianTerm> a, std::vector<GaussianTerm> b) {
  DomainVector d;
  d.vacuum = v;
  d.xi = {std::move(a), std::move(b)};
  return d;
}

double max_diff(const FockVector& a, const FockVector& b) {
  double e = 0.0;
  for (const auto& [t, v] : a.sectors) {
    auto it = b.sectors.find(t);
    for (std::size_t i = 0; i < v.size(); ++i) e = std::max(e, std::abs(v[i] - (it == b.sectors.end() ? 0.0 : it->second[i])));
  }
  for (const auto& [t, v] : b.sectors)
    if (!a.sectors.count(t))
      for (auto c : v) e = std::max(e, std::abs(c));
  return e;
}

}  // namespace

TEST_CASE("commutator formula against operators: vacuum") {
  const auto& F = space();
  const auto op = operator_commutator(F, f0, g0, FockVector::vacuum());
  const auto fo = commutator_integral(F, f0, g0, FockVector::vacuum());
  CHECK(max_diff(op, fo.vector) <= 1e-8);
}

TEST_CASE("commutator formula against operators: one particle") {
  for (int N : {128, 256}) {
    const FockSpace F(deformed(), RapidityGrid::gauss_legendre(N), 3);
    for (int k = 1; k <= 2; ++k) {
      CAPTURE(N);
      CAPTURE(k);
      FockVector psi;
      psi.sectors[{k}] = F.sample(k, [](double x) { return cplx(0.7, 0.2) * std::exp(-(x - 0.3) * (x - 0.3)); }).values;
      const auto op = operator_commutator(F, f0, g0, psi);
      const auto fo = commutator_integral(F, f0, g0, psi);
      const double d = max_diff(op, fo.vector);
      CHECK(d <= std::max(1e-8, fo.grid_bound + fo.error_bound));
      if (N == 256) CHECK(d <= 1e-8);
    }
  }
}

TEST_CASE("commutator formula against operators: two particles") {
  const auto& F = space();
  FockVector raw;
  const int N = F.n();
  std::vector<cplx> v(N * N);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) {
      const double x = F.grid().nodes[i], y = F.grid().nodes[j];
      v[i * N + j] = std::exp(-(x - 0.3) * (x - 0.3) - 0.7 * (y + 0.2) * (y + 0.2));
    }
  raw.sectors[{1, 1}] = v;
  const auto psi = s_symmetrize(F, raw);
  const auto op = operator_commutator(F, f0, g0, psi);
  const auto fo = commutator_integral(F, f0, g0, psi);
  CHECK(max_diff(op, fo.vector) <= std::max(1e-8, fo.grid_bound + fo.error_bound));
  CHECK(fo.error_bound < 1e-9);
}

TEST_CASE("free case: wedge-separated data commute") {
  const auto m = free_model();
  for (double t : {-0.7, 0.0, 0.4}) {
    const auto k = commutator_kernel(m, f0, g0, {1}, {t});
    CHECK(std::abs(k.value) <= 1e-8);
  }
  const auto c = contour_shift_report(m, f0, g0, {0.4}, {1});
  CHECK(c.poles.empty());
  CHECK(c.R == cplx(0.0, 0.0));
  CHECK(std::abs(c.I0 - c.Ipi) <= 1e-8);
  CHECK(std::abs(c.I0) > 1e-3);
}

TEST_CASE("contour shift ledger") {
  const auto& m = deformed();
  const auto c = contour_shift_report(m, f0, g0, {0.4}, {1});
  CHECK(c.residual <= std::max(1e-7, c.error_bound));
  CHECK(c.crossing_residual <= 1e-8);
  CHECK(c.report.pass());
  REQUIRE(c.poles.size() == 2);
  // residues by an independent contour around each pole
  auto h = [&](cplx z) {
    return g0_minus(z) * oracle::product(1, {{0.75, 0, 1}, {1.5, 0, 1}}, z - 0.4) * f0_plus(z);
  };
  cplx R = 0.0;
  for (double im : {0.25 * pi, 0.75 * pi}) R += 2.0 * pi * I * oracle::contour_residue(h, cplx(0.4, im));
  CHECK(std::abs(R - c.R) <= 1e-8 * std::abs(R));

  const auto c2 = contour_shift_report(m, f0, g0, {0.4, -0.3}, {1, 2});
  CHECK(c2.poles.size() == 4);
  CHECK(c2.residual <= std::max(1e-7, c2.error_bound));

  try {
    contour_shift_report(m, f0, g0, {0.4, 0.4}, {1, 1});
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::PoleOnPath);
  }
}

TEST_CASE("weak commutator with fitted eta") {
  const auto& F = space();
  const auto probes = random_probes(4, 99);
  const auto eta = determine_eta(F, eta_fit_probes(4, 7), as_eta_probes(probes));
  for (const auto& p : probes) {
    const auto r = weak_commutator(F, p.f, p.g, p.Phi, p.Psi, eta);
    CHECK(r.pass);
    CHECK(r.decomposition_residual <= 1e-12);
    CHECK(std::abs(r.pieces.pp + r.pieces.cc) <= 1e-5 * r.scale);
    CHECK(std::abs(r.pieces.pc + r.pieces.cp) <= 1e-5 * r.scale);
  }
  // b1-only vectors: the cross pieces vanish one by one
  const auto b1 = dv({0.2, 0.1}, {{{0.5, 0.3}, 1.0, 0.1}}, {});
  const auto r = weak_commutator(F, f0, g0, b1, dv({0.4, -0.2}, {{{0.2, 0.8}, 0.8, -0.2}}, {}), eta);
  CHECK(std::abs(r.pieces.pc) <= 1e-5 * r.scale);
  CHECK(std::abs(r.pieces.cp) <= 1e-5 * r.scale);
}

TEST_CASE("weak commutator on the vacuum reduces to the scalar formula") {
  const auto& F = space();
  const auto eta = eta_from_scale(deformed(), std::sqrt(2 * pi), std::sqrt(2 * pi));
  const auto vac = dv({1.0, 0.0}, {}, {});
  const auto r = weak_commutator(F, f0, g0, vac, vac, eta);
  const auto k = commutator_kernel(deformed(), f0, g0, {}, {});
  CHECK(std::abs((r.lhs - r.rhs) + k.value) <= 1e-10);
  CHECK(r.difference <= 1e-8);
}

TEST_CASE("theorem residual falls under grid refinement") {
  const auto probes = random_probes(1, 5);
  const auto& p = probes[0];
  const auto eta = eta_from_scale(deformed(), std::sqrt(2 * pi), std::sqrt(2 * pi));
  double prev = 0.0;
  for (int N : {48, 96}) {
    const FockSpace F(deformed(), RapidityGrid::gauss_legendre(N), 3);
    const auto r = weak_commutator(F, p.f, p.g, p.Phi, p.Psi, eta);
    const double rel = r.difference / r.scale;
    if (N == 96) CHECK((rel <= prev / 4.0 || rel <= 1e-12));
    prev = rel;
  }
}

TEST_CASE("hypotheses are enforced") {
  const auto& F = space();
  const auto eta = eta_from_scale(deformed(), 1.0, 1.0);
  const auto v = dv({1.0, 0.0}, {{{0.5, 0.3}, 1.0, 0.1}}, {});
  auto expect = [&](const TestFunction& f, const TestFunction& g, const DomainVector& a, const char* word) {
    try {
      weak_commutator(F, f, g, a, v, eta);
      CHECK(false);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::HypothesisViolation);
      CHECK(std::string(e.what()).find(word) != std::string::npos);
    }
  };
  expect(scaled(f0, {0.0, 1.0}), g0, v, "f = f*");
  TestFunction fb = f0;
  fb.atoms.push_back(RapidityAtom{2, {0.0, -1.0}, 0.0, 1.0, 1.0});
  expect(fb, g0, v, "b1");
  expect(g0, g0, v, "left wedge");
  TestFunction out{Wedge::Left, {RapidityAtom{1, {2.0, -1.0}, 0.0, 1.0, 1.0}}, false};
  expect(out, g0, v, "certificate");
  auto hv = v;
  hv.higher.sectors[{1, 1}] = std::vector<cplx>(F.n() * F.n(), 0.0);
  expect(f0, g0, hv, "domain");
}

TEST_CASE("negative controls fire") {
  const auto& F = space();
  const auto eta = eta_from_scale(deformed(), std::sqrt(2 * pi), std::sqrt(2 * pi));
  const auto rep = negative_controls(F, random_probes(5, 42), eta);
  for (const auto& e : rep.entries) {
    CAPTURE(e.name);
    CAPTURE(e.note);
    CHECK(e.pass);
  }
  CHECK(rep.entries.size() == 3);
}

TEST_CASE("seeded probes are reproducible and satisfy the hypotheses") {
  const auto a = random_probes(3, 11), b = random_probes(3, 11);
  for (int i = 0; i < 3; ++i) CHECK(probe_hash(as_eta_probes(a)[i]) == probe_hash(as_eta_probes(b)[i]));
  CHECK(probe_hash(as_eta_probes(random_probes(1, 12))[0]) != probe_hash(as_eta_probes(a)[0]));
  for (const auto& p : a) CHECK_NOTHROW(check_hypotheses(space(), p.f, p.g, p.Phi, p.Psi));
}
