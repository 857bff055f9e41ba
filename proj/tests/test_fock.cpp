#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "sgw/error.hpp"
#include "sgw/fock.hpp"

using namespace sgw;
using oracle::cplx;
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

std::vector<cplx> noise(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> g;
  std::vector<cplx> v(n);
  for (auto& c : v) c = cplx(g(rng), g(rng));
  return v;
}

// all tuples of length n over species 1..K, independent Gaussian noise
FockVector random_raw(std::mt19937_64& rng, int K, int N, int n, bool b1_only = false) {
  FockVector v;
  std::size_t size = 1;
  for (int j = 0; j < n; ++j) size *= N;
  const int kmax = b1_only ? 1 : K;
  SpeciesTuple t(n, 1);
  while (true) {
    v.sectors[t] = noise(rng, size);
    int d = n - 1;
    while (d >= 0 && t[d] == kmax) t[d--] = 1;
    if (d < 0) break;
    ++t[d];
  }
  return v;
}

SmearedWavefunction gaussian(const FockSpace& F, int k, double mu, double a, cplx c) {
  return F.sample(k, [=](double x) { return c * std::exp(-a * (x - mu) * (x - mu)); });
}

double diff(const FockSpace& F, const FockVector& a, const FockVector& b) { return norm(F, a - b); }

}  // namespace

TEST_CASE("rapidity grid") {
  const auto g = RapidityGrid::gauss_legendre();
  CHECK(g.size() == 128);
  double s = 0.0;
  for (double w : g.weights) s += w;
  CHECK(std::abs(s - 10.0) < 1e-12);
  for (int i = 1; i < g.size(); ++i) CHECK(g.nodes[i] > g.nodes[i - 1]);
  CHECK(g.nodes.front() > -5.0);
  CHECK(g.nodes.back() < 5.0);
}

TEST_CASE("twist table matches closed form") {
  const FockSpace F(deformed(), RapidityGrid::gauss_legendre(24), 3);
  const double nu = 0.75;
  auto S11 = [&](cplx z) { return oracle::product(1, {{nu, 0, 1}, {1.5, 0, 1}}, z); };
  auto S12 = [&](cplx z) {
    return oracle::product(1, {{nu, pi * nu / 2, 1}, {nu, -pi * nu / 2, 1}, {1.5, 0, 1}}, z);
  };
  const auto& x = F.grid().nodes;
  double e = 0.0;
  for (int i = 0; i < F.n(); ++i)
    for (int j = 0; j < F.n(); ++j) {
      e = std::max(e, std::abs(F.S(1, 1, i, j) - S11(x[j] - x[i])));
      e = std::max(e, std::abs(F.S(1, 2, i, j) - S12(x[j] - x[i])));
      e = std::max(e, std::abs(F.S(2, 1, i, j) - S12(x[j] - x[i])));
    }
  CHECK(e < 1e-13);
}

TEST_CASE("P2 against the two-term formula") {
  const FockSpace F(deformed(), RapidityGrid::gauss_legendre(20), 3);
  std::mt19937_64 rng(3);
  const auto raw = random_raw(rng, 2, F.n(), 2);
  const auto P = s_symmetrize(F, raw);
  const int N = F.n();
  const auto& x = F.grid().nodes;
  auto S12 = [&](cplx z) {
    return oracle::product(1, {{0.75, pi * 0.375, 1}, {0.75, -pi * 0.375, 1}, {1.5, 0, 1}}, z);
  };
  const auto& a = raw.sectors.at({1, 2});
  const auto& b = raw.sectors.at({2, 1});
  const auto& p = P.sectors.at({1, 2});
  double e = 0.0;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) {
      const cplx want = 0.5 * (a[i * N + j] + S12(x[j] - x[i]) * b[j * N + i]);
      e = std::max(e, std::abs(p[i * N + j] - want));
    }
  CHECK(e < 1e-13);
}

TEST_CASE("P_n identity, bosonic free case, idempotence and self-adjointness") {
  std::mt19937_64 rng(11);
  SUBCASE("n=1 identity") {
    const FockSpace F(deformed(), RapidityGrid::gauss_legendre(16), 3);
    const auto v = random_raw(rng, 2, F.n(), 1);
    CHECK(diff(F, s_symmetrize(F, v), v) == 0.0);
  }
  SUBCASE("S = 1 gives plain symmetrization") {
    const FockSpace F(free_model(), RapidityGrid::gauss_legendre(12), 3);
    const auto v = random_raw(rng, 2, F.n(), 2);
    const auto P = s_symmetrize(F, v);
    const int N = F.n();
    double e = 0.0;
    for (auto [k, l] : {std::pair{1, 1}, {1, 2}, {2, 1}, {2, 2}})
      for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) {
          const cplx want = 0.5 * (v.sectors.at({k, l})[i * N + j] + v.sectors.at({l, k})[j * N + i]);
          e = std::max(e, std::abs(P.sectors.at({k, l})[i * N + j] - want));
        }
    CHECK(e < 1e-15);
  }
  for (int n = 2; n <= 3; ++n) {
    CAPTURE(n);
    const FockSpace F(deformed(), RapidityGrid::gauss_legendre(n == 2 ? 128 : 24), 3);
    const auto v = random_raw(rng, 2, F.n(), n);
    const auto u = random_raw(rng, 2, F.n(), n);
    const auto Pv = s_symmetrize(F, v);
    const auto PPv = s_symmetrize(F, Pv);
    CHECK(diff(F, PPv, Pv) / norm(F, Pv) <= 1e-9);
    const cplx l = inner_product(F, u, Pv);
    const cplx r = inner_product(F, s_symmetrize(F, u), v);
    CHECK(std::abs(l - r) / std::abs(l) <= 1e-9);
    CHECK(exchange_residual(F, Pv) <= 1e-9);
    CHECK(exchange_residual(F, v) > 1e-2);
  }
}

TEST_CASE("budget") {
  const FockSpace F(deformed(), RapidityGrid::gauss_legendre(3), 4);
  FockVector v;
  v.sectors[{1, 1, 1, 1, 1}] = std::vector<cplx>(243, 1.0);
  CHECK_THROWS_AS(s_symmetrize(F, v), Error);
  CHECK_THROWS_AS(FockSpace(deformed(), RapidityGrid::gauss_legendre(3), 5), Error);
}

TEST_CASE("creation on the vacuum and truncation") {
  const FockSpace F(deformed(), RapidityGrid::gauss_legendre(), 3);
  const auto h = gaussian(F, 1, 0.3, 1.0, {0.5, 0.2});
  const auto h2 = gaussian(F, 2, -0.4, 0.7, {0.1, -1.0});
  const auto one = create(F, h, FockVector::vacuum());
  REQUIRE(one.sectors.size() == 1);
  CHECK(one.sectors.begin()->first == SpeciesTuple{1});
  double want = 0.0;
  for (int i = 0; i < F.n(); ++i) {
    CHECK(one.sectors.at({1})[i] == h.values[i]);
    want += F.grid().weights[i] * std::norm(h.values[i]);
  }
  CHECK(std::abs(inner_product(F, one, one).real() - want) < 1e-14);
  // normalization of an analytic Gaussian: integral |c|^2 exp(-2a x^2)
  CHECK(std::abs(want - std::norm(cplx{0.5, 0.2}) * std::sqrt(pi / 2.0)) < 1e-12);
  cplx hh = 0.0;
  const auto h1b = gaussian(F, 1, -0.2, 0.5, {0.3, 0.9});
  for (int i = 0; i < F.n(); ++i) hh += F.grid().weights[i] * std::conj(h.values[i]) * h1b.values[i];
  CHECK(std::abs(inner_product(F, one, create(F, h1b, FockVector::vacuum())) - hh) < 1e-14);
  CHECK(inner_product(F, one, create(F, h2, FockVector::vacuum())) == cplx(0.0, 0.0));

  FockSpace F1(deformed(), RapidityGrid::gauss_legendre(8), 1);
  const auto g = gaussian(F1, 1, 0.0, 1.0, 1.0);
  const auto o = create(F1, g, FockVector::vacuum());
  CHECK_THROWS_AS(create(F1, g, o), Error);
  try {
    create(F1, g, o);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::TruncationOverflow);
  }
}

TEST_CASE("two-particle exchange of created pairs") {
  const FockSpace F(deformed(), RapidityGrid::gauss_legendre(), 3);
  const auto h = gaussian(F, 1, 0.3, 1.0, {0.5, 0.2});
  const auto hp = gaussian(F, 2, -0.4, 0.7, {0.1, -1.0});
  const auto v = create(F, h, create(F, hp, FockVector::vacuum()));
  CHECK(exchange_residual(F, v) <= 1e-9);
  // reversed order, twisted by S_12 under the integral
  const int N = F.n();
  std::vector<cplx> K(N * N);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) K[i * N + j] = hp.values[i] * h.values[j] * F.S(1, 2, i, j);
  const auto w = create_pair(F, 2, 1, K, FockVector::vacuum());
  CHECK(diff(F, v, w) <= 1e-9);
}

TEST_CASE("annihilation: vacuum, delta term, adjointness") {
  const FockSpace F(deformed(), RapidityGrid::gauss_legendre(), 3);
  const auto h = gaussian(F, 1, 0.3, 1.0, {0.5, 0.2});
  const auto hp = gaussian(F, 1, -0.4, 0.7, {0.1, -1.0});
  const auto h2 = gaussian(F, 2, 0.1, 0.9, {1.0, 0.4});
  CHECK(annihilate(F, h, FockVector::vacuum()).empty());
  cplx d = 0.0;
  for (int i = 0; i < F.n(); ++i) d += F.grid().weights[i] * h.values[i] * hp.values[i];
  const auto r = annihilate(F, h, create(F, hp, FockVector::vacuum()));
  CHECK(std::abs(r.sectors.at({})[0] - d) < 1e-14);
  const auto r2 = annihilate(F, h, create(F, h2, FockVector::vacuum()));
  CHECK(norm(F, r2) == 0.0);

  // <z+(h) Phi, Psi> = <Phi, z(conj h) Psi>
  std::mt19937_64 rng(5);
  const FockSpace G(deformed(), RapidityGrid::gauss_legendre(32), 3);
  for (int n = 0; n <= 2; ++n) {
    CAPTURE(n);
    const auto phi = s_symmetrize(G, n == 0 ? FockVector::vacuum() : random_raw(rng, 2, G.n(), n));
    const auto psi = s_symmetrize(G, random_raw(rng, 2, G.n(), n + 1));
    for (int k = 1; k <= 2; ++k) {
      SmearedWavefunction hk{k, noise(rng, G.n())}, hc = hk;
      for (auto& c : hc.values) c = std::conj(c);
      const cplx l = inner_product(G, create(G, hk, phi), psi);
      const cplx rr = inner_product(G, phi, annihilate(G, hc, psi));
      CHECK(std::abs(l - rr) / std::abs(l) <= 1e-10);
    }
  }
  // linear, not conjugate-linear
  const auto psi = create(F, hp, FockVector::vacuum());
  SmearedWavefunction ih = h;
  for (auto& c : ih.values) c *= cplx(0, 1);
  CHECK(std::abs(annihilate(F, ih, psi).sectors.at({})[0] - cplx(0, 1) * d) < 1e-14);
}

TEST_CASE("CPT and translations") {
  std::mt19937_64 rng(7);
  const FockSpace F(deformed(), RapidityGrid::gauss_legendre(24), 3);
  FockVector v = FockVector::vacuum();
  v.sectors[{}][0] = {0.3, -0.8};
  for (int n = 1; n <= 3; ++n) v += s_symmetrize(F, random_raw(rng, 2, F.n(), n));
  FockVector u = FockVector::vacuum();
  for (int n = 1; n <= 3; ++n) u += s_symmetrize(F, random_raw(rng, 2, F.n(), n));
  CHECK(diff(F, cpt(cpt(v)), v) <= 1e-12);
  CHECK(diff(F, cpt(FockVector::vacuum()), FockVector::vacuum()) == 0.0);
  const cplx a = inner_product(F, cpt(u), cpt(v)), b = std::conj(inner_product(F, u, v));
  CHECK(std::abs(a - b) <= 1e-10 * std::abs(b));
  // J maps the S-symmetric space to itself
  CHECK(exchange_residual(F, cpt(v)) <= 1e-9);
  // explicit reversal
  const auto& s = v.sectors.at({1, 2, 2});
  const auto& t = cpt(v).sectors.at({2, 2, 1});
  const int N = F.n();
  CHECK(t[(3 * N + 5) * N + 7] == std::conj(s[(7 * N + 5) * N + 3]));

  const auto U = poincare(F, 0.7, -0.3, 0.0, v);
  CHECK(std::abs(norm(F, U.vector) - norm(F, v)) <= 1e-10);
  CHECK(U.interpolation_error == 0.0);

  const FockSpace G(deformed(), RapidityGrid::gauss_legendre(), 3);
  const auto h = gaussian(G, 2, 0.3, 1.0, {0.5, 0.2});
  const double a0 = 0.7, a1 = -0.3;
  const auto lhs = poincare(G, a0, a1, 0.0, create(G, h, FockVector::vacuum())).vector;
  const double m2 = 2 * std::cos(pi * 0.375);
  auto ph = G.sample(2, [&](double x) {
    const double dot = m2 * (std::cosh(x) * a0 - std::sinh(x) * a1);
    return std::exp(cplx(0, dot)) * cplx{0.5, 0.2} * std::exp(-(x - 0.3) * (x - 0.3));
  });
  CHECK(diff(G, lhs, create(G, ph, FockVector::vacuum())) <= 1e-10);
}

TEST_CASE("boosts by interpolation") {
  const FockSpace F(deformed(), RapidityGrid::gauss_legendre(), 3);
  const double lam = 0.37;
  const auto h = gaussian(F, 1, 0.2, 1.0, 1.0);
  const auto hl = gaussian(F, 1, 0.2 + lam, 1.0, 1.0);
  const auto res = poincare(F, 0.0, 0.0, lam, create(F, h, FockVector::vacuum()));
  const double err = diff(F, res.vector, create(F, hl, FockVector::vacuum()));
  CHECK(err < 1e-4);
  CHECK(res.interpolation_error > 0.0);
  CHECK(res.interpolation_error < 1e-3);
  CHECK(std::abs(norm(F, res.vector) - norm(F, create(F, h, FockVector::vacuum()))) < 1e-4);
  CHECK_THROWS_AS(poincare(F, 0.0, 0.0, lam, create(F, h, FockVector::vacuum()), 1e-14), Error);
}

TEST_CASE("ZF relations: free case reduces to CCR") {
  const FockSpace F(free_model(), RapidityGrid::gauss_legendre(64), 3);
  std::mt19937_64 rng(9);
  const auto h1 = gaussian(F, 1, 0.3, 1.0, {0.5, 0.2});
  const auto h2 = gaussian(F, 1, -0.4, 0.7, {0.1, -1.0});
  std::vector<FockVector> probes{FockVector::vacuum(), s_symmetrize(F, random_raw(rng, 2, F.n(), 1)),
                                 s_symmetrize(F, random_raw(rng, 2, F.n(), 2, true))};
  for (auto& p : probes) p *= 1.0 / norm(F, p);
  const auto rep = zf_relation_check(F, h1, h2, probes, 1e-10);
  CHECK(rep.pass());
  CHECK(rep.entries.size() == 6);
}

TEST_CASE("ZF relations: deformed model and the wrong-twist control") {
  const FockSpace F(deformed(), RapidityGrid::gauss_legendre(), 3);
  std::mt19937_64 rng(13);
  std::vector<FockVector> probes{FockVector::vacuum(), s_symmetrize(F, random_raw(rng, 2, F.n(), 1)),
                                 s_symmetrize(F, random_raw(rng, 2, F.n(), 2, true))};
  for (auto& p : probes) p *= 1.0 / norm(F, p);
  for (auto [k, l] : {std::pair{1, 1}, {1, 2}, {2, 1}}) {
    CAPTURE(k);
    CAPTURE(l);
    const auto h1 = gaussian(F, k, 0.3, 1.0, {0.5, 0.2});
    const auto h2 = gaussian(F, l, -0.4, 0.7, {0.1, -1.0});
    const auto rep = zf_relation_check(F, h1, h2, probes, 1e-9);
    for (const auto& e : rep.entries) {
      CAPTURE(e.name);
      CHECK(e.pass);
    }
    const auto bad = zf_relation_check(F, h1, h2, {FockVector::vacuum()}, 1e-9, true);
    CHECK_FALSE(bad.pass());
  }
}

TEST_CASE("dump format") {
  FockVector v = FockVector::vacuum();
  v.sectors[{2}] = {cplx(0.1, -2.0)};
  const auto s = dump(v);
  CHECK(s == "sector - n=0 size=1\n1 0\nsector 2 n=1 size=1\n0.10000000000000001 -2\n");
}
