#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "sgw/error.hpp"
#include "sgw/model.hpp"

using namespace sgw;
using oracle::cplx;
using oracle::pi;

namespace {
std::vector<double> linspace(int n, double lo, double hi) {
  std::vector<double> g;
  for (int j = 0; j < n; ++j) g.push_back(lo + (hi - lo) * j / (n - 1));
  return g;
}
}  // namespace

TEST_CASE("breather count") {
  CHECK(breather_count(0.75) == 2);
  CHECK(breather_count(0.3) == 6);
  CHECK(breather_count(0.5) == 3);
  CHECK(breather_count(0.4) == 4);
  CHECK_THROWS_AS(breather_count(1.0), Error);
  CHECK_THROWS_AS(breather_count(0.0), Error);
}

TEST_CASE("momentum") {
  auto p = momentum(1.0, cplx(0, 0));
  CHECK(std::abs(p.p0 - 1.0) < 1e-15);
  CHECK(std::abs(p.p1) < 1e-15);
  p = momentum(1.0, cplx(0, pi));
  CHECK(std::abs(p.p0 + 1.0) < 1e-15);
  CHECK(std::abs(p.p1) < 1e-15);
  p = momentum(1.0, cplx(1.0, 0));
  CHECK(p.p0.real() == doctest::Approx(1.543081).epsilon(1e-6));
  CHECK(p.p1.real() == doctest::Approx(1.175201).epsilon(1e-6));
  for (double th : {-2.0, 0.3, 4.1}) {
    const auto q = momentum(0.7, cplx(th, 0));
    CHECK(std::abs(q.p0 * q.p0 - q.p1 * q.p1 - 0.49) < 1e-12 * std::norm(q.p0));
  }
}

TEST_CASE("fusion table at nu = 0.75") {
  const auto t = fusion_table(0.75, 2);
  bool seen11 = false, seen12 = false;
  for (const auto& e : t) {
    CHECK(e.angle == e.shiftA + e.shiftB);
    CHECK(e.angle > 0.0);
    CHECK(e.angle < pi);
    if (e.alpha == 1 && e.beta == 1 && e.gamma == 2) {
      seen11 = true;
      CHECK(e.shiftA == doctest::Approx(1.178097).epsilon(1e-6));
      CHECK(e.angle == doctest::Approx(2.356194).epsilon(1e-6));
    }
    if (e.alpha == 1 && e.beta == 2 && e.gamma == 1) {
      seen12 = true;
      CHECK(e.shiftA == doctest::Approx(0.785398).epsilon(1e-6));
      CHECK(e.angle == doctest::Approx(1.963495).epsilon(1e-6));
    }
  }
  CHECK(seen11);
  CHECK(seen12);
  CHECK(t.size() == 3);
  for (double nu : {0.21, 0.37, 0.55}) {
    for (const auto& e : fusion_table(nu, breather_count(nu))) CHECK(e.angle == e.shiftA + e.shiftB);
  }
}

TEST_CASE("minimal S11") {
  const auto A = minimal_S11(0.75);
  const auto poles = poles_in_strip(A);
  REQUIRE(poles.size() == 2);
  CHECK(poles[0].location.im == doctest::Approx(0.25 * pi));
  CHECK(poles[1].location.im == doctest::Approx(0.75 * pi));
  CHECK(std::abs(residue(A, {0, 0.75 * pi}) - cplx(0, -2)) < 1e-12);
  CHECK(std::abs(residue(minimal_S11(0.25), {0, 0.25 * pi}) - cplx(0, 2)) < 1e-12);
  CHECK(std::abs(eval_amplitude(A, cplx(0, 0)) + 1.0) < 1e-15);
}

TEST_CASE("bootstrap reproduces the fusion-angle pole pair") {
  const double nu = 0.75;
  const auto t = fusion_table(nu, 2);
  const FusionEntry e = t[0];
  REQUIRE(e.alpha == 1);
  REQUIRE(e.beta == 1);
  const auto S12 = bootstrap_fuse(minimal_S11(nu), e);
  const auto poles = poles_in_strip(S12);
  REQUIRE(poles.size() == 2);
  CHECK(std::abs(poles[0].location.im - 0.375 * pi) < 1e-10);
  CHECK(std::abs(poles[1].location.im - 0.625 * pi) < 1e-10);
  CHECK(poles[0].order == 1);
  CHECK(poles[1].order == 1);
  const auto one = bootstrap_fuse(Amplitude::one(), e);
  CHECK(std::abs(eval_amplitude(one, cplx(0.4, 0.2)) - 1.0) == 0.0);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(2.0 / 3.0 + 1e-3, 0.8 - 1e-3);
  for (int j = 0; j < 20; ++j) {
    const double v = u(rng);
    const auto P = poles_in_strip(sine_gordon_amplitudes(v, 2)[0][1]);
    REQUIRE(P.size() == 2);
    CHECK(std::abs(P[0].location.im - pi * v / 2) < 1e-10);
    CHECK(std::abs(P[1].location.im - pi * (1 - v / 2)) < 1e-10);
  }
}

TEST_CASE("bootstrap chain matches the closed form and is symmetric") {
  for (double nu : {0.3, 0.45, 0.62}) {
    const int K = breather_count(nu);
    const auto S = sine_gordon_amplitudes(nu, K);
    for (int k = 1; k <= K; ++k) {
      for (int l = 1; l <= K; ++l) {
        const cplx z(0.37, 0.41);
        CHECK(std::abs(eval_amplitude(S[k - 1][l - 1], z) - eval_amplitude(S[l - 1][k - 1], z)) < 1e-10);
      }
      // S_1k = B_{(k+1)nu/2} B_{(k-1)nu/2}
      const cplx z(-0.8, 0.3);
      cplx ref = oracle::block((k + 1) * nu / 2, 0, 1, z);
      if (k > 1) ref *= oracle::block((k - 1) * nu / 2, 0, 1, z);
      CHECK(std::abs(eval_amplitude(S[0][k - 1], z) - ref) < 1e-12);
    }
  }
  // S22 at nu = 0.75 by bootstrap through d = b2
  const auto S = sine_gordon_amplitudes(0.75, 2);
  const auto grid = linspace(200, -5, 5);
  const auto rep = verify_axioms(S[1][1], grid, 1e-10);
  CHECK(rep.pass());
  CHECK(std::isfinite(std::abs(eval_amplitude(S[1][1], cplx(0, 0)))));
}

TEST_CASE("fusion kinematics") {
  const auto M = build_model(0.75, 1.0, CddSpec::automatic());
  const auto p = momentum(M.mass(1), cplx(0, pi * 0.375));
  const auto q = momentum(M.mass(1), cplx(0, -pi * 0.375));
  CHECK((p.p0 + q.p0).real() == doctest::Approx(0.765367).epsilon(1e-6));
  CHECK(std::abs(M.mass(2) - 2 * std::cos(pi * 0.375)) < 1e-12);
  const auto rep = check_fusion_kinematics(M, linspace(50, -3, 3));
  CHECK(rep.pass());
  const double th = 1.3;
  const auto a = momentum(1.0, cplx(th, 0.375 * pi)), b = momentum(1.0, cplx(th, -0.375 * pi)),
             c = momentum(M.mass(2), cplx(th, 0));
  CHECK(std::abs(a.p0 + b.p0 - c.p0) < 1e-12);
  CHECK(std::abs(a.p1 + b.p1 - c.p1) < 1e-12);
}

TEST_CASE("mass closed form agrees with recursive fusion for many breathers") {
  ScatteringModel M;
  M.nu = 0.21;
  M.K = breather_count(M.nu);
  for (int k = 1; k <= M.K; ++k) M.species.push_back({k, breather_mass(k, M.nu)});
  M.fusion = fusion_table(M.nu, M.K);
  CHECK(check_fusion_kinematics(M, linspace(11, -2, 2)).pass());
}

TEST_CASE("residue sign classification") {
  CHECK(classify_residue(cplx(0, 2)) == ResidueSign::Plus);
  CHECK(classify_residue(cplx(0, -2)) == ResidueSign::Minus);
  CHECK(classify_residue(cplx(1, 1)) == ResidueSign::Other);
  CHECK(to_string(ResidueSign::Minus) == "minus");
}

TEST_CASE("CDD search at nu = 0.75") {
  const double b = (std::sin(0.75 * pi) + std::sin(1.5 * pi)) / (std::sin(0.75 * pi) - std::sin(1.5 * pi));
  CHECK(b == doctest::Approx(-0.171573).epsilon(1e-5));
  CHECK(eval_block(Block(1.5), cplx(0, 0.75 * pi)).real() == doctest::Approx(b).epsilon(1e-12));
  const auto r = find_cdd(0.75);
  REQUIRE(r.found);
  CHECK(r.verification.pass());
  REQUIRE(r.factors.size() == 2);
  for (const auto& f : r.factors) {
    CHECK(!f.blocks().empty());
    CHECK(poles_in_strip(f).empty());
  }
  CHECK(describe_factors(r.factors) == "S11=1.5;S12=1.5");
}

TEST_CASE("CDD search reports an exhausted budget") {
  CddSearchOptions opt;
  opt.max_blocks = 0;
  const auto r = find_cdd(0.75, opt);
  CHECK_FALSE(r.found);
  CHECK(r.note.find("not a proof") != std::string::npos);
}

TEST_CASE("deformed model") {
  const auto M = build_model(0.75, 1.0, CddSpec::automatic());
  CHECK(M.K == 2);
  CHECK(M.axioms.pass());
  CHECK(M.poles.pass());
  CHECK(M.positivity.pass());
  CHECK_FALSE(M.positivity_violation);
  CHECK(M.bootstrap.pass());
  const auto p11 = classified_poles(M, 1, 1);
  REQUIRE(p11.size() == 2);
  CHECK(p11[1].channel == PoleChannel::S);
  CHECK(p11[0].channel == PoleChannel::T);
  CHECK(std::abs(p11[0].residue + p11[1].residue) < 1e-8 * std::abs(p11[1].residue));
  CHECK(classify_residue(p11[1].residue) == ResidueSign::Plus);
  const auto p12 = classified_poles(M, 1, 2);
  REQUIRE(p12.size() == 2);
  CHECK(p12[1].channel == PoleChannel::S);
  CHECK(classify_residue(p12[1].residue) == ResidueSign::Plus);
  // CDD zeros are reported
  CHECK(!M.cdd_zeros.empty());
}

TEST_CASE("undeformed model is flagged") {
  const auto M = build_model(0.75, 1.0, CddSpec::trivial());
  CHECK(M.positivity_violation);
  CHECK(M.axioms.pass());
  const auto p = classified_poles(M, 1, 1);
  CHECK(std::abs(p[1].residue - cplx(0, -2)) < 1e-10);
}

TEST_CASE("explicit CDD factors are validated") {
  CddSpec spec;
  spec.kind = CddSpec::Kind::Explicit;
  spec.factors = {Amplitude(1, {Block(0.4)})};
  CHECK_THROWS_AS(build_model(0.75, 1.0, spec), Error);
  spec.factors = {Amplitude(1, {Block(1.5)}), Amplitude(1, {Block(1.5)})};
  CHECK_FALSE(build_model(0.75, 1.0, spec).positivity_violation);
}

TEST_CASE("coupling scan") {
  const auto row = scan_point(0.75);
  CHECK(row.res_sign_S11 == ResidueSign::Minus);
  CHECK(row.cdd_found);
  CHECK(scan_point(0.25, {}, false).res_sign_S11 == ResidueSign::Plus);
  CHECK(scan_point(0.5, {}, false).res_sign_S11 == ResidueSign::Double);
  bool wrong = false;
  for (auto s : scan_point(0.21, {}, false).chain_signs) wrong = wrong || s == ResidueSign::Minus;
  CHECK(wrong);
  for (double nu : {0.1, 0.3, 0.45, 0.55, 0.7, 0.9}) {
    const cplx r = residue(minimal_S11(nu), {0, pi * nu});
    CHECK(std::abs(r - cplx(0, 2 * std::tan(pi * nu))) < 1e-8 * std::abs(r));
  }
  const auto rows = scan_coupling(0.05, 0.95, 19, {}, false, 4);
  CHECK(rows.size() == 19);
  const auto csv = scan_csv(rows);
  CHECK(csv.rfind("nu,K,res_sign_S11,chain_signs,cdd_found,cdd_blocks\n", 0) == 0);
  CHECK(csv == scan_csv(scan_coupling(0.05, 0.95, 19, {}, false, 1)));
}
