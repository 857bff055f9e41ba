#include "sgw/runner.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "sgw/error.hpp"
#include "sgw/verify.hpp"

namespace sgw {

namespace {

using json = nlohmann::ordered_json;
constexpr double kPi = 3.14159265358979323846;

[[noreturn]] void bad(const std::string& path, const std::string& what) {
  fail(ErrorCode::ConfigError, path + ": " + what);
}

void allow(const json& j, const std::string& path, std::initializer_list<const char*> keys) {
  if (!j.is_object()) bad(path, "expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::none_of(keys.begin(), keys.end(), [&](const char* k) { return it.key() == k; }))
      bad(path + "." + it.key(), "unknown key");
  }
}

double real(const json& j, const char* key, const std::string& path, double def, double lo, double hi) {
  if (!j.contains(key)) return def;
  const auto& v = j.at(key);
  const std::string p = path + "." + key;
  if (!v.is_number()) bad(p, "expected a number");
  const double x = v.get<double>();
  if (!(x >= lo && x <= hi)) {
    std::ostringstream os;
    os << "out of range [" << lo << ", " << hi << "]";
    bad(p, os.str());
  }
  return x;
}

long long integer(const json& j, const char* key, const std::string& path, long long def, long long lo,
                  long long hi) {
  if (!j.contains(key)) return def;
  const auto& v = j.at(key);
  const std::string p = path + "." + key;
  if (!v.is_number_integer()) bad(p, "expected an integer");
  const long long x = v.get<long long>();
  if (x < lo || x > hi) bad(p, "out of range [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  return x;
}

bool boolean(const json& j, const char* key, const std::string& path, bool def) {
  if (!j.contains(key)) return def;
  if (!j.at(key).is_boolean()) bad(path + "." + key, "expected true or false");
  return j.at(key).get<bool>();
}

cplx complex_value(const json& v, const std::string& path) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
    return {v[0].get<double>(), v[1].get<double>()};
  bad(path, "expected a number or [re, im]");
}

SpacetimePoint point(const json& v, const std::string& path) {
  if (!(v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())) bad(path, "expected [x0, x1]");
  return {v[0].get<double>(), v[1].get<double>()};
}

std::vector<double> block_list(const json& v, const std::string& path) {
  if (!v.is_array()) bad(path, "expected a list of block parameters");
  std::vector<double> a;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) bad(path + "[" + std::to_string(i) + "]", "expected a number");
    const double x = v[i].get<double>();
    if (!(x > 1.0 && x < 2.0)) bad(path + "[" + std::to_string(i) + "]", "block parameter must lie in (1,2)");
    a.push_back(x);
  }
  return a;
}

// "S11=1.5+1.7;S12=1.5" or {"S11": [1.5, 1.7], "S12": [1.5]}
CddSpec explicit_cdd(const std::map<int, std::vector<double>>& comps) {
  CddSpec spec;
  spec.kind = CddSpec::Kind::Explicit;
  const int kmax = comps.empty() ? 0 : comps.rbegin()->first;
  spec.factors.assign(kmax, Amplitude::one());
  for (const auto& [k, as] : comps) {
    std::vector<Block> b;
    for (double a : as) b.emplace_back(a);
    spec.factors[k - 1] = Amplitude(1, std::move(b));
  }
  return spec;
}

int component_index(const std::string& key, const std::string& path) {
  if (key.size() < 3 || key.rfind("S1", 0) != 0) bad(path, "components are named S1k");
  int k = 0;
  for (std::size_t i = 2; i < key.size(); ++i) {
    if (key[i] < '0' || key[i] > '9') bad(path, "components are named S1k");
    k = 10 * k + (key[i] - '0');
  }
  if (k < 1 || k > 16) bad(path, "component index out of range");
  return k;
}

CddSpec parse_cdd(const json& v, const std::string& path, std::string& text) {
  if (v.is_number()) {
    if (v.get<double>() != 1.0) bad(path, "the only numeric CDD factor is 1");
    text = "1";
    return CddSpec::trivial();
  }
  if (v.is_string()) {
    text = v.get<std::string>();
    if (text == "auto") return CddSpec::automatic();
    if (text == "trivial" || text == "none" || text == "1") return CddSpec::trivial();
    std::map<int, std::vector<double>> comps;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ';')) {
      const auto eq = item.find('=');
      if (eq == std::string::npos) bad(path, "expected auto, trivial or S1k=a+b;...");
      const int k = component_index(item.substr(0, eq), path);
      std::stringstream as(item.substr(eq + 1));
      std::string tok;
      json arr = json::array();
      while (std::getline(as, tok, '+')) {
        try {
          std::size_t used = 0;
          arr.push_back(std::stod(tok, &used));
          if (used != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
          bad(path, "cannot read block parameter '" + tok + "'");
        }
      }
      comps[k] = block_list(arr, path);
    }
    return explicit_cdd(comps);
  }
  if (v.is_object()) {
    std::map<int, std::vector<double>> comps;
    for (auto it = v.begin(); it != v.end(); ++it)
      comps[component_index(it.key(), path + "." + it.key())] = block_list(it.value(), path + "." + it.key());
    CddSpec s = explicit_cdd(comps);
    text = describe_factors(s.factors);
    return s;
  }
  bad(path, "expected auto, trivial, 1 or an explicit block list");
}

TestFunction parse_function(const json& j, const std::string& path) {
  allow(j, path, {"wedge", "atoms"});
  TestFunction f;
  if (!j.contains("wedge") || !j.at("wedge").is_string()) bad(path + ".wedge", "expected left or right");
  const auto w = j.at("wedge").get<std::string>();
  if (w == "left")
    f.wedge = Wedge::Left;
  else if (w == "right")
    f.wedge = Wedge::Right;
  else
    bad(path + ".wedge", "expected left or right");
  if (!j.contains("atoms") || !j.at("atoms").is_array() || j.at("atoms").empty())
    bad(path + ".atoms", "expected a non-empty list");
  for (std::size_t i = 0; i < j.at("atoms").size(); ++i) {
    const auto& a = j.at("atoms")[i];
    const std::string p = path + ".atoms[" + std::to_string(i) + "]";
    if (!a.is_object() || !a.contains("kind") || !a.at("kind").is_string()) bad(p + ".kind", "expected rapidity or bump");
    const auto kind = a.at("kind").get<std::string>();
    if (kind == "rapidity") {
      allow(a, p, {"kind", "species", "x", "theta0", "beta", "coeff"});
      RapidityAtom r;
      r.species = static_cast<int>(integer(a, "species", p, 1, 1, 16));
      if (!a.contains("x")) bad(p + ".x", "missing");
      r.x = point(a.at("x"), p + ".x");
      r.theta0 = real(a, "theta0", p, 0.0, -10.0, 10.0);
      r.beta = real(a, "beta", p, 1.0, 1e-3, 100.0);
      if (a.contains("coeff")) r.coeff = complex_value(a.at("coeff"), p + ".coeff");
      f.atoms.emplace_back(r);
    } else if (kind == "bump") {
      allow(a, p, {"kind", "species", "center", "radius", "amplitude", "nodes"});
      PositionBump b;
      b.species = static_cast<int>(integer(a, "species", p, 1, 1, 16));
      if (!a.contains("center")) bad(p + ".center", "missing");
      b.center = point(a.at("center"), p + ".center");
      b.radius = real(a, "radius", p, 1.0, 1e-3, 100.0);
      if (a.contains("amplitude")) b.amplitude = complex_value(a.at("amplitude"), p + ".amplitude");
      b.nodes = static_cast<int>(integer(a, "nodes", p, 96, 8, 1024));
      f.atoms.emplace_back(b);
    } else {
      bad(p + ".kind", "expected rapidity or bump");
    }
  }
  return f;
}

const std::vector<std::string> kTasks{"verify-model", "scan", "find-cdd", "check-wedge-locality", "zf-suite"};

// --- report helpers ---------------------------------------------------------

json cjson(cplx z) { return json::array({z.real(), z.imag()}); }

json checks_json(const VerificationReport& r) {
  json a = json::array();
  for (const auto& e : r.entries) {
    json o;
    o["name"] = e.name;
    o["value"] = e.residual;
    o["tolerance"] = e.tolerance;
    o["pass"] = e.pass;
    if (e.informational) o["informational"] = true;
    if (!e.note.empty()) o["note"] = e.note;
    a.push_back(std::move(o));
  }
  return a;
}

std::string first_failure(const VerificationReport& r) {
  for (const auto& e : r.entries)
    if (!e.pass && !e.informational) return e.name;
  return {};
}

bool oracle_failure(const VerificationReport& r) {
  for (const auto& e : r.entries)
    if (!e.pass && !e.informational && e.name.rfind("oracle/", 0) == 0) return true;
  return false;
}

struct Task {
  std::string name;
  VerificationReport checks;
  json details = json::object();
  ErrorCode error = ErrorCode::Ok;
  std::string error_message;
  std::string csv;
};

double max_diff(const FockVector& a, const FockVector& b) {
  double e = 0.0;
  for (const auto& [t, v] : a.sectors) {
    auto it = b.sectors.find(t);
    for (std::size_t i = 0; i < v.size(); ++i)
      e = std::max(e, std::abs(v[i] - (it == b.sectors.end() ? cplx{} : it->second[i])));
  }
  for (const auto& [t, v] : b.sectors)
    if (!a.sectors.count(t))
      for (auto c : v) e = std::max(e, std::abs(c));
  return e;
}

BuildOptions build_options(const RunConfig& c) {
  BuildOptions b;
  b.axiom_grid = c.numerics.axiom_grid;
  b.axiom_tol = c.numerics.axiom_tol * c.numerics.tol_scale;
  b.angle_tol = c.numerics.angle_tol;
  b.amp.pole_eps = c.numerics.pole_eps;
  b.amp.contour_radius = c.numerics.contour_radius;
  b.amp.contour_nodes = c.numerics.contour_nodes;
  b.amp.residue_rel_tol = c.numerics.residue_rel_tol * c.numerics.tol_scale;
  return b;
}

IntegralOptions integral_options(const RunConfig& c) {
  IntegralOptions o;
  o.cutoff = c.numerics.integral_cutoff;
  o.tol = c.numerics.integral_tol;
  return o;
}

ScatteringModel model_for(const RunConfig& c) {
  CddSpec spec = c.model.cdd;
  spec.search = c.cdd_search;
  return build_model(c.model.nu, c.model.m1, spec, build_options(c));
}

// --- tasks -------------------------------------------------------------------

void task_verify_model(const RunConfig& c, Task& t) {
  const double s = c.numerics.tol_scale;
  const auto m = model_for(c);
  t.checks.merge(m.axioms);
  t.checks.merge(m.poles);
  t.checks.merge(m.bootstrap);
  t.checks.merge(m.positivity);

  std::vector<double> grid(50);
  for (int i = 0; i < 50; ++i) grid[i] = -3.0 + 6.0 * i / 49.0;
  auto fk = check_fusion_kinematics(m, grid, 1e-10 * s);
  fk.subject = "fusion";
  t.checks.merge(fk);

  if (m.K >= 2) {
    const double m2 = 2.0 * m.m1 * std::cos(kPi * m.nu / 2.0);
    t.checks.add("oracle/mass_m2_closed_form", std::abs(m.mass(2) - m2), 1e-12 * s);
  }
  // undeformed S11: residue 2i tan(pi nu) at i pi nu
  if (std::abs(m.nu - 0.5) > 1e-6) {
    const cplx closed(0.0, 2.0 * std::tan(kPi * m.nu));
    const cplx ct = residue_contour(m.S_sg[0][0], {0.0, kPi * m.nu}, m.amp_opt);
    t.checks.add("oracle/S11_undeformed_residue", std::abs(ct - closed) / std::abs(closed), 1e-8 * s,
                 "contour vs 2i tan(pi nu)");
  }

  json d;
  d["K"] = m.K;
  json masses = json::array();
  for (const auto& sp : m.species) masses.push_back(sp.mass);
  d["masses"] = masses;
  d["cdd"] = describe_factors(m.cdd);
  d["cdd_strip_zeros_over_pi"] = json::array();
  for (double z : m.cdd_zeros) d["cdd_strip_zeros_over_pi"].push_back(z / kPi);
  d["positivity_violation"] = m.positivity_violation;
  json poles = json::array();
  for (int k = 1; k <= m.K; ++k) {
    for (const auto& p : classified_poles(m, 1, k)) {
      json o;
      o["component"] = "S1" + std::to_string(k);
      o["im_over_pi"] = p.location.im / kPi;
      o["order"] = p.order;
      if (p.has_residue) {
        o["residue"] = cjson(p.residue);
        o["sign"] = to_string(classify_residue(p.residue, c.numerics.angle_tol));
      }
      o["channel"] = p.channel == PoleChannel::S ? "s" : p.channel == PoleChannel::T ? "t" : "other";
      poles.push_back(std::move(o));
    }
  }
  d["b1_poles"] = poles;
  t.details = d;
}

void task_scan(const RunConfig& c, Task& t) {
  const auto rows = scan_coupling(c.scan.lo, c.scan.hi, c.scan.steps, c.cdd_search, c.scan.search_cdd, 0);
  t.csv = scan_csv(rows);
  json d;
  d["rows"] = static_cast<int>(rows.size());
  d["range"] = json::array({c.scan.lo, c.scan.hi});
  d["search_cdd"] = c.scan.search_cdd;
  t.details = d;
  // sign of the S11 residue on either side of nu = 1/2
  for (const auto& r : rows) {
    char name[64];
    std::snprintf(name, sizeof name, "nu=%.6g", r.nu);
    if (std::abs(r.nu - 0.5) < 1e-9) {
      t.checks.add_info(std::string("res_sign_S11/") + name, r.res_sign_S11 == ResidueSign::Double ? 0.0 : 1.0, 0.0,
                        "double pole at nu = 1/2");
      continue;
    }
    const auto want = r.nu > 0.5 ? ResidueSign::Minus : ResidueSign::Plus;
    t.checks.add_flag(std::string("res_sign_S11/") + name, r.res_sign_S11 == want,
                      "got " + to_string(r.res_sign_S11) + ", expected " + to_string(want));
    if (r.nu < 0.5 && r.K > 2) {
      int minus = 0, twice = 0;
      for (auto sgn : r.chain_signs) {
        minus += sgn == ResidueSign::Minus;
        twice += sgn == ResidueSign::Double;
      }
      t.checks.add_flag(std::string("chain_wrong_sign/") + name, minus + twice > 0,
                        std::to_string(minus) + " residues in -iR+, " + std::to_string(twice) + " double poles");
    }
  }
}

void task_find_cdd(const RunConfig& c, Task& t) {
  const auto r = find_cdd(c.model.nu, c.cdd_search, build_options(c).amp);
  json d;
  d["nu"] = c.model.nu;
  d["found"] = r.found;
  d["blocks"] = describe_factors(r.factors);
  d["candidates"] = r.candidates;
  d["note"] = r.note;
  t.details = d;
  t.checks.add_flag("found", r.found, r.note);
  if (!r.found) return;
  CddSpec spec;
  spec.kind = CddSpec::Kind::Explicit;
  spec.factors = r.factors;
  const auto m = build_model(c.model.nu, c.model.m1, spec, build_options(c));
  t.checks.merge(m.axioms);
  t.checks.merge(m.positivity);
}

std::vector<cplx> noise(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> g;
  std::vector<cplx> v(n);
  for (auto& z : v) z = cplx(g(rng), g(rng));
  return v;
}

FockVector random_sector(std::mt19937_64& rng, int K, int N, int n, bool b1_only) {
  FockVector v;
  std::size_t size = 1;
  for (int j = 0; j < n; ++j) size *= N;
  const int kmax = b1_only ? 1 : K;
  SpeciesTuple tup(n, 1);
  while (true) {
    v.sectors[tup] = noise(rng, size);
    int d = n - 1;
    while (d >= 0 && tup[d] == kmax) tup[d--] = 1;
    if (d < 0) break;
    ++tup[d];
  }
  return v;
}

void task_zf_suite(const RunConfig& c, Task& t) {
  const double s = c.numerics.tol_scale;
  const auto m = model_for(c);
  const FockSpace F(m, RapidityGrid::gauss_legendre(c.numerics.grid_nodes, c.numerics.grid_cutoff), c.numerics.n_max);
  const int N = F.n();
  std::mt19937_64 rng(c.probes.seed);

  std::vector<FockVector> probes{FockVector::vacuum()};
  if (c.numerics.n_max >= 2) probes.push_back(s_symmetrize(F, random_sector(rng, m.K, N, 1, false)));
  if (c.numerics.n_max >= 3) probes.push_back(s_symmetrize(F, random_sector(rng, m.K, N, 2, true)));
  for (auto& p : probes) p *= 1.0 / norm(F, p);

  auto gauss = [&](int k, double mu, double a, cplx z) {
    return F.sample(k, [=](double x) { return z * std::exp(-a * (x - mu) * (x - mu)); });
  };
  for (auto [k, l] : {std::pair{1, 1}, {1, 2}, {2, 1}}) {
    if (k > m.K || l > m.K) continue;
    auto rep = zf_relation_check(F, gauss(k, 0.3, 1.0, {0.5, 0.2}), gauss(l, -0.4, 0.7, {0.1, -1.0}), probes,
                                 c.numerics.zf_tol * s);
    rep.subject = "zf/" + std::to_string(k) + std::to_string(l);
    t.checks.merge(rep);
  }
  {
    const int l = std::min(2, m.K);
    const auto bad = zf_relation_check(F, gauss(1, 0.3, 1.0, {0.5, 0.2}), gauss(l, -0.4, 0.7, {0.1, -1.0}),
                                       {FockVector::vacuum()}, c.numerics.zf_tol * s, true);
    t.checks.add_flag("negative_control/conjugated_twist_fails", !bad.pass(), "S replaced by conj S");
  }

  // <z+(h) Phi, Psi> = <Phi, z(conj h) Psi>
  for (int n = 0; n + 1 <= c.numerics.n_max && n <= 2; ++n) {
    const bool b1 = n >= 2;
    const auto phi = s_symmetrize(F, n == 0 ? FockVector::vacuum() : random_sector(rng, m.K, N, n, b1));
    const auto psi = s_symmetrize(F, random_sector(rng, m.K, N, n + 1, b1));
    for (int k = 1; k <= (b1 ? 1 : m.K); ++k) {
      SmearedWavefunction hk{k, noise(rng, N)}, hc = hk;
      for (auto& z : hc.values) z = std::conj(z);
      const cplx l = inner_product(F, create(F, hk, phi), psi);
      const cplx r = inner_product(F, phi, annihilate(F, hc, psi));
      t.checks.add("adjoint/n=" + std::to_string(n) + ",k=" + std::to_string(k), std::abs(l - r) / std::abs(l),
                   c.numerics.adjoint_tol * s);
    }
  }

  // P_n: idempotent, self-adjoint, S-symmetric
  auto projector = [&](const FockSpace& G, int n, bool b1, const std::string& tag) {
    const auto v = random_sector(rng, m.K, G.n(), n, b1);
    const auto u = random_sector(rng, m.K, G.n(), n, b1);
    const auto Pv = s_symmetrize(G, v);
    const double nv = norm(G, Pv);
    t.checks.add("projector/idempotent" + tag, norm(G, s_symmetrize(G, Pv) - Pv) / nv, c.numerics.projector_tol * s);
    const cplx l = inner_product(G, u, Pv), r = inner_product(G, s_symmetrize(G, u), v);
    t.checks.add("projector/self_adjoint" + tag, std::abs(l - r) / std::abs(l), c.numerics.projector_tol * s);
    t.checks.add("projector/exchange" + tag, exchange_residual(G, Pv), c.numerics.projector_tol * s);
  };
  for (int n = 2; n <= std::min(3, c.numerics.n_max); ++n) {
    if (n == 2) {
      projector(F, 2, false, "[n=2,N=" + std::to_string(N) + "]");
    } else {
      projector(F, 3, true, "[n=3,b1,N=" + std::to_string(N) + "]");
      const int Ns = std::min(N, 24);
      const FockSpace G(m, RapidityGrid::gauss_legendre(Ns, c.numerics.grid_cutoff), c.numerics.n_max);
      projector(G, 3, false, "[n=3,N=" + std::to_string(Ns) + "]");
    }
  }
  json d;
  d["grid_nodes"] = N;
  d["n_max"] = c.numerics.n_max;
  d["probe_sectors"] = json::array();
  for (const auto& p : probes) d["probe_sectors"].push_back(p.max_particles());
  d["note"] = "three-particle projector on all species uses a 24-node grid";
  t.details = d;
}

void task_wedge_locality(const RunConfig& c, Task& t) {
  const double s = c.numerics.tol_scale;
  const auto m = model_for(c);
  const FockSpace F(m, RapidityGrid::gauss_legendre(c.numerics.grid_nodes, c.numerics.grid_cutoff), c.numerics.n_max);
  const auto iopt = integral_options(c);
  const std::uint64_t seed = c.probes.seed;

  EtaFitOptions eopt;
  eopt.fit_tol *= s;
  eopt.consistency_tol *= s;
  eopt.holdout_tol *= s;
  const auto eta = determine_eta(F, eta_fit_probes(c.probes.fit_count, seed),
                                 as_eta_probes(random_probes(c.probes.holdout_count, seed + 1)), eopt);
  {
    auto r = eta.report;
    r.subject = "eta";
    t.checks.merge(r);
  }
  json d;
  d["eta"] = {{"eta1", cjson(eta.eta1)}, {"eta2", cjson(eta.eta2)}, {"c1", eta.c1}, {"c2", eta.c2},
              {"res1", cjson(eta.res1)}, {"res2", cjson(eta.res2)}};
  d["eta"]["probe_hashes"] = eta.probe_hashes;

  auto probes = random_probes(c.probes.count, seed + 2);
  if (c.probes.f && c.probes.g) probes.push_back({*c.probes.f, *c.probes.g, probes[0].Phi, probes[0].Psi});

  json per = json::array();
  const double tol = c.numerics.theorem_tol * s;
  for (std::size_t p = 0; p < probes.size(); ++p) {
    const auto& pr = probes[p];
    const auto r = weak_commutator(F, pr.f, pr.g, pr.Phi, pr.Psi, eta, tol);
    auto rep = r.report;
    rep.subject = "theorem[" + std::to_string(p) + "]";
    t.checks.merge(rep);
    json o;
    o["lhs"] = cjson(r.lhs);
    o["rhs"] = cjson(r.rhs);
    o["difference"] = r.difference;
    o["scale"] = r.scale;
    o["tolerance"] = r.tolerance;
    o["pieces"] = {{"phi_phi'", cjson(r.pieces.pp)}, {"chi_chi'", cjson(r.pieces.cc)},
                   {"phi_chi'", cjson(r.pieces.pc)}, {"chi_phi'", cjson(r.pieces.cp)}};
    per.push_back(std::move(o));
  }
  d["probes"] = per;

  // contour-shift ledger
  std::mt19937_64 rng(seed + 3);
  std::uniform_real_distribution<double> th(-1.0, 1.0);
  const std::size_t nledger = std::min<std::size_t>(probes.size(), 10);
  for (std::size_t p = 0; p < nledger; ++p) {
    std::vector<double> theta{th(rng)};
    SpeciesTuple sp{1};
    if (p % 2 == 1 && m.K >= 2) {
      theta.push_back(th(rng));
      sp.push_back(2);
    }
    auto cr = contour_shift_report(m, probes[p].f, probes[p].g, theta, sp, iopt, c.numerics.contour_tol * s);
    auto rep = cr.report;
    rep.subject = "oracle/contour[" + std::to_string(p) + "]";
    t.checks.merge(rep);
  }

  // displayed commutator integral against the operators, n = 0, 1, 2
  const std::size_t nformula = std::min<std::size_t>(probes.size(), 5);
  for (std::size_t p = 0; p < nformula; ++p) {
    const auto& pr = probes[p];
    std::vector<std::pair<std::string, FockVector>> vs;
    vs.emplace_back("n=0", FockVector::vacuum());
    vs.emplace_back("n=1", pr.Psi.to_fock(F).sector(1));
    if (c.numerics.n_max >= 3) {
      FockVector raw;
      const int N = F.n();
      std::vector<cplx> v(static_cast<std::size_t>(N) * N);
      for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j)
          v[i * N + j] = pr.Psi.xi_at(1, F.grid().nodes[i]) * pr.Phi.xi_at(1, F.grid().nodes[j]);
      raw.sectors[{1, 1}] = v;
      vs.emplace_back("n=2,b1", s_symmetrize(F, raw));
    }
    for (const auto& [tag, psi] : vs) {
      const auto op = operator_commutator(F, pr.f, pr.g, psi);
      const auto fo = commutator_integral(F, pr.f, pr.g, psi, iopt);
      const double bound = std::max(c.numerics.formula_tol * s, fo.grid_bound + fo.error_bound);
      t.checks.add("oracle/formula[" + std::to_string(p) + "," + tag + "]", max_diff(op, fo.vector), bound);
    }
  }

  auto nc = negative_controls(F, std::vector<ControlProbe>(probes.begin(), probes.begin() + std::min<std::size_t>(probes.size(), 10)),
                              eta, tol, iopt);
  nc.subject = "negative_control";
  t.checks.merge(nc);

  d["grid_nodes"] = F.n();
  d["note"] =
      "equality is tested on the certified n <= 1 domain; two-particle sectors enter through the "
      "commutator formula cross-check";
  t.details = d;
}

void run_task(const RunConfig& c, Task& t) {
  if (t.name == "verify-model")
    task_verify_model(c, t);
  else if (t.name == "scan")
    task_scan(c, t);
  else if (t.name == "find-cdd")
    task_find_cdd(c, t);
  else if (t.name == "zf-suite")
    task_zf_suite(c, t);
  else if (t.name == "check-wedge-locality")
    task_wedge_locality(c, t);
  else
    fail(ErrorCode::Internal, "unknown task " + t.name);
}

json config_json(const RunConfig& c) {
  json j;
  j["model"] = {{"nu", c.model.nu}, {"m1", c.model.m1}, {"cdd", c.model.cdd_text}};
  const auto& n = c.numerics;
  j["numerics"] = {{"grid_nodes", n.grid_nodes},
                   {"grid_cutoff", n.grid_cutoff},
                   {"n_max", n.n_max},
                   {"axiom_grid", n.axiom_grid},
                   {"axiom_tol", n.axiom_tol},
                   {"angle_tol", n.angle_tol},
                   {"pole_eps", n.pole_eps},
                   {"contour_radius", n.contour_radius},
                   {"contour_nodes", n.contour_nodes},
                   {"residue_rel_tol", n.residue_rel_tol},
                   {"integral_cutoff", n.integral_cutoff},
                   {"integral_tol", n.integral_tol},
                   {"zf_tol", n.zf_tol},
                   {"adjoint_tol", n.adjoint_tol},
                   {"projector_tol", n.projector_tol},
                   {"formula_tol", n.formula_tol},
                   {"contour_tol", n.contour_tol},
                   {"theorem_tol", n.theorem_tol},
                   {"tol_scale", n.tol_scale}};
  j["probes"] = {{"count", c.probes.count},
                 {"seed", c.probes.seed},
                 {"fit_count", c.probes.fit_count},
                 {"holdout_count", c.probes.holdout_count},
                 {"explicit_pair", c.probes.f.has_value()}};
  j["scan"] = {{"lo", c.scan.lo}, {"hi", c.scan.hi}, {"steps", c.scan.steps}, {"search_cdd", c.scan.search_cdd}};
  j["cdd_search"] = {{"a_min", c.cdd_search.a_min},
                     {"a_max", c.cdd_search.a_max},
                     {"a_step", c.cdd_search.a_step},
                     {"max_blocks", c.cdd_search.max_blocks}};
  j["tasks"] = c.tasks;
  return j;
}

}  // namespace

RunConfig parse_config(const std::string& text, const RunOverrides& ov) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::ParseError, e.what());
  }
  allow(j, "config", {"model", "numerics", "probes", "scan", "cdd_search", "tasks"});
  RunConfig c;

  if (j.contains("model")) {
    const auto& s = j.at("model");
    allow(s, "model", {"nu", "m1", "cdd"});
    c.model.nu = real(s, "nu", "model", c.model.nu, 1e-6, 1.0 - 1e-6);
    c.model.m1 = real(s, "m1", "model", c.model.m1, 1e-6, 1e6);
    if (s.contains("cdd")) c.model.cdd = parse_cdd(s.at("cdd"), "model.cdd", c.model.cdd_text);
  }
  if (j.contains("numerics")) {
    const auto& s = j.at("numerics");
    auto& n = c.numerics;
    allow(s, "numerics",
          {"grid_nodes", "grid_cutoff", "n_max", "axiom_grid", "axiom_tol", "angle_tol", "pole_eps", "contour_radius",
           "contour_nodes", "residue_rel_tol", "integral_cutoff", "integral_tol", "zf_tol", "adjoint_tol",
           "projector_tol", "formula_tol", "contour_tol", "theorem_tol", "tol_scale"});
    const std::string p = "numerics";
    n.grid_nodes = static_cast<int>(integer(s, "grid_nodes", p, n.grid_nodes, 8, 512));
    n.grid_cutoff = real(s, "grid_cutoff", p, n.grid_cutoff, 1.0, 20.0);
    n.n_max = static_cast<int>(integer(s, "n_max", p, n.n_max, 1, 4));
    n.axiom_grid = static_cast<int>(integer(s, "axiom_grid", p, n.axiom_grid, 10, 100000));
    n.axiom_tol = real(s, "axiom_tol", p, n.axiom_tol, 1e-16, 1e-2);
    n.angle_tol = real(s, "angle_tol", p, n.angle_tol, 1e-16, 1e-2);
    n.pole_eps = real(s, "pole_eps", p, n.pole_eps, 1e-15, 1e-3);
    n.contour_radius = real(s, "contour_radius", p, n.contour_radius, 1e-8, 1e-1);
    n.contour_nodes = static_cast<int>(integer(s, "contour_nodes", p, n.contour_nodes, 8, 4096));
    n.residue_rel_tol = real(s, "residue_rel_tol", p, n.residue_rel_tol, 1e-14, 1e-1);
    n.integral_cutoff = real(s, "integral_cutoff", p, n.integral_cutoff, 2.0, 30.0);
    n.integral_tol = real(s, "integral_tol", p, n.integral_tol, 1e-15, 1e-3);
    n.zf_tol = real(s, "zf_tol", p, n.zf_tol, 1e-16, 1e-2);
    n.adjoint_tol = real(s, "adjoint_tol", p, n.adjoint_tol, 1e-16, 1e-2);
    n.projector_tol = real(s, "projector_tol", p, n.projector_tol, 1e-16, 1e-2);
    n.formula_tol = real(s, "formula_tol", p, n.formula_tol, 1e-16, 1e-2);
    n.contour_tol = real(s, "contour_tol", p, n.contour_tol, 1e-16, 1e-2);
    n.theorem_tol = real(s, "theorem_tol", p, n.theorem_tol, 1e-16, 1e-1);
    n.tol_scale = real(s, "tol_scale", p, n.tol_scale, 1e-6, 1e6);
  }
  if (j.contains("probes")) {
    const auto& s = j.at("probes");
    allow(s, "probes", {"count", "seed", "fit_count", "holdout_count", "f", "g"});
    c.probes.count = static_cast<int>(integer(s, "count", "probes", c.probes.count, 1, 100));
    if (s.contains("seed")) {
      if (!s.at("seed").is_number_unsigned()) bad("probes.seed", "expected a non-negative integer");
      c.probes.seed = s.at("seed").get<std::uint64_t>();
    }
    c.probes.fit_count = static_cast<int>(integer(s, "fit_count", "probes", c.probes.fit_count, 2, 50));
    c.probes.holdout_count = static_cast<int>(integer(s, "holdout_count", "probes", c.probes.holdout_count, 1, 50));
    if (s.contains("f") != s.contains("g")) bad("probes", "f and g come together");
    if (s.contains("f")) {
      c.probes.f = parse_function(s.at("f"), "probes.f");
      c.probes.g = parse_function(s.at("g"), "probes.g");
    }
  }
  if (j.contains("scan")) {
    const auto& s = j.at("scan");
    allow(s, "scan", {"lo", "hi", "steps", "search_cdd"});
    c.scan.lo = real(s, "lo", "scan", c.scan.lo, 1e-6, 1.0 - 1e-6);
    c.scan.hi = real(s, "hi", "scan", c.scan.hi, 1e-6, 1.0 - 1e-6);
    c.scan.steps = static_cast<int>(integer(s, "steps", "scan", c.scan.steps, 1, 10000));
    c.scan.search_cdd = boolean(s, "search_cdd", "scan", c.scan.search_cdd);
    if (c.scan.lo > c.scan.hi) bad("scan", "lo exceeds hi");
  }
  if (j.contains("cdd_search")) {
    const auto& s = j.at("cdd_search");
    auto& o = c.cdd_search;
    allow(s, "cdd_search", {"a_min", "a_max", "a_step", "max_blocks"});
    o.a_min = real(s, "a_min", "cdd_search", o.a_min, 1.0 + 1e-9, 2.0 - 1e-9);
    o.a_max = real(s, "a_max", "cdd_search", o.a_max, 1.0 + 1e-9, 2.0 - 1e-9);
    o.a_step = real(s, "a_step", "cdd_search", o.a_step, 1e-4, 0.5);
    o.max_blocks = static_cast<int>(integer(s, "max_blocks", "cdd_search", o.max_blocks, 1, 6));
    if (o.a_min > o.a_max) bad("cdd_search", "a_min exceeds a_max");
  }
  if (j.contains("tasks")) {
    const auto& s = j.at("tasks");
    if (!s.is_array() || s.empty()) bad("tasks", "expected a non-empty list");
    c.tasks.clear();
    for (const auto& x : s) {
      if (!x.is_string()) bad("tasks", "expected task names");
      const auto name = x.get<std::string>();
      if (std::find(kTasks.begin(), kTasks.end(), name) == kTasks.end()) bad("tasks", "unknown task " + name);
      if (std::find(c.tasks.begin(), c.tasks.end(), name) == c.tasks.end()) c.tasks.push_back(name);
    }
  }

  if (ov.tol_scale) {
    if (!(*ov.tol_scale >= 1e-6 && *ov.tol_scale <= 1e6)) bad("--tol-scale", "out of range [1e-06, 1e+06]");
    c.numerics.tol_scale = *ov.tol_scale;
  }
  if (ov.grid_nodes) {
    if (*ov.grid_nodes < 8 || *ov.grid_nodes > 512) bad("--grid-nodes", "out of range [8, 512]");
    c.numerics.grid_nodes = *ov.grid_nodes;
  }
  if (ov.seed) c.probes.seed = *ov.seed;
  return c;
}

CddSpec parse_cdd_text(const std::string& text) {
  std::string t;
  return parse_cdd(json(text), "cdd", t);
}

RunConfig load_config(const std::string& path, const RunOverrides& ov) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::ConfigError, "cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), ov);
}

RunResult execute(const RunConfig& cfg, RunMode mode) {
  RunConfig c = cfg;
  if (mode == RunMode::Scan) c.tasks = {"scan"};
  if (mode == RunMode::FindCdd) c.tasks = {"find-cdd"};

  std::vector<Task> tasks;
  for (const auto& name : c.tasks) {
    Task t;
    t.name = name;
    t.checks.subject = name;
    try {
      run_task(c, t);
    } catch (const Error& e) {
      t.error = e.code();
      t.error_message = e.what();
    } catch (const std::exception& e) {
      t.error = ErrorCode::Internal;
      t.error_message = e.what();
    }
    tasks.push_back(std::move(t));
  }

  RunResult res;
  bool failed = false, oracle = false;
  json out;
  out["format"] = "sgw-report/1";
  out["mode"] = mode == RunMode::Run ? "run" : mode == RunMode::Scan ? "scan" : "find-cdd";
  out["config"] = config_json(c);
  json tj = json::array();
  for (auto& t : tasks) {
    json o;
    o["task"] = t.name;
    const bool ok = t.error == ErrorCode::Ok && t.checks.pass();
    o["status"] = t.error != ErrorCode::Ok ? "error" : ok ? "pass" : "fail";
    if (t.error != ErrorCode::Ok) {
      o["error"] = {{"code", std::string(error_name(t.error))}, {"message", t.error_message}};
      if (res.message.empty()) res.message = t.name + ": " + t.error_message;
      if (t.error == ErrorCode::OracleMismatch) oracle = true;
    } else if (!ok && res.message.empty()) {
      res.message = t.name + ": check " + first_failure(t.checks) + " failed";
    }
    if (oracle_failure(t.checks)) oracle = true;
    failed = failed || !ok;
    o["details"] = t.details;
    o["checks"] = checks_json(t.checks);
    tj.push_back(std::move(o));
    if (!t.csv.empty()) res.scan_csv = t.csv;
  }
  out["tasks"] = tj;
  res.exit_code = oracle ? 4 : failed ? 2 : 0;
  out["pass"] = res.exit_code == 0;
  out["exit_code"] = res.exit_code;
  out["message"] = res.message;
  res.report_json = out.dump(2) + "\n";
  return res;
}

void write_outputs(const RunResult& r, const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorCode::IoError, "cannot create " + dir + ": " + ec.message());
  auto put = [&](const std::string& name, const std::string& body) {
    const auto path = (fs::path(dir) / name).string();
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << body;
    if (!out) fail(ErrorCode::IoError, "cannot write " + path);
  };
  put("report.json", r.report_json);
  if (!r.scan_csv.empty()) put("scan.csv", r.scan_csv);
}

}  // namespace sgw
