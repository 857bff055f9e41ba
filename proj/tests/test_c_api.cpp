#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "sgw/sgw.h"

namespace {

using cplx = std::complex<double>;
const double pi = std::acos(-1.0);
const cplx I(0.0, 1.0);

cplx block(double a, cplx w) {
  const double s = std::sin(pi * a);
  return (std::sinh(w) + I * s) / (std::sinh(w) - I * s);
}

struct Session {
  sgw_session* s = nullptr;
  int status = SGW_OK;
  explicit Session(const std::string& text) { status = sgw_session_open_text(text.c_str(), nullptr, &s); }
  ~Session() { sgw_session_close(s); }
  int run(sgw_mode m = SGW_MODE_RUN) {
    int code = -1;
    REQUIRE(sgw_session_run(s, m, &code) == SGW_OK);
    return code;
  }
};

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  for (std::string l; std::getline(ss, l);) out.push_back(l);
  return out;
}

}  // namespace

TEST_CASE("version and status names") {
  CHECK(std::string(sgw_version()).size() > 0);
  CHECK(std::string(sgw_status_name(SGW_NEGATIVE_RESIDUE)) == "NegativeResidue");
  CHECK(std::string(sgw_status_name(SGW_CONFIG_ERROR)) == "ConfigError");
}

TEST_CASE("config errors come back as codes, without a session") {
  Session a(R"({"model": {"nu": 0.75, "colour": 1}})");
  CHECK(a.status == SGW_CONFIG_ERROR);
  CHECK(a.s == nullptr);
  CHECK(std::string(sgw_last_error()).find("model.colour") != std::string::npos);

  Session b(R"({"model": {"nu": 0.75})");
  CHECK(b.status == SGW_PARSE_ERROR);
  Session c(R"({"tasks": ["verify-model", "plot"]})");
  CHECK(c.status == SGW_CONFIG_ERROR);
  Session d(R"({"numerics": {"n_max": 7}})");
  CHECK(d.status == SGW_CONFIG_ERROR);
  Session e(R"({"model": {"cdd": "S11=2.5"}})");
  CHECK(e.status == SGW_CONFIG_ERROR);

  sgw_overrides ov{};
  ov.has_grid_nodes = 1;
  ov.grid_nodes = 2;
  sgw_session* s = nullptr;
  CHECK(sgw_session_open_text("{}", &ov, &s) == SGW_CONFIG_ERROR);
  CHECK(sgw_session_open_text(nullptr, nullptr, &s) == SGW_INVALID_ARGUMENT);
  CHECK(sgw_session_open("/nonexistent/config.json", nullptr, &s) == SGW_CONFIG_ERROR);
}

TEST_CASE("minimal run passes and writes a report") {
  Session s(R"({"model": {"nu": 0.75}, "tasks": ["verify-model"]})");
  REQUIRE(s.status == SGW_OK);
  CHECK(sgw_session_report(s.s) == nullptr);
  CHECK(s.run() == 0);
  const std::string rep = sgw_session_report(s.s);
  CHECK(rep.find("\"pass\": true") != std::string::npos);
  CHECK(rep.find("\"tolerance\"") != std::string::npos);
  CHECK(sgw_session_scan_csv(s.s) == nullptr);

  const auto dir = std::filesystem::temp_directory_path() / "sgw_c_api_test";
  std::filesystem::remove_all(dir);
  REQUIRE(sgw_session_write(s.s, dir.string().c_str()) == SGW_OK);
  std::ifstream in(dir / "report.json", std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str() == rep);
  CHECK_FALSE(std::filesystem::exists(dir / "scan.csv"));
  std::filesystem::remove_all(dir);
}

TEST_CASE("undeformed model: wedge locality stops at the residue sign") {
  Session s(R"({"model": {"nu": 0.75, "cdd": 1}, "tasks": ["check-wedge-locality"]})");
  REQUIRE(s.status == SGW_OK);
  CHECK(s.run() == 2);
  CHECK(std::string(sgw_session_message(s.s)).find("NegativeResidue") != std::string::npos);
  CHECK(std::string(sgw_session_report(s.s)).find("\"code\": \"NegativeResidue\"") != std::string::npos);
}

TEST_CASE("coupling scan") {
  const std::string cfg = R"({"scan": {"lo": 0.05, "hi": 0.95, "steps": 19}})";
  Session s(cfg);
  REQUIRE(s.status == SGW_OK);
  CHECK(s.run(SGW_MODE_SCAN) == 0);
  const auto rows = lines(sgw_session_scan_csv(s.s));
  REQUIRE(rows.size() == 20);
  CHECK(rows[0] == "nu,K,res_sign_S11,chain_signs,cdd_found,cdd_blocks");
  CHECK(rows[15] == "0.75,2,minus,minus,true,S11=1.5;S12=1.5");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double nu = std::stod(rows[i]);
    const std::string sign = rows[i].substr(rows[i].find(',', rows[i].find(',') + 1) + 1, 5);
    CAPTURE(rows[i]);
    if (nu < 0.499) CHECK(sign == "plus,");
    if (nu > 0.501) CHECK(sign == "minus");
  }
  Session t(cfg);
  t.run(SGW_MODE_SCAN);
  CHECK(std::string(sgw_session_scan_csv(t.s)) == sgw_session_scan_csv(s.s));
  CHECK(std::string(sgw_session_report(t.s)) == sgw_session_report(s.s));
}

TEST_CASE("model handles against closed-form blocks") {
  sgw_model* m = nullptr;
  REQUIRE(sgw_model_build(0.75, 1.0, "auto", &m) == SGW_OK);
  int K = 0;
  sgw_model_species(m, &K);
  CHECK(K == 2);
  double m2 = 0.0;
  sgw_model_mass(m, 2, &m2);
  CHECK(std::abs(m2 - 2.0 * std::cos(3.0 * pi / 8.0)) < 1e-12);
  char buf[64];
  REQUIRE(sgw_model_cdd(m, buf, sizeof buf) == SGW_OK);
  CHECK(std::string(buf) == "S11=1.5;S12=1.5");

  for (cplx z : {cplx(0.3, 0.0), cplx(-1.1, 0.4), cplx(0.2, 2.0)}) {
    double re = 0, im = 0;
    REQUIRE(sgw_model_eval(m, 1, 1, z.real(), z.imag(), &re, &im) == SGW_OK);
    const cplx want = block(0.75, z) * block(1.5, z);
    CHECK(std::abs(cplx(re, im) - want) < 1e-13);
  }
  double re = 0, im = 0;
  REQUIRE(sgw_model_residue(m, 1, 1, 0.75 * pi, &re, &im) == SGW_OK);
  const cplx want = 2.0 * I * std::tan(0.75 * pi) * block(1.5, I * 0.75 * pi);
  CHECK(std::abs(cplx(re, im) - want) < 1e-9);
  CHECK(std::abs(im - 0.3431457505076198) < 1e-9);

  CHECK(sgw_model_eval(m, 3, 1, 0.0, 0.0, &re, &im) == SGW_DOMAIN_ERROR);
  CHECK(sgw_model_mass(m, 0, &m2) == SGW_DOMAIN_ERROR);
  CHECK(sgw_model_cdd(m, buf, 3) == SGW_INVALID_ARGUMENT);
  sgw_model_free(m);

  CHECK(sgw_model_build(1.2, 1.0, "auto", &m) == SGW_DOMAIN_ERROR);
  CHECK(m == nullptr);
  CHECK(sgw_model_build(0.75, 1.0, "S11=0.5", &m) == SGW_CONFIG_ERROR);
  REQUIRE(sgw_model_build(0.75, 1.0, "trivial", &m) == SGW_OK);
  REQUIRE(sgw_model_eval(m, 1, 1, 0.4, 0.0, &re, &im) == SGW_OK);
  CHECK(std::abs(cplx(re, im) - block(0.75, 0.4)) < 1e-13);
  sgw_model_free(m);
}
