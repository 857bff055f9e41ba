#include "sgw/sgw.h"

#include <cstring>
#include <memory>
#include <string>

#include "sgw/error.hpp"
#include "sgw/runner.hpp"

struct sgw_session {
  sgw::RunConfig config;
  bool ran = false;
  sgw::RunResult result;
};

struct sgw_model {
  sgw::ScatteringModel model;
};

namespace {

thread_local std::string last_error;

int record(int code, const std::string& what) {
  last_error = what;
  return code;
}

template <class F>
int guarded(F&& body) {
  try {
    last_error.clear();
    body();
    return SGW_OK;
  } catch (const sgw::Error& e) {
    return record(static_cast<int>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return record(SGW_BUDGET_EXCEEDED, "out of memory");
  } catch (const std::exception& e) {
    return record(SGW_INTERNAL, e.what());
  }
}

sgw::RunOverrides overrides(const sgw_overrides* ov) {
  sgw::RunOverrides o;
  if (!ov) return o;
  if (ov->has_tol_scale) o.tol_scale = ov->tol_scale;
  if (ov->has_grid_nodes) o.grid_nodes = ov->grid_nodes;
  if (ov->has_seed) o.seed = ov->seed;
  return o;
}

}  // namespace

extern "C" {

const char* sgw_version(void) { return SGW_VERSION; }

const char* sgw_status_name(int status) {
  static thread_local std::string name;
  name = std::string(sgw::error_name(static_cast<sgw::ErrorCode>(status)));
  return name.c_str();
}

const char* sgw_last_error(void) { return last_error.c_str(); }

int sgw_session_open(const char* config_path, const sgw_overrides* ov, sgw_session** out) {
  if (!config_path || !out) return record(SGW_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    auto s = std::make_unique<sgw_session>();
    s->config = sgw::load_config(config_path, overrides(ov));
    *out = s.release();
  });
}

int sgw_session_open_text(const char* config_json, const sgw_overrides* ov, sgw_session** out) {
  if (!config_json || !out) return record(SGW_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    auto s = std::make_unique<sgw_session>();
    s->config = sgw::parse_config(config_json, overrides(ov));
    *out = s.release();
  });
}

int sgw_session_run(sgw_session* s, sgw_mode mode, int* exit_code) {
  if (!s || !exit_code) return record(SGW_INVALID_ARGUMENT, "null argument");
  if (mode < SGW_MODE_RUN || mode > SGW_MODE_FIND_CDD) return record(SGW_INVALID_ARGUMENT, "unknown mode");
  return guarded([&] {
    const auto m = mode == SGW_MODE_SCAN      ? sgw::RunMode::Scan
                   : mode == SGW_MODE_FIND_CDD ? sgw::RunMode::FindCdd
                                               : sgw::RunMode::Run;
    s->result = sgw::execute(s->config, m);
    s->ran = true;
    *exit_code = s->result.exit_code;
  });
}

const char* sgw_session_report(const sgw_session* s) {
  return s && s->ran ? s->result.report_json.c_str() : nullptr;
}

const char* sgw_session_scan_csv(const sgw_session* s) {
  return s && s->ran && !s->result.scan_csv.empty() ? s->result.scan_csv.c_str() : nullptr;
}

const char* sgw_session_message(const sgw_session* s) { return s && s->ran ? s->result.message.c_str() : nullptr; }

int sgw_session_write(const sgw_session* s, const char* out_dir) {
  if (!s || !out_dir) return record(SGW_INVALID_ARGUMENT, "null argument");
  if (!s->ran) return record(SGW_INVALID_ARGUMENT, "session has not run");
  return guarded([&] { sgw::write_outputs(s->result, out_dir); });
}

void sgw_session_close(sgw_session* s) { delete s; }

int sgw_model_build(double nu, double m1, const char* cdd, sgw_model** out) {
  if (!out) return record(SGW_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    const auto spec = sgw::parse_cdd_text(cdd ? cdd : "auto");
    auto m = std::make_unique<sgw_model>();
    m->model = sgw::build_model(nu, m1, spec);
    *out = m.release();
  });
}

int sgw_model_species(const sgw_model* m, int* count) {
  if (!m || !count) return record(SGW_INVALID_ARGUMENT, "null argument");
  *count = m->model.K;
  return SGW_OK;
}

int sgw_model_mass(const sgw_model* m, int k, double* mass) {
  if (!m || !mass) return record(SGW_INVALID_ARGUMENT, "null argument");
  if (k < 1 || k > m->model.K) return record(SGW_DOMAIN_ERROR, "species index out of range");
  *mass = m->model.mass(k);
  return SGW_OK;
}

int sgw_model_eval(const sgw_model* m, int k, int l, double re, double im, double* out_re, double* out_im) {
  if (!m || !out_re || !out_im) return record(SGW_INVALID_ARGUMENT, "null argument");
  if (k < 1 || l < 1 || k > m->model.K || l > m->model.K)
    return record(SGW_DOMAIN_ERROR, "species index out of range");
  return guarded([&] {
    const auto v = sgw::eval_amplitude(m->model.amp(k, l), sgw::cplx(re, im), m->model.amp_opt);
    *out_re = v.real();
    *out_im = v.imag();
  });
}

int sgw_model_residue(const sgw_model* m, int k, int l, double im, double* out_re, double* out_im) {
  if (!m || !out_re || !out_im) return record(SGW_INVALID_ARGUMENT, "null argument");
  if (k < 1 || l < 1 || k > m->model.K || l > m->model.K)
    return record(SGW_DOMAIN_ERROR, "species index out of range");
  return guarded([&] {
    const auto v = sgw::residue(m->model.amp(k, l), {0.0, im}, m->model.amp_opt);
    *out_re = v.real();
    *out_im = v.imag();
  });
}

int sgw_model_cdd(const sgw_model* m, char* buf, size_t len) {
  if (!m || !buf || len == 0) return record(SGW_INVALID_ARGUMENT, "null argument");
  const auto s = sgw::describe_factors(m->model.cdd);
  if (s.size() + 1 > len) return record(SGW_INVALID_ARGUMENT, "buffer too small");
  std::memcpy(buf, s.c_str(), s.size() + 1);
  return SGW_OK;
}

void sgw_model_free(sgw_model* m) { delete m; }

}  // extern "C"
