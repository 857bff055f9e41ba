#ifndef SGW_RUNNER_HPP
#define SGW_RUNNER_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sgw/model.hpp"
#include "sgw/testfunctions.hpp"

namespace sgw {

struct RunConfig {
  struct Model {
    double nu = 0.75;
    double m1 = 1.0;
    CddSpec cdd;
    std::string cdd_text = "auto";
  } model;

  struct Numerics {
    int grid_nodes = 128;
    double grid_cutoff = 5.0;
    int n_max = 3;
    int axiom_grid = 200;
    double axiom_tol = 1e-10;
    double angle_tol = 1e-8;
    double pole_eps = 1e-9;
    double contour_radius = 1e-3;
    int contour_nodes = 64;
    double residue_rel_tol = 1e-6;
    double integral_cutoff = 8.0;
    double integral_tol = 1e-12;
    double zf_tol = 1e-9;
    double adjoint_tol = 1e-10;
    double projector_tol = 1e-9;
    double formula_tol = 1e-8;
    double contour_tol = 1e-7;
    double theorem_tol = 1e-5;
    double tol_scale = 1.0;
  } numerics;

  struct Probes {
    int count = 10;
    std::uint64_t seed = 20240611;
    int fit_count = 4;
    int holdout_count = 4;
    std::optional<TestFunction> f, g;  // extra explicit pair
  } probes;

  struct Scan {
    double lo = 0.05;
    double hi = 0.95;
    int steps = 19;
    bool search_cdd = true;
  } scan;

  CddSearchOptions cdd_search;
  std::vector<std::string> tasks{"verify-model"};
};

struct RunOverrides {
  std::optional<double> tol_scale;
  std::optional<int> grid_nodes;
  std::optional<std::uint64_t> seed;
};

/// Strict: unknown keys, wrong types and out-of-range values throw ConfigError;
/// malformed JSON throws ParseError.
RunConfig parse_config(const std::string& text, const RunOverrides& ov = {});
/// "auto", "trivial", "1" or "S11=a+b;S12=c"; ConfigError otherwise.
CddSpec parse_cdd_text(const std::string& text);
RunConfig load_config(const std::string& path, const RunOverrides& ov = {});

enum class RunMode { Run, Scan, FindCdd };

struct RunResult {
  int exit_code = 0;  // 0 pass, 2 check failure, 4 oracle mismatch
  std::string report_json;
  std::string scan_csv;  // empty unless a scan ran
  std::string message;   // first failing check, "task: name"
};

RunResult execute(const RunConfig& cfg, RunMode mode = RunMode::Run);

/// Writes report.json (and scan.csv when present) into dir; IoError on failure.
void write_outputs(const RunResult& r, const std::string& dir);

}  // namespace sgw

#endif  // SGW_RUNNER_HPP
