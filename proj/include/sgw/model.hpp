#ifndef SGW_MODEL_HPP
#define SGW_MODEL_HPP

#include <span>
#include <string>
#include <vector>

#include "sgw/amplitude.hpp"
#include "sgw/report.hpp"

namespace sgw {

/// Breather b_k.
struct Species {
  int index = 1;
  double mass = 1.0;
};

/// Complexified two-momentum m(cosh z, sinh z).
struct TwoMomentum {
  cplx p0;
  cplx p1;
};

/// (alpha beta) -> gamma with the two partial angles and their sum.
struct FusionEntry {
  int alpha = 1;
  int beta = 1;
  int gamma = 2;
  double shiftA = 0.0;  // theta_(alpha beta)
  double shiftB = 0.0;  // theta_(beta alpha)
  double angle = 0.0;   // theta_alpha beta
};

int breather_count(double nu);
double breather_mass(int k, double nu, double m1 = 1.0);

TwoMomentum momentum(double mass, cplx zeta);
/// p.x = p0 x0 - p1 x1.
cplx minkowski(const TwoMomentum& p, double x0, double x1);

std::vector<FusionEntry> fusion_table(double nu, int K);

/// +[B_nu]: poles at i pi nu (s) and i pi (1 - nu) (t).
Amplitude minimal_S11(double nu);

/// S_dc(t) = S_da(t - i shiftA) S_db(t + i shiftB) for the fusion (a b) -> c.
Amplitude bootstrap_fuse(const Amplitude& S_da, const Amplitude& S_db, const FusionEntry& fusion);
Amplitude bootstrap_fuse(const Amplitude& S_d1, const FusionEntry& fusion);

/// Undeformed breather amplitudes S_kl for 1 <= k,l <= K, built by repeated
/// fusion with b1. Row-major, zero-based.
std::vector<std::vector<Amplitude>> sine_gordon_amplitudes(double nu, int K);

enum class ResidueSign { Plus, Minus, Double, Other };
std::string to_string(ResidueSign s);
/// Plus for res in iR+, Minus for -iR+, within the given angle.
ResidueSign classify_residue(cplx r, double angle_tol = 1e-8);

/// Target sign of a CDD factor at one s-channel pole of S_1k.
struct CddConstraint {
  int component = 1;      // k in S_1k
  double location = 0.0;  // Im of the pole
  int order = 1;          // order of the undeformed pole
  int required_sign = 1;  // sign the factor must take there (0: unreachable)
};

/// Residue-positivity constraints for every b1 component.
std::vector<CddConstraint> positivity_constraints(double nu, int K, const AmplitudeOptions& opt = {});

struct CddSearchOptions {
  double a_min = 1.05;
  double a_max = 1.95;
  double a_step = 0.01;
  int max_blocks = 4;
  double angle_tol = 1e-8;
};

struct CddResult {
  bool found = false;
  std::vector<Amplitude> factors;  // factors[k-1] multiplies S_1k
  long long candidates = 0;
  std::string note;
  VerificationReport verification;
};

/// Componentwise grid search for CDD factors that make every b1-component
/// s-channel residue lie in iR+. Deterministic; NotFound is reported through
/// `found == false`, never thrown.
CddResult find_cdd(double nu, const CddSearchOptions& opt = {}, const AmplitudeOptions& aopt = {});
CddResult find_cdd(double nu, const std::vector<CddConstraint>& constraints, const CddSearchOptions& opt,
                   const AmplitudeOptions& aopt = {});

struct CddSpec {
  enum class Kind { Auto, Trivial, Explicit } kind = Kind::Auto;
  std::vector<Amplitude> factors;  // Explicit: factors[k-1] for S_1k; missing ones are 1
  CddSearchOptions search;

  static CddSpec automatic() { return {}; }
  static CddSpec trivial() { return {Kind::Trivial, {}, {}}; }
};

struct ScatteringModel {
  double nu = 0.75;
  double m1 = 1.0;
  int K = 2;
  std::vector<Species> species;
  std::vector<FusionEntry> fusion;
  std::vector<std::vector<Amplitude>> S;      // deformed, zero-based
  std::vector<std::vector<Amplitude>> S_sg;   // undeformed
  std::vector<Amplitude> cdd;                 // cdd[k-1] multiplies S_1k
  AmplitudeOptions amp_opt;

  VerificationReport axioms;
  VerificationReport positivity;
  VerificationReport poles;
  VerificationReport bootstrap;  // undeformed chain identities
  std::vector<double> cdd_zeros;  // Im of strip zeros of the CDD factors
  bool positivity_violation = false;

  /// One-based access.
  const Amplitude& amp(int k, int l) const { return S.at(k - 1).at(l - 1); }
  double mass(int k) const { return species.at(k - 1).mass; }
  /// Fusion entry (alpha beta) -> gamma; throws DomainError if absent.
  const FusionEntry& entry(int alpha, int beta, int gamma) const;
};

struct BuildOptions {
  int axiom_grid = 200;
  double axiom_tol = 1e-10;
  double angle_tol = 1e-8;
  AmplitudeOptions amp;
};

/// Builds S_kl = S_SG,kl * C_kl with C on the b1 components only. Positivity
/// failures set the flag; axiom failures throw AxiomViolation.
ScatteringModel build_model(double nu, double m1, const CddSpec& cdd, const BuildOptions& opt = {});

/// Strip poles of S_kl with channel tags from the fusion table and residues
/// for simple poles.
std::vector<PoleData> classified_poles(const ScatteringModel& model, int k, int l);

VerificationReport check_fusion_kinematics(const ScatteringModel& model, std::span<const double> grid,
                                           double tol = 1e-10);

struct ScanRow {
  double nu = 0.0;
  int K = 0;
  ResidueSign res_sign_S11 = ResidueSign::Other;
  std::vector<ResidueSign> chain_signs;  // S_1k at i pi nu (k+1)/2, k < K
  bool cdd_found = false;
  std::string cdd_blocks;
};

ScanRow scan_point(double nu, const CddSearchOptions& opt = {}, bool search_cdd = true);
/// `steps` equally spaced points from lo to hi inclusive.
std::vector<ScanRow> scan_coupling(double lo, double hi, int steps, const CddSearchOptions& opt = {},
                                   bool search_cdd = true, int threads = 0);
std::string scan_csv(const std::vector<ScanRow>& rows);
std::string describe_factors(const std::vector<Amplitude>& factors);

}  // namespace sgw

#endif  // SGW_MODEL_HPP
