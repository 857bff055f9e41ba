#ifndef SGW_VERIFY_HPP
#define SGW_VERIFY_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "sgw/fields.hpp"
#include "sgw/report.hpp"

namespace sgw {

struct IntegralOptions {
  double cutoff = 8.0;      // theta' in [-cutoff, cutoff]
  double tol = 1e-12;       // relative, per adaptive integral
  double tail_tol = 1e-12;  // integrand modulus allowed at the cutoff
  int threads = 0;          // 0: hardware concurrency
};

struct KernelValue {
  cplx value{0.0, 0.0};
  double error = 0.0;       // adaptive estimate
  double grid_error = 0.0;  // |GL_N - GL_2N| on the Fock interval, when requested
};

/// int dtheta' [g-(t') prod_p S_{1 k_p}(t' - t_p) f+(t') - g+(t') prod_p conj S f-(t')]
/// for b1-only f, g. TailWarning when the integrand is not negligible at
/// the cutoff.
KernelValue commutator_kernel(const ScatteringModel& model, const TestFunction& f, const TestFunction& g,
                              const SpeciesTuple& species, const std::vector<double>& theta,
                              const IntegralOptions& opt = {}, const RapidityGrid* grid = nullptr);

struct SectorResult {
  FockVector vector;
  double error_bound = 0.0;  // adaptive
  double grid_bound = 0.0;   // discretization error of the Fock grid rule
};
/// Kernel times psi, nodewise on every sector.
SectorResult commutator_integral(const FockSpace& F, const TestFunction& f, const TestFunction& g,
                                 const FockVector& psi, const IntegralOptions& opt = {});

/// Particle-number preserving part of [phi'(g), phi(f)] psi, assembled from
/// the creation and annihilation halves so that n + 1 <= N_max suffices.
FockVector operator_commutator(const FockSpace& F, const TestFunction& f, const TestFunction& g,
                               const FockVector& psi);

struct ResidueTerm {
  int factor = 0;  // index p into the tuple
  ComplexRapidity location;
  cplx residue{0.0, 0.0};  // of the whole integrand
};

struct ContourShiftReport {
  cplx I0{0.0, 0.0};
  cplx Ipi{0.0, 0.0};
  cplx R{0.0, 0.0};
  cplx crossed{0.0, 0.0};  // int g+ prod conj S f- on the real line
  double residual = 0.0;           // |I0 - Ipi - R|
  double crossing_residual = 0.0;  // |Ipi - crossed|
  double error_bound = 0.0;
  std::vector<ResidueTerm> poles;
  VerificationReport report;
};

/// Cauchy shift of the first commutator term from R to R + i pi, with the
/// residue ledger of the poles in between. PoleOnPath within 1e-3 of either
/// contour or of another pole.
ContourShiftReport contour_shift_report(const ScatteringModel& model, const TestFunction& f, const TestFunction& g,
                                        const std::vector<double>& theta, const SpeciesTuple& species,
                                        const IntegralOptions& opt = {}, double tol = 1e-7);

struct CommutatorReport {
  cplx lhs{0.0, 0.0};  // <phi~(f) Phi, phi~'(g) Psi>
  cplx rhs{0.0, 0.0};  // <phi~'(g) Phi, phi~(f) Psi>
  double difference = 0.0;
  double scale = 0.0;
  double tolerance = 0.0;
  double decomposition_residual = 0.0;
  CommutatorPieces pieces;
  VerificationReport report;
  bool pass = false;
  std::string note;
};

/// Throws HypothesisViolation naming the first failed hypothesis.
void check_hypotheses(const FockSpace& F, const TestFunction& f, const TestFunction& g, const DomainVector& Phi,
                      const DomainVector& Psi);

CommutatorReport weak_commutator(const FockSpace& F, const TestFunction& f, const TestFunction& g,
                                 const DomainVector& Phi, const DomainVector& Psi, const EtaCoefficients& eta,
                                 double tol = 1e-5, bool scrambled = false);

/// -sum_k int conj Phi_k(t) R_k(t) Psi_k(t): the weak commutator that the
/// residues leave behind when chi is dropped.
cplx predicted_residue_term(const FockSpace& F, const TestFunction& f, const TestFunction& g,
                            const DomainVector& Phi, const DomainVector& Psi, const IntegralOptions& opt = {});

struct ControlProbe {
  TestFunction f, g;
  DomainVector Phi, Psi;
};

struct ProbeOptions {
  double beta_lo = 1.0, beta_hi = 1.4;     // atom widths
  double theta0_max = 0.25;
  double margin_lo = 0.4, margin_hi = 1.2;  // distance of x inside the wedge
  double alpha_lo = 0.7, alpha_hi = 1.5;    // domain-vector Gaussians
  double mu_max = 0.4;
};

/// Seeded hypothesis-satisfying probes: real b1 atoms in the left/right
/// wedges and n <= 1 Gaussian domain vectors carrying both species.
std::vector<ControlProbe> random_probes(int count, std::uint64_t seed, const ProbeOptions& opt = {});
/// Channel-isolating probes for the eta fit (xi b1-only or b2-only), half each.
std::vector<EtaProbe> eta_fit_probes(int count, std::uint64_t seed, const ProbeOptions& opt = {});
std::vector<EtaProbe> as_eta_probes(const std::vector<ControlProbe>& probes);

/// (a) eta = 0 leaves the residue term, (b) the undeformed model has no
/// admissible eta, (c) a de-conjugated reflection breaks the theorem.
VerificationReport negative_controls(const FockSpace& F, const std::vector<ControlProbe>& probes,
                                     const EtaCoefficients& eta, double tol = 1e-5,
                                     const IntegralOptions& opt = {});

}  // namespace sgw

#endif  // SGW_VERIFY_HPP
