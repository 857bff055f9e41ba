#ifndef SGW_FIELDS_HPP
#define SGW_FIELDS_HPP

#include <string>
#include <vector>

#include "sgw/fock.hpp"
#include "sgw/testfunctions.hpp"

namespace sgw {

/// c exp(-alpha (z - mu)^2); entire, so every strip line is certified.
struct GaussianTerm {
  cplx c{1.0, 0.0};
  double alpha = 1.0;
  double mu = 0.0;
  cplx operator()(cplx z) const { return c * std::exp(-alpha * (z - mu) * (z - mu)); }
};

/// n <= 1 domain vector with closed-form one-particle evaluators. Sectors
/// n >= 2 can be attached on the grid but carry no continuation.
struct DomainVector {
  cplx vacuum{0.0, 0.0};
  std::vector<std::vector<GaussianTerm>> xi;  // xi[k-1]: sum of terms
  FockVector higher;

  cplx xi_at(int species, cplx z) const;
  /// J on the closed-form data: conj xi(conj z), conj vacuum.
  DomainVector conjugated() const;
  FockVector to_fock(const FockSpace& F) const;
};

/// Node agreement of the evaluators and the L^2 norm on 11 lines
/// Im z in [-pi/2, 0] against the closed form.
VerificationReport certify_domain(const FockSpace& F, const DomainVector& v);

struct EtaCoefficients {
  cplx eta1{0.0, 0.0};  // b1 b2 -> b1 channel, residue of S12
  cplx eta2{0.0, 0.0};  // b1 b1 -> b2 channel, residue of S11
  double c1 = 0.0, c2 = 0.0;
  cplx res1{0.0, 0.0}, res2{0.0, 0.0};
  double fit_residual = 0.0;
  double holdout_residual = 0.0;
  double consistency = 0.0;
  std::vector<std::string> probe_hashes;
  VerificationReport report;
};

/// s-channel residues used by chi; NegativeResidue unless -i res > 0.
std::pair<cplx, cplx> bound_state_residues(const ScatteringModel& model, bool require_positive = true);
/// eta_i = i c_i (-i res_i)^{1/2}.
EtaCoefficients eta_from_scale(const ScatteringModel& model, double c1, double c2, bool require_positive = true);

/// phi(f) = z+(f+) + z(f-), z linear in its argument.
FockVector phi(const FockSpace& F, const TestFunction& f, const FockVector& psi);
/// J phi(g_j) J.
FockVector phi_prime(const FockSpace& F, const TestFunction& g, const FockVector& psi);
/// Same with g_j supplied by the caller (used to plant a wrong reflection).
FockVector phi_prime_reflected(const FockSpace& F, const TestFunction& gj, const FockVector& psi);

/// The z+ and z parts of phi(f) separately.
FockVector phi_creation(const FockSpace& F, const TestFunction& f, const FockVector& psi);
FockVector phi_annihilation(const FockSpace& F, const TestFunction& f, const FockVector& psi);

/// One-particle bound-state term: component k = 1, 2.
std::vector<SmearedWavefunction> chi1(const FockSpace& F, const TestFunction& f, const DomainVector& xi,
                                      const EtaCoefficients& eta);
/// Particle-number preserving: zero on the vacuum, chi1 on n = 1.
FockVector chi(const FockSpace& F, const TestFunction& f, const DomainVector& psi, const EtaCoefficients& eta);
FockVector chi_prime(const FockSpace& F, const TestFunction& g, const DomainVector& psi, const EtaCoefficients& eta);
FockVector chi_prime_reflected(const FockSpace& F, const TestFunction& gj, const DomainVector& psi,
                               const EtaCoefficients& eta);

FockVector phitilde(const FockSpace& F, const TestFunction& f, const DomainVector& psi, const EtaCoefficients& eta);
FockVector phitilde_prime(const FockSpace& F, const TestFunction& g, const DomainVector& psi,
                          const EtaCoefficients& eta);

/// <A(f)P, B(g)Q> - <B(g)P, A(f)Q> for the four field pairs.
struct CommutatorPieces {
  cplx pp{0.0, 0.0};  // phi, phi'
  cplx cc{0.0, 0.0};  // chi, chi'
  cplx pc{0.0, 0.0};  // phi, chi'
  cplx cp{0.0, 0.0};  // chi, phi'
  cplx lhs{0.0, 0.0};  // sum of the four <A(f)P, B(g)Q>
  cplx rhs{0.0, 0.0};
  double max_term = 0.0;  // largest of the eight inner products
  cplx total() const { return pp + cc + pc + cp; }
  double scale() const { return std::abs(pp) + std::abs(cc) + std::abs(pc) + std::abs(cp); }
};
/// scrambled: g_j taken from reflect_unconjugated instead of reflect.
CommutatorPieces weak_pieces(const FockSpace& F, const TestFunction& f, const TestFunction& g,
                             const DomainVector& P, const DomainVector& Q, const EtaCoefficients& eta,
                             bool scrambled = false);

struct EtaProbe {
  TestFunction f, g;
  DomainVector P, Q;
};
std::string probe_hash(const EtaProbe& p);

struct EtaFitOptions {
  double fit_tol = 1e-6;       // relative to the piece scale
  double consistency_tol = 1e-4;
  double holdout_tol = 1e-5;
};

/// Fits c_i > 0 per probe from probes whose Xi isolate one channel, checks
/// their spread, then validates on the held-out probes.
EtaCoefficients determine_eta(const FockSpace& F, const std::vector<EtaProbe>& fit,
                              const std::vector<EtaProbe>& holdout, const EtaFitOptions& opt = {});

}  // namespace sgw

#endif  // SGW_FIELDS_HPP
