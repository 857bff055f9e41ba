#ifndef SGW_FOCK_HPP
#define SGW_FOCK_HPP

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "sgw/amplitude.hpp"
#include "sgw/model.hpp"
#include "sgw/report.hpp"

namespace sgw {

/// Gauss-Legendre discretization of L^2(R, dtheta) on [-cutoff, cutoff].
struct RapidityGrid {
  std::vector<double> nodes;
  std::vector<double> weights;
  double cutoff = 5.0;

  static RapidityGrid gauss_legendre(int n = 128, double cutoff = 5.0);
  int size() const { return static_cast<int>(nodes.size()); }
};

using SpeciesTuple = std::vector<int>;

/// Truncated Fock vector: species tuple (1-based) -> row-major array over
/// grid^n. The empty tuple holds the vacuum coefficient.
struct FockVector {
  std::map<SpeciesTuple, std::vector<cplx>> sectors;

  static FockVector vacuum();
  int max_particles() const;
  bool empty() const { return sectors.empty(); }
  /// Sectors with exactly n particles.
  FockVector sector(int n) const;

  FockVector& operator+=(const FockVector& o);
  FockVector& operator-=(const FockVector& o);
  FockVector& operator*=(cplx s);
  friend FockVector operator+(FockVector a, const FockVector& b) { return a += b; }
  friend FockVector operator-(FockVector a, const FockVector& b) { return a -= b; }
  friend FockVector operator*(cplx s, FockVector a) { return a *= s; }
};

/// One-particle wavefunction sampled on the grid.
struct SmearedWavefunction {
  int species = 1;
  std::vector<cplx> values;
};

/// Grid, truncation and the sampled two-particle amplitudes
/// S_kl(theta_j - theta_i) shared by all Fock operations.
class FockSpace {
 public:
  FockSpace(const ScatteringModel& model, RapidityGrid grid, int n_max = 3);

  const ScatteringModel& model() const { return model_; }
  const RapidityGrid& grid() const { return grid_; }
  int n_max() const { return n_max_; }
  int species() const { return model_.K; }
  int n() const { return grid_.size(); }

  /// S_kl(theta_j - theta_i) at grid nodes.
  cplx S(int k, int l, int i, int j) const { return table_[((k - 1) * model_.K + (l - 1))][i * n() + j]; }
  const std::vector<cplx>& S_table(int k, int l) const { return table_[(k - 1) * model_.K + (l - 1)]; }

  SmearedWavefunction sample(int species, const std::function<cplx(double)>& h) const;

 private:
  ScatteringModel model_;
  RapidityGrid grid_;
  int n_max_;
  std::vector<std::vector<cplx>> table_;
};

/// P_n on every sector: (1/n!) sum over permutations with the product of
/// S_{k_a k_b}(theta_b - theta_a) over inverted pairs a < b.
FockVector s_symmetrize(const FockSpace& F, const FockVector& psi);

/// sqrt(n+1) P_{n+1}(h (x) psi_n), species prepended.
FockVector create(const FockSpace& F, const SmearedWavefunction& h, const FockVector& psi);
/// (z_k(h) psi)^{t}(x) = sqrt(n) sum_i w_i h_i psi^{(k,t)}(theta_i, x); linear in h.
FockVector annihilate(const FockSpace& F, const SmearedWavefunction& h, const FockVector& psi);
/// Unsmeared annihilator at node i.
FockVector annihilate_at(const FockSpace& F, int species, int node, const FockVector& psi);
/// sqrt((n+1)(n+2)) P_{n+2}(K (x) psi) with species (k1, k2) prepended; K is
/// N x N row-major over (first slot, second slot).
FockVector create_pair(const FockSpace& F, int k1, int k2, const std::vector<cplx>& kernel, const FockVector& psi);
/// sqrt(n(n-1)) sum_ij w_i w_j K(i,j) psi^{(k1,k2,t)}(theta_i, theta_j, x).
FockVector annihilate_pair(const FockSpace& F, int k1, int k2, const std::vector<cplx>& kernel,
                           const FockVector& psi);

/// Conjugate-linear in the first argument.
cplx inner_product(const FockSpace& F, const FockVector& phi, const FockVector& psi);
double norm(const FockSpace& F, const FockVector& psi);

/// (J psi)^{k1..kn}(t1..tn) = conj psi^{kn..k1}(tn..t1).
FockVector cpt(const FockVector& psi);

struct PoincareResult {
  FockVector vector;
  double interpolation_error = 0.0;  // cubic vs quadratic estimate
};
/// (U(a, lambda) psi)(t) = prod exp(i p_k(t_j).a) psi(t_1 - lambda, ...). Off
/// the grid range the shifted function is taken as zero.
PoincareResult poincare(const FockSpace& F, double a0, double a1, double lambda, const FockVector& psi,
                        double warn_tol = -1.0);

/// Largest violation of the exchange relation
/// psi(.., t_a, t_b, ..) = S(t_b - t_a) psi(.., t_b, t_a, ..) over adjacent pairs.
double exchange_residual(const FockSpace& F, const FockVector& psi);

/// Smeared ZF relations on each probe vector; the optional flag replaces S by
/// conj S in the first relation.
VerificationReport zf_relation_check(const FockSpace& F, const SmearedWavefunction& h1,
                                     const SmearedWavefunction& h2, const std::vector<FockVector>& probes,
                                     double tol = 1e-9, bool conjugate_twist = false);

/// Text dump: one "sector" header per tuple, then row-major re/im pairs.
std::string dump(const FockVector& psi);

}  // namespace sgw

#endif  // SGW_FOCK_HPP
