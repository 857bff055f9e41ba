#include "sgw/fock.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "sgw/error.hpp"
#include "sgw/quadrature.hpp"

namespace sgw {

namespace {

constexpr cplx kI{0.0, 1.0};

std::size_t ipow(std::size_t b, int e) {
  std::size_t r = 1;
  for (int j = 0; j < e; ++j) r *= b;
  return r;
}

int factorial(int n) { return n <= 1 ? 1 : n * factorial(n - 1); }

bool all_zero(const std::vector<cplx>& v) {
  return std::all_of(v.begin(), v.end(), [](cplx c) { return c == cplx(0.0, 0.0); });
}

void add_into(std::map<SpeciesTuple, std::vector<cplx>>& m, const SpeciesTuple& t, const std::vector<cplx>& v,
              cplx s = 1.0) {
  auto it = m.find(t);
  if (it == m.end()) {
    auto& dst = m[t];
    dst.resize(v.size());
    for (std::size_t j = 0; j < v.size(); ++j) dst[j] = s * v[j];
    return;
  }
  if (it->second.size() != v.size()) fail(ErrorCode::InvalidArgument, "sector size mismatch");
  for (std::size_t j = 0; j < v.size(); ++j) it->second[j] += s * v[j];
}

void check_grid(const FockSpace& F, const SmearedWavefunction& h) {
  if (static_cast<int>(h.values.size()) != F.n()) fail(ErrorCode::InvalidArgument, "wavefunction size != grid size");
  if (h.species < 1 || h.species > F.species()) fail(ErrorCode::InvalidArgument, "species out of range");
}

// P_n for one particle number, acting on `in` (all tuples of length n).
std::map<SpeciesTuple, std::vector<cplx>> symmetrize_n(const FockSpace& F, int n,
                                                       const std::map<SpeciesTuple, std::vector<cplx>>& in) {
  if (n <= 1) return in;
  if (n > 4) fail(ErrorCode::BudgetExceeded, "S-symmetrization limited to n <= 4");
  const std::size_t N = F.n();
  const std::size_t total = ipow(N, n);

  std::vector<SpeciesTuple> outs;
  for (const auto& [t, v] : in) {
    SpeciesTuple s = t;
    std::sort(s.begin(), s.end());
    do {
      if (std::find(outs.begin(), outs.end(), s) == outs.end()) outs.push_back(s);
    } while (std::next_permutation(s.begin(), s.end()));
  }
  std::sort(outs.begin(), outs.end());

  std::vector<int> perm(n);
  std::map<SpeciesTuple, std::vector<cplx>> out;
  const double inv_fact = 1.0 / factorial(n);
  for (const auto& t : outs) {
    std::vector<cplx> acc(total, cplx(0.0, 0.0));
    std::iota(perm.begin(), perm.end(), 0);
    do {
      SpeciesTuple s(n);
      for (int a = 0; a < n; ++a) s[a] = t[perm[a]];
      auto it = in.find(s);
      if (it == in.end()) continue;
      const auto& src = it->second;
      std::vector<int> inv(n);
      for (int a = 0; a < n; ++a) inv[perm[a]] = a;
      std::vector<std::size_t> stride(n);
      for (int b = 0; b < n; ++b) stride[b] = ipow(N, n - 1 - inv[b]);
      std::vector<std::pair<int, int>> pairs;
      for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b)
          if (inv[a] > inv[b]) pairs.emplace_back(a, b);
      std::vector<const std::vector<cplx>*> tabs;
      for (auto [a, b] : pairs) tabs.push_back(&F.S_table(t[a], t[b]));

      std::vector<std::size_t> I(n, 0);
      for (std::size_t L = 0; L < total; ++L) {
        std::size_t J = 0;
        for (int b = 0; b < n; ++b) J += I[b] * stride[b];
        cplx fac = 1.0;
        for (std::size_t q = 0; q < pairs.size(); ++q) fac *= (*tabs[q])[I[pairs[q].first] * N + I[pairs[q].second]];
        acc[L] += fac * src[J];
        for (int d = n - 1; d >= 0; --d) {
          if (++I[d] < N) break;
          I[d] = 0;
        }
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
    for (auto& c : acc) c *= inv_fact;
    out.emplace(t, std::move(acc));
  }
  return out;
}

std::vector<double> lagrange_weights(const std::vector<double>& xs, int s, int m, double x) {
  std::vector<double> w(m, 1.0);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      if (a != b) w[a] *= (x - xs[s + b]) / (xs[s + a] - xs[s + b]);
  return w;
}

}  // namespace

RapidityGrid RapidityGrid::gauss_legendre(int n, double cutoff) {
  const Rule r = ::sgw::gauss_legendre(n, -cutoff, cutoff);
  return {r.nodes, r.weights, cutoff};
}

FockVector FockVector::vacuum() {
  FockVector v;
  v.sectors[{}] = {cplx(1.0, 0.0)};
  return v;
}

int FockVector::max_particles() const {
  int m = 0;
  for (const auto& [t, v] : sectors) m = std::max(m, static_cast<int>(t.size()));
  return m;
}

FockVector FockVector::sector(int n) const {
  FockVector out;
  for (const auto& [t, v] : sectors)
    if (static_cast<int>(t.size()) == n) out.sectors.emplace(t, v);
  return out;
}

FockVector& FockVector::operator+=(const FockVector& o) {
  for (const auto& [t, v] : o.sectors) add_into(sectors, t, v);
  return *this;
}

FockVector& FockVector::operator-=(const FockVector& o) {
  for (const auto& [t, v] : o.sectors) add_into(sectors, t, v, -1.0);
  return *this;
}

FockVector& FockVector::operator*=(cplx s) {
  for (auto& [t, v] : sectors)
    for (auto& c : v) c *= s;
  return *this;
}

FockSpace::FockSpace(const ScatteringModel& model, RapidityGrid grid, int n_max)
    : model_(model), grid_(std::move(grid)), n_max_(n_max) {
  if (n_max < 0 || n_max > 4) fail(ErrorCode::BudgetExceeded, "N_max must lie in [0, 4]");
  const int N = grid_.size(), K = model_.K;
  table_.assign(K * K, std::vector<cplx>(static_cast<std::size_t>(N) * N));
  for (int k = 1; k <= K; ++k) {
    for (int l = k; l <= K; ++l) {
      auto& t = table_[(k - 1) * K + (l - 1)];
      for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j)
          t[i * N + j] = eval_amplitude(model_.amp(k, l), cplx(grid_.nodes[j] - grid_.nodes[i], 0.0), model_.amp_opt);
      table_[(l - 1) * K + (k - 1)] = t;
    }
  }
}

SmearedWavefunction FockSpace::sample(int species, const std::function<cplx(double)>& h) const {
  SmearedWavefunction w{species, {}};
  for (double x : grid_.nodes) w.values.push_back(h(x));
  return w;
}

FockVector s_symmetrize(const FockSpace& F, const FockVector& psi) {
  std::map<int, std::map<SpeciesTuple, std::vector<cplx>>> by_n;
  for (const auto& [t, v] : psi.sectors) by_n[static_cast<int>(t.size())].emplace(t, v);
  FockVector out;
  for (const auto& [n, m] : by_n)
    for (auto& [t, v] : symmetrize_n(F, n, m)) out.sectors.emplace(t, std::move(v));
  return out;
}

FockVector create(const FockSpace& F, const SmearedWavefunction& h, const FockVector& psi) {
  check_grid(F, h);
  const std::size_t N = F.n();
  std::map<int, std::map<SpeciesTuple, std::vector<cplx>>> raw;
  for (const auto& [t, v] : psi.sectors) {
    const int n = static_cast<int>(t.size());
    if (n + 1 > F.n_max()) {
      if (!all_zero(v)) fail(ErrorCode::TruncationOverflow, "creation would exceed N_max");
      continue;
    }
    SpeciesTuple t2{h.species};
    t2.insert(t2.end(), t.begin(), t.end());
    std::vector<cplx> w(N * v.size());
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t J = 0; J < v.size(); ++J) w[i * v.size() + J] = h.values[i] * v[J];
    add_into(raw[n + 1], t2, w);
  }
  FockVector out;
  for (const auto& [n, m] : raw) {
    const double s = std::sqrt(static_cast<double>(n));
    for (auto& [t, v] : symmetrize_n(F, n, m)) {
      for (auto& c : v) c *= s;
      out.sectors.emplace(t, std::move(v));
    }
  }
  return out;
}

FockVector annihilate(const FockSpace& F, const SmearedWavefunction& h, const FockVector& psi) {
  check_grid(F, h);
  const std::size_t N = F.n();
  FockVector out;
  for (const auto& [t, v] : psi.sectors) {
    if (t.empty() || t[0] != h.species) continue;
    const int n = static_cast<int>(t.size());
    const std::size_t rest = v.size() / N;
    std::vector<cplx> w(rest, cplx(0.0, 0.0));
    for (std::size_t i = 0; i < N; ++i) {
      const cplx c = F.grid().weights[i] * h.values[i];
      for (std::size_t J = 0; J < rest; ++J) w[J] += c * v[i * rest + J];
    }
    const double s = std::sqrt(static_cast<double>(n));
    add_into(out.sectors, SpeciesTuple(t.begin() + 1, t.end()), w, s);
  }
  return out;
}

FockVector annihilate_at(const FockSpace& F, int species, int node, const FockVector& psi) {
  const std::size_t N = F.n();
  FockVector out;
  for (const auto& [t, v] : psi.sectors) {
    if (t.empty() || t[0] != species) continue;
    const std::size_t rest = v.size() / N;
    std::vector<cplx> w(v.begin() + node * rest, v.begin() + (node + 1) * rest);
    add_into(out.sectors, SpeciesTuple(t.begin() + 1, t.end()), w, std::sqrt(static_cast<double>(t.size())));
  }
  return out;
}

FockVector create_pair(const FockSpace& F, int k1, int k2, const std::vector<cplx>& kernel, const FockVector& psi) {
  const std::size_t N = F.n();
  if (kernel.size() != N * N) fail(ErrorCode::InvalidArgument, "pair kernel must be N x N");
  std::map<int, std::map<SpeciesTuple, std::vector<cplx>>> raw;
  for (const auto& [t, v] : psi.sectors) {
    const int n = static_cast<int>(t.size());
    if (n + 2 > F.n_max()) {
      if (!all_zero(v)) fail(ErrorCode::TruncationOverflow, "pair creation would exceed N_max");
      continue;
    }
    SpeciesTuple t2{k1, k2};
    t2.insert(t2.end(), t.begin(), t.end());
    std::vector<cplx> w(N * N * v.size());
    for (std::size_t ij = 0; ij < N * N; ++ij)
      for (std::size_t J = 0; J < v.size(); ++J) w[ij * v.size() + J] = kernel[ij] * v[J];
    add_into(raw[n + 2], t2, w);
  }
  FockVector out;
  for (const auto& [n, m] : raw) {
    const double s = std::sqrt(static_cast<double>(n) * (n - 1));
    for (auto& [t, v] : symmetrize_n(F, n, m)) {
      for (auto& c : v) c *= s;
      out.sectors.emplace(t, std::move(v));
    }
  }
  return out;
}

FockVector annihilate_pair(const FockSpace& F, int k1, int k2, const std::vector<cplx>& kernel,
                           const FockVector& psi) {
  const std::size_t N = F.n();
  if (kernel.size() != N * N) fail(ErrorCode::InvalidArgument, "pair kernel must be N x N");
  const auto& w = F.grid().weights;
  FockVector out;
  for (const auto& [t, v] : psi.sectors) {
    if (t.size() < 2 || t[0] != k1 || t[1] != k2) continue;
    const int n = static_cast<int>(t.size());
    const std::size_t rest = v.size() / (N * N);
    std::vector<cplx> r(rest, cplx(0.0, 0.0));
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t j = 0; j < N; ++j) {
        const cplx c = w[i] * w[j] * kernel[i * N + j];
        const std::size_t base = (i * N + j) * rest;
        for (std::size_t J = 0; J < rest; ++J) r[J] += c * v[base + J];
      }
    add_into(out.sectors, SpeciesTuple(t.begin() + 2, t.end()), r, std::sqrt(static_cast<double>(n) * (n - 1)));
  }
  return out;
}

cplx inner_product(const FockSpace& F, const FockVector& phi, const FockVector& psi) {
  const std::size_t N = F.n();
  const auto& w = F.grid().weights;
  cplx sum = 0.0;
  for (const auto& [t, a] : phi.sectors) {
    auto it = psi.sectors.find(t);
    if (it == psi.sectors.end()) continue;
    const auto& b = it->second;
    const int n = static_cast<int>(t.size());
    if (n == 0) {
      sum += std::conj(a[0]) * b[0];
      continue;
    }
    // weight of the leading n-1 digits times the last digit
    const std::size_t rest = a.size() / N;
    std::vector<double> lead(rest, 1.0);
    for (std::size_t L = 0; L < rest; ++L) {
      std::size_t x = L;
      for (int d = 0; d < n - 1; ++d) {
        lead[L] *= w[x % N];
        x /= N;
      }
    }
    for (std::size_t L = 0; L < rest; ++L) {
      cplx row = 0.0;
      for (std::size_t i = 0; i < N; ++i) row += w[i] * std::conj(a[L * N + i]) * b[L * N + i];
      sum += lead[L] * row;
    }
  }
  return sum;
}

double norm(const FockSpace& F, const FockVector& psi) { return std::sqrt(std::max(0.0, inner_product(F, psi, psi).real())); }

FockVector cpt(const FockVector& psi) {
  FockVector out;
  for (const auto& [t, v] : psi.sectors) {
    const int n = static_cast<int>(t.size());
    SpeciesTuple r(t.rbegin(), t.rend());
    if (n <= 1) {
      std::vector<cplx> c(v.size());
      for (std::size_t j = 0; j < v.size(); ++j) c[j] = std::conj(v[j]);
      add_into(out.sectors, r, c);
      continue;
    }
    const std::size_t N = static_cast<std::size_t>(std::llround(std::pow(double(v.size()), 1.0 / n)));
    std::vector<cplx> c(v.size());
    std::vector<std::size_t> I(n, 0);
    for (std::size_t L = 0; L < v.size(); ++L) {
      std::size_t R = 0;
      for (int d = n - 1; d >= 0; --d) R = R * N + I[d];
      c[R] = std::conj(v[L]);
      for (int d = n - 1; d >= 0; --d) {
        if (++I[d] < N) break;
        I[d] = 0;
      }
    }
    add_into(out.sectors, r, c);
  }
  return out;
}

PoincareResult poincare(const FockSpace& F, double a0, double a1, double lambda, const FockVector& psi,
                        double warn_tol) {
  const std::size_t N = F.n();
  const auto& x = F.grid().nodes;
  // per-node cubic and quadratic stencils for theta_i - lambda
  struct Stencil {
    int s3 = 0, s2 = 0;
    std::vector<double> w3, w2;
    bool inside = true;
  };
  std::vector<Stencil> st(N);
  for (std::size_t i = 0; i < N && lambda != 0.0; ++i) {
    const double y = x[i] - lambda;
    auto& s = st[i];
    if (y < x.front() || y > x.back()) {
      s.inside = false;
      continue;
    }
    const int hi = static_cast<int>(std::upper_bound(x.begin(), x.end(), y) - x.begin());
    s.s3 = std::clamp(hi - 2, 0, static_cast<int>(N) - 4);
    s.w3 = lagrange_weights(x, s.s3, 4, y);
    s.s2 = std::clamp(std::abs(y - x[std::max(hi - 1, 0)]) < std::abs(y - x[std::min<std::size_t>(hi, N - 1)]) ? hi - 2 : hi - 1,
                      0, static_cast<int>(N) - 3);
    s.w2 = lagrange_weights(x, s.s2, 3, y);
  }

  PoincareResult res;
  for (const auto& [t, v] : psi.sectors) {
    const int n = static_cast<int>(t.size());
    std::vector<cplx> out(v.size(), cplx(0.0, 0.0));
    if (n == 0) {
      res.vector.sectors[t] = v;
      continue;
    }
    std::vector<std::size_t> I(n, 0);
    std::vector<std::size_t> strides(n);
    for (int d = 0; d < n; ++d) strides[d] = ipow(N, n - 1 - d);
    for (std::size_t L = 0; L < v.size(); ++L) {
      cplx phase = 1.0;
      for (int d = 0; d < n; ++d) {
        const auto p = momentum(F.model().mass(t[d]), cplx(x[I[d]], 0.0));
        phase *= std::exp(kI * minkowski(p, a0, a1));
      }
      cplx val3 = 0.0, val2 = 0.0;
      if (lambda == 0.0) {
        val3 = val2 = v[L];
      } else {
        bool inside = true;
        for (int d = 0; d < n; ++d) inside = inside && st[I[d]].inside;
        if (inside) {
          for (int order : {4, 3}) {
            cplx acc = 0.0;
            const std::size_t combos = ipow(order, n);
            for (std::size_t c = 0; c < combos; ++c) {
              std::size_t cc = c, src = 0;
              double wt = 1.0;
              for (int d = n - 1; d >= 0; --d) {
                const int o = static_cast<int>(cc % order);
                cc /= order;
                const auto& s = st[I[d]];
                const int base = order == 4 ? s.s3 : s.s2;
                wt *= order == 4 ? s.w3[o] : s.w2[o];
                src += (base + o) * strides[d];
              }
              acc += wt * v[src];
            }
            (order == 4 ? val3 : val2) = acc;
          }
        }
      }
      out[L] = phase * val3;
      res.interpolation_error = std::max(res.interpolation_error, std::abs(val3 - val2));
      for (int d = n - 1; d >= 0; --d) {
        if (++I[d] < N) break;
        I[d] = 0;
      }
    }
    res.vector.sectors[t] = std::move(out);
  }
  if (warn_tol >= 0.0 && res.interpolation_error > warn_tol)
    fail(ErrorCode::InterpolationWarning, "interpolation error estimate " + std::to_string(res.interpolation_error));
  return res;
}

double exchange_residual(const FockSpace& F, const FockVector& psi) {
  const std::size_t N = F.n();
  double worst = 0.0, scale = 0.0;
  for (const auto& [t, v] : psi.sectors)
    for (const auto& c : v) scale = std::max(scale, std::abs(c));
  for (const auto& [t, v] : psi.sectors) {
    const int n = static_cast<int>(t.size());
    for (int a = 0; a + 1 < n; ++a) {
      SpeciesTuple s = t;
      std::swap(s[a], s[a + 1]);
      auto it = psi.sectors.find(s);
      const std::vector<cplx>* u = it == psi.sectors.end() ? nullptr : &it->second;
      const std::size_t sa = ipow(N, n - 1 - a), sb = ipow(N, n - 2 - a);
      std::vector<std::size_t> I(n, 0);
      for (std::size_t L = 0; L < v.size(); ++L) {
        const std::size_t Ls = L - I[a] * sa - I[a + 1] * sb + I[a + 1] * sa + I[a] * sb;
        const cplx other = u ? (*u)[Ls] : cplx(0.0, 0.0);
        const cplx r = v[L] - F.S(t[a], t[a + 1], I[a], I[a + 1]) * other;
        worst = std::max(worst, std::abs(r));
        for (int d = n - 1; d >= 0; --d) {
          if (++I[d] < N) break;
          I[d] = 0;
        }
      }
    }
  }
  return scale > 0.0 ? worst / scale : worst;
}

VerificationReport zf_relation_check(const FockSpace& F, const SmearedWavefunction& h1,
                                     const SmearedWavefunction& h2, const std::vector<FockVector>& probes,
                                     double tol, bool conjugate_twist) {
  check_grid(F, h1);
  check_grid(F, h2);
  const int k = h1.species, l = h2.species;
  const std::size_t N = F.n();
  const auto& w = F.grid().weights;
  VerificationReport rep;
  rep.subject = "zf";

  std::vector<cplx> K1(N * N), K2(N * N);
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j) {
      cplx s = F.S(k, l, i, j);  // S_kl(theta_j - theta_i)
      if (conjugate_twist) s = std::conj(s);
      K1[i * N + j] = h2.values[i] * h1.values[j] * s;
      K2[i * N + j] = h1.values[i] * h2.values[j] * F.S(k, l, j, i);
    }
  cplx delta = 0.0;
  if (k == l)
    for (std::size_t i = 0; i < N; ++i) delta += w[i] * h1.values[i] * h2.values[i];

  for (std::size_t p = 0; p < probes.size(); ++p) {
    const auto& psi = probes[p];
    const int n = psi.max_particles();
    const std::string tag = "[" + std::to_string(p) + ",n=" + std::to_string(n) + "]";
    if (n + 2 <= F.n_max()) {
      const auto lhs = create(F, h1, create(F, h2, psi));
      const auto rhs = create_pair(F, l, k, K1, psi);
      rep.add("relation1" + tag, norm(F, lhs - rhs), tol);
    }
    if (n >= 2) {
      const auto lhs = annihilate(F, h1, annihilate(F, h2, psi));
      const auto rhs = annihilate_pair(F, k, l, K2, psi);
      rep.add("relation2" + tag, norm(F, lhs - rhs), tol);
    }
    if (n + 1 <= F.n_max()) {
      const auto lhs = annihilate(F, h1, create(F, h2, psi));
      FockVector rhs = delta * psi;
      for (std::size_t i = 0; i < N; ++i) {
        const auto a = annihilate_at(F, k, static_cast<int>(i), psi);
        if (a.empty()) continue;
        SmearedWavefunction hs{l, std::vector<cplx>(N)};
        for (std::size_t x = 0; x < N; ++x) hs.values[x] = h2.values[x] * F.S(k, l, i, x);
        rhs += (w[i] * h1.values[i]) * create(F, hs, a);
      }
      rep.add("relation3" + tag, norm(F, lhs - rhs), tol);
    }
  }
  return rep;
}

std::string dump(const FockVector& psi) {
  std::string out;
  char buf[96];
  for (const auto& [t, v] : psi.sectors) {
    out += "sector ";
    if (t.empty()) out += "-";
    for (std::size_t j = 0; j < t.size(); ++j) out += (j ? "," : "") + std::to_string(t[j]);
    out += " n=" + std::to_string(t.size()) + " size=" + std::to_string(v.size()) + "\n";
    for (const auto& c : v) {
      std::snprintf(buf, sizeof buf, "%.17g %.17g\n", c.real(), c.imag());
      out += buf;
    }
  }
  return out;
}

}  // namespace sgw
