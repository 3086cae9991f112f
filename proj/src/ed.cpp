#include "quench/ed.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>

#define lapack_complex_double std::complex<double>
#define lapack_complex_float std::complex<float>
#include <cblas.h>

#include "quench/linalg.hpp"

namespace quench {

double DenseState::norm() const {
  double s = 0;
  for (const cd& z : amp) s += std::norm(z);
  return std::sqrt(s);
}

void DenseState::normalize() {
  const double n = norm();
  if (n == 0) throw std::runtime_error("cannot normalize the zero state");
  for (cd& z : amp) z /= n;
}

void check_ed_size(const ModelSpec& m) {
  const int M = model_sites(m);
  if (is_hubbard(m) && M > 8)
    throw std::invalid_argument("dense Hubbard reference capped at M = 8");
  if (!is_hubbard(m) && M > 14)
    throw std::invalid_argument("dense Ising reference capped at M = 14");
}

namespace {

long ipow(long b, int e) {
  long r = 1;
  while (e-- > 0) r *= b;
  return r;
}

// Sparse per-column action of a (dd x dd) two-site matrix.
struct SparseBlock {
  int dd = 0;
  std::vector<std::vector<std::pair<int, cd>>> cols;
};

SparseBlock to_sparse(const Tensor& h) {
  SparseBlock b;
  b.dd = (int)h.dim(0);
  b.cols.resize(b.dd);
  for (int gp = 0; gp < b.dd; gp++)
    for (int g = 0; g < b.dd; g++) {
      const cd v = h.data()[(long)gp * b.dd + g];
      if (v != cd(0, 0)) b.cols[g].push_back({gp, v});
    }
  return b;
}

// out += block(n, n+1) * in; contiguous axpy over the trailing R amplitudes.
void accumulate_block_adjacent(const SparseBlock& b, int n, int M, int d, const cd* in,
                               cd* out) {
  const long R = ipow(d, M - 2 - n);
  const long L = ipow(d, n);
  const long block = (long)b.dd * R;
  for (long l = 0; l < L; l++) {
    const cd* src = in + l * block;
    cd* dst = out + l * block;
    for (int g = 0; g < b.dd; g++)
      for (const auto& [gp, v] : b.cols[g]) {
        const cd* s = src + (long)g * R;
        cd* t = dst + (long)gp * R;
        for (long r = 0; r < R; r++) t[r] += v * s[r];
      }
  }
}

// out += block applied at a general pair (n, m), optionally switching to the
// odd block when the intervening sites carry odd fermion parity.
void accumulate_block_pair(const SparseBlock& even, const SparseBlock* odd, int n, int m,
                           int M, int d, const cd* in, cd* out) {
  const long L = ipow(d, n);
  const long Mid = ipow(d, m - n - 1);
  const long R = ipow(d, M - 1 - m);
  const long sn = ipow(d, M - 1 - n);
  const long sm = R;
  auto mid_parity = [&](long q) {
    int p = 0;
    long rest = q;
    for (int k = 0; k < m - n - 1; k++) {
      const int dig = int(rest % d);
      if (d == 4 && (dig == 1 || dig == 2)) p ^= 1;
      rest /= d;
    }
    return p;
  };
  std::vector<cd> buf((size_t)d * d);
  for (long l = 0; l < L; l++)
    for (long q = 0; q < Mid; q++) {
      const SparseBlock& blk = (odd && mid_parity(q)) ? *odd : even;
      const long base0 = l * sn * d + q * sm * d;
      for (long r = 0; r < R; r++) {
        const long base = base0 + r;
        for (int a = 0; a < d; a++)
          for (int bb = 0; bb < d; bb++) buf[a * d + bb] = in[base + a * sn + bb * sm];
        for (int g = 0; g < blk.dd; g++) {
          if (buf[g] == cd(0, 0)) continue;
          for (const auto& [gp, v] : blk.cols[g])
            out[base + (gp / d) * sn + (gp % d) * sm] += v * buf[g];
        }
      }
    }
}

// Dense unitary gate on an adjacent pair, overwrite semantics, gemm-backed.
void dense_gate_adjacent(const Tensor& gate, int n, int M, int d, const cd* in, cd* out) {
  const long dd = d * (long)d;
  const long R = ipow(d, M - 2 - n);
  const long L = ipow(d, n);
  const cd one(1, 0), zero(0, 0);
  if (R >= 8) {
    for (long l = 0; l < L; l++)
      cblas_zgemm(CblasRowMajor, CblasNoTrans, CblasNoTrans, (int)dd, (int)R, (int)dd, &one,
                  gate.data(), (int)dd, in + l * dd * R, (int)R, &zero, out + l * dd * R,
                  (int)R);
    return;
  }
  // fold the trailing axis into the gate: (L x dd*R) * (G (x) I_R)^T
  const long w = dd * R;
  std::vector<cd> folded_t((size_t)w * w, cd(0, 0));  // transposed for row-major gemm
  for (long gp = 0; gp < dd; gp++)
    for (long g = 0; g < dd; g++) {
      const cd v = gate.data()[gp * dd + g];
      if (v == cd(0, 0)) continue;
      for (long r = 0; r < R; r++) folded_t[(g * R + r) * w + gp * R + r] = v;
    }
  cblas_zgemm(CblasRowMajor, CblasNoTrans, CblasNoTrans, (int)L, (int)w, (int)w, &one, in,
              (int)w, folded_t.data(), (int)w, &zero, out, (int)w);
}

std::vector<std::pair<BondPair, SparseBlock>> sparse_bonds(const ModelSpec& m) {
  std::vector<std::pair<BondPair, SparseBlock>> out;
  for (const auto& p : interaction_pairs(m))
    out.push_back({p, to_sparse(build_bond_hamiltonian(m, p.n, p.m))});
  return out;
}

}  // namespace

DenseState dense_product_state(const ModelSpec& m, const ProductStateSpec& spec) {
  check_ed_size(m);
  const int M = model_sites(m);
  const int d = model_local_dim(m);
  if ((int)spec.labels.size() != M) throw std::invalid_argument("pattern length mismatch");
  DenseState st;
  st.sites = M;
  st.local_dim = d;
  const long dim = ipow(d, M);
  st.amp.assign(dim, cd(0, 0));
  std::vector<std::vector<cd>> locals;
  for (const auto& l : spec.labels) locals.push_back(local_state(m, l));
  for (long i = 0; i < dim; i++) {
    cd v(1, 0);
    long rest = i;
    for (int s = M - 1; s >= 0 && v != cd(0, 0); s--) {
      v *= locals[s][rest % d];
      rest /= d;
    }
    st.amp[i] = v;
  }
  return st;
}

void hamiltonian_apply(const ModelSpec& m, const cd* in, cd* out) {
  const int M = model_sites(m);
  const int d = model_local_dim(m);
  const long dim = ipow(d, M);
  std::fill(out, out + dim, cd(0, 0));
  for (const auto& p : interaction_pairs(m)) {
    Tensor h = build_bond_hamiltonian(m, p.n, p.m);
    SparseBlock blk = to_sparse(h);
    if (p.m == p.n + 1) {
      accumulate_block_adjacent(blk, p.n, M, d, in, out);
    } else if (model_fermionic(m)) {
      for (cd& z : h.storage()) z = -z;  // odd intervening parity flips tunnelling
      SparseBlock odd = to_sparse(h);
      accumulate_block_pair(blk, &odd, p.n, p.m, M, d, in, out);
    } else {
      accumulate_block_pair(blk, nullptr, p.n, p.m, M, d, in, out);
    }
  }
}

// Reusable matrix-free applier: prebuilds the sparse bond blocks once.
struct HamiltonianAction {
  const ModelSpec& model;
  int M, d;
  long dim;
  std::vector<std::pair<BondPair, SparseBlock>> bonds;
  std::vector<std::pair<BondPair, SparseBlock>> bonds_odd;  // parity-flipped variants

  explicit HamiltonianAction(const ModelSpec& m)
      : model(m), M(model_sites(m)), d(model_local_dim(m)), dim(ipow(d, M)),
        bonds(sparse_bonds(m)) {
    for (const auto& [p, blk] : bonds) {
      if (model_fermionic(m) && p.m > p.n + 1) {
        Tensor h = build_bond_hamiltonian(m, p.n, p.m);
        for (cd& z : h.storage()) z = -z;
        bonds_odd.push_back({p, to_sparse(h)});
      }
    }
  }

  void operator()(const cd* in, cd* out) const {
    std::fill(out, out + dim, cd(0, 0));
    size_t oddi = 0;
    for (const auto& [p, blk] : bonds) {
      if (p.m == p.n + 1) {
        accumulate_block_adjacent(blk, p.n, M, d, in, out);
      } else if (model_fermionic(model)) {
        accumulate_block_pair(blk, &bonds_odd[oddi++].second, p.n, p.m, M, d, in, out);
      } else {
        accumulate_block_pair(blk, nullptr, p.n, p.m, M, d, in, out);
      }
    }
  }
};

Tensor dense_hamiltonian(const ModelSpec& m) {
  const int M = model_sites(m);
  const int d = model_local_dim(m);
  const long dim = ipow(d, M);
  if (dim > 8192) throw std::invalid_argument("dense_hamiltonian capped at dim 8192");
  HamiltonianAction H(m);
  Tensor h({dim, dim});
  std::vector<cd> col(dim), out(dim);
  for (long j = 0; j < dim; j++) {
    std::fill(col.begin(), col.end(), cd(0, 0));
    col[j] = 1;
    H(col.data(), out.data());
    for (long i = 0; i < dim; i++) h.data()[i * dim + j] = out[i];
  }
  return h;
}

EdOracle::EdOracle(const ModelSpec& m) : model_(m) {
  check_ed_size(m);
  Tensor h = dense_hamiltonian(m);
  dim_ = h.dim(0);
  la::eigh(h.data(), dim_, evals_, evecs_);
}

DenseState EdOracle::exact_evolve(const DenseState& psi0, double t) const {
  if (psi0.dim() != dim_) throw std::invalid_argument("state dimension mismatch");
  std::vector<cd> coeff(dim_, cd(0, 0));
  for (long i = 0; i < dim_; i++) {
    cd c = 0;
    const cd* row = evecs_.data() + (size_t)i * dim_;
    for (long j = 0; j < dim_; j++) c += std::conj(row[j]) * psi0.amp[j];
    coeff[i] = c * std::exp(cd(0, -evals_[i] * t));
  }
  DenseState out = psi0;
  std::fill(out.amp.begin(), out.amp.end(), cd(0, 0));
  for (long i = 0; i < dim_; i++) {
    const cd c = coeff[i];
    if (c == cd(0, 0)) continue;
    const cd* row = evecs_.data() + (size_t)i * dim_;
    for (long j = 0; j < dim_; j++) out.amp[j] += c * row[j];
  }
  return out;
}

DenseState exact_evolve(const ModelSpec& m, const DenseState& psi0, double t) {
  return EdOracle(m).exact_evolve(psi0, t);
}

std::pair<double, double> spectral_range(const ModelSpec& m) {
  const long dim = ipow(model_local_dim(m), model_sites(m));
  HamiltonianAction H(m);
  const int iters = (int)std::min<long>(40, dim);
  std::vector<cd> v(dim), w(dim), prev(dim, cd(0, 0));
  std::uint64_t s = 0x9e3779b97f4a7c15ULL;
  for (long i = 0; i < dim; i++) {
    s ^= s << 13;
    s ^= s >> 7;
    s ^= s << 17;
    v[i] = cd(double(s % 1000) / 999.0 - 0.5, double((s >> 10) % 1000) / 999.0 - 0.5);
  }
  double nrm = 0;
  for (auto& z : v) nrm += std::norm(z);
  nrm = std::sqrt(nrm);
  for (auto& z : v) z /= nrm;

  std::vector<double> alpha, beta;
  for (int k = 0; k < iters; k++) {
    H(v.data(), w.data());
    cd a = 0;
    for (long i = 0; i < dim; i++) a += std::conj(v[i]) * w[i];
    alpha.push_back(a.real());
    for (long i = 0; i < dim; i++)
      w[i] -= a * v[i] + (k > 0 ? cd(beta.back()) * prev[i] : cd(0, 0));
    double b = 0;
    for (auto& z : w) b += std::norm(z);
    b = std::sqrt(b);
    if (b < 1e-12 || k == iters - 1) break;
    beta.push_back(b);
    prev = v;
    for (long i = 0; i < dim; i++) v[i] = w[i] / b;
  }
  std::vector<double> diag = alpha, off = beta;
  la::eigh_tridiag(diag, off, nullptr);
  const double lo = diag.front(), hi = diag.back();
  const double pad = 0.05 * (hi - lo) + 1e-9;
  return {lo - pad, hi + pad};
}

DenseState krylov_evolve(const ModelSpec& m, const DenseState& psi0, double t, double tol) {
  KrylovPropagator prop(m);
  DenseState out = psi0;
  prop.step(out, t, tol);
  return out;
}

std::vector<cd> dense_observable(const ModelSpec& m, const DenseState& psi,
                                 const ObservableSpec& obs) {
  const int M = psi.sites;
  const int d = psi.local_dim;
  const long dim = psi.dim();
  if (!observable_compatible(m, obs.kind))
    throw std::invalid_argument("observable incompatible with the model");
  const int r = obs.ref(M);
  std::vector<cd> out(M, cd(0, 0));

  auto digit = [&](long i, int site) { return int(i / ipow(d, M - 1 - site)) % d; };
  auto nup = [&](int dig) { return dig >> 1; };

  switch (obs.kind) {
    case ObservableKind::density:
      for (long i = 0; i < dim; i++) {
        const double w = std::norm(psi.amp[i]);
        if (w == 0) continue;
        for (int n = 0; n < M; n++) out[n] += w * nup(digit(i, n));
      }
      return out;
    case ObservableKind::density_density:
      for (long i = 0; i < dim; i++) {
        const double w = std::norm(psi.amp[i]);
        if (w == 0 || !nup(digit(i, r))) continue;
        for (int n = 0; n < M; n++) out[n] += w * nup(digit(i, n));
      }
      return out;
    case ObservableKind::szsz:
      for (long i = 0; i < dim; i++) {
        const double w = std::norm(psi.amp[i]);
        if (w == 0) continue;
        const double zr = digit(i, r) == 0 ? 0.5 : -0.5;
        for (int n = 0; n < M; n++) out[n] += w * zr * (digit(i, n) == 0 ? 0.5 : -0.5);
      }
      return out;
    case ObservableKind::sx:
      for (int n = 0; n < M; n++) {
        const long s = ipow(d, M - 1 - n);
        cd acc = 0;
        for (long i = 0; i < dim; i++) {
          const long j = digit(i, n) == 0 ? i + s : i - s;
          acc += std::conj(psi.amp[i]) * psi.amp[j] * 0.5;
        }
        out[n] = acc;
      }
      return out;
    case ObservableKind::spsm:
      for (int n = 0; n < M; n++) {
        const long sr = ipow(d, M - 1 - r);
        const long sn = ipow(d, M - 1 - n);
        cd acc = 0;
        if (n == r) {
          for (long i = 0; i < dim; i++)
            if (digit(i, r) == 0) acc += std::norm(psi.amp[i]);
        } else {
          for (long i = 0; i < dim; i++) {
            if (digit(i, n) != 0 || digit(i, r) != 1) continue;
            const long j = i + sn - sr;
            acc += std::conj(psi.amp[j]) * psi.amp[i];
          }
        }
        out[n] = acc;
      }
      return out;
    case ObservableKind::offdiag_hubbard:
      for (int n = 0; n < M; n++) {
        if (n == r) {
          for (long i = 0; i < dim; i++)
            if (nup(digit(i, r))) out[n] += std::norm(psi.amp[i]);
          continue;
        }
        const int a = std::min(n, r), b = std::max(n, r);
        cd acc = 0;
        for (long i = 0; i < dim; i++) {
          const cd zi = psi.amp[i];
          if (zi == cd(0, 0)) continue;
          if (!nup(digit(i, n)) || nup(digit(i, r))) continue;
          const long j = i - 2 * ipow(d, M - 1 - n) + 2 * ipow(d, M - 1 - r);
          // JW string: down mode of the left endpoint plus both species of the
          // intervening sites
          int par = digit(i, a) & 1;
          for (int s2 = a + 1; s2 < b; s2++) {
            const int dg = digit(i, s2);
            par ^= (dg >> 1) ^ (dg & 1);
          }
          acc += (par ? -1.0 : 1.0) * std::conj(psi.amp[j]) * zi;
        }
        out[n] = acc;
      }
      return out;
    default:
      throw std::invalid_argument("unsupported dense observable");
  }
}

double reduced_entropy(const DenseState& psi, int cut) {
  const long dl = ipow(psi.local_dim, cut);
  const long dr = psi.dim() / dl;
  Tensor mat({dl, dr}, psi.amp);
  SvdResult svd = svd_truncate(mat, std::min(dl, dr), 0.0);
  double w = 0;
  for (double s : svd.singular_values) w += s * s;
  double ent = 0;
  for (double s : svd.singular_values) {
    const double p = s * s / w;
    if (p > 1e-300) ent -= p * std::log(p);
  }
  return ent;
}

void apply_dense_two_site_gate(DenseState& psi, const Tensor& gate, int n, int m,
                               const ModelSpec& model) {
  const int d = psi.local_dim;
  const int M = psi.sites;
  std::vector<cd> next(psi.amp.size(), cd(0, 0));
  if (m == n + 1) {
    dense_gate_adjacent(gate, n, M, d, psi.amp.data(), next.data());
  } else if (!model_fermionic(model)) {
    accumulate_block_pair(to_sparse(gate), nullptr, n, m, M, d, psi.amp.data(), next.data());
  } else {
    throw std::invalid_argument(
        "routed fermionic dense gates need parity-conditioned variants; use "
        "dense_schedule_step");
  }
  psi.amp = std::move(next);
}

const Tensor& DenseGateCache::gate(const ModelSpec& model, int n, int m, GatePart part,
                                   double dt, bool parity_flipped) {
  long long bits;
  std::memcpy(&bits, &dt, sizeof bits);
  auto key = std::make_tuple(n, m, (int)part, bits, parity_flipped);
  auto it = cache_.find(key);
  if (it != cache_.end()) return it->second;
  Tensor h = build_bond_hamiltonian(model, n, m, part);
  if (parity_flipped)
    for (cd& z : h.storage()) z = -z;
  std::vector<cd> g = la::expm_hermitian(h.data(), h.dim(0), cd(0, -dt));
  auto [pos, ok] = cache_.emplace(key, Tensor({h.dim(0), h.dim(0)}, std::move(g)));
  return pos->second;
}

void dense_schedule_step(DenseState& psi, const ModelSpec& model, const TrotterSchedule& sched,
                         double tau, DenseGateCache& cache) {
  const int M = psi.sites;
  const int d = psi.local_dim;
  std::vector<cd> next(psi.amp.size());
  for (const auto& g : sweep_gate_sequence(sched, model, tau)) {
    if (g.m == g.n + 1) {
      dense_gate_adjacent(cache.gate(model, g.n, g.m, g.part, g.dt, false), g.n, M, d,
                          psi.amp.data(), next.data());
    } else {
      std::fill(next.begin(), next.end(), cd(0, 0));
      SparseBlock blk = to_sparse(cache.gate(model, g.n, g.m, g.part, g.dt, false));
      if (model_fermionic(model)) {
        SparseBlock odd = to_sparse(cache.gate(model, g.n, g.m, g.part, g.dt, true));
        accumulate_block_pair(blk, &odd, g.n, g.m, M, d, psi.amp.data(), next.data());
      } else {
        accumulate_block_pair(blk, nullptr, g.n, g.m, M, d, psi.amp.data(), next.data());
      }
    }
    psi.amp.swap(next);
  }
}

struct KrylovPropagator::Impl {
  ModelSpec model;
  HamiltonianAction action;
  double lo, hi;

  explicit Impl(ModelSpec m) : model(std::move(m)), action(model) {
    auto [l, h] = spectral_range(model);
    lo = l;
    hi = h;
  }
};

KrylovPropagator::KrylovPropagator(ModelSpec m) : impl_(new Impl(std::move(m))) {}
KrylovPropagator::~KrylovPropagator() = default;
KrylovPropagator::KrylovPropagator(KrylovPropagator&&) noexcept = default;

const ModelSpec& KrylovPropagator::model() const { return impl_->model; }

void KrylovPropagator::apply_h(const cd* in, cd* out) const { impl_->action(in, out); }

void KrylovPropagator::step(DenseState& psi, double t, double tol) const {
  const long dim = psi.dim();
  const double c = 0.5 * (impl_->hi + impl_->lo);
  const double r = 0.5 * (impl_->hi - impl_->lo);
  const double x = r * std::abs(t);
  if (x < 1e-14) {
    const cd phase = std::exp(cd(0, -c * t));
    for (auto& z : psi.amp) z *= phase;
    return;
  }
  std::vector<cd> tkm1 = psi.amp;
  std::vector<cd> tk(dim), tmp(dim);
  impl_->action(tkm1.data(), tk.data());
  for (long i = 0; i < dim; i++) tk[i] = (tk[i] - c * tkm1[i]) / r;
  const double sgn = t >= 0 ? 1.0 : -1.0;
  auto coeff = [&](int k) -> cd {
    const double jk = std::cyl_bessel_j((double)k, x);
    return (k == 0 ? 1.0 : 2.0) * std::pow(cd(0, -sgn), k) * jk;
  };
  std::vector<cd> acc(dim);
  {
    const cd c0 = coeff(0), c1 = coeff(1);
    for (long i = 0; i < dim; i++) acc[i] = c0 * tkm1[i] + c1 * tk[i];
  }
  int tail_small = 0;
  for (int k = 2; k < 200000; k++) {
    impl_->action(tk.data(), tmp.data());
    for (long i = 0; i < dim; i++) {
      const cd next = 2.0 * (tmp[i] - c * tk[i]) / r - tkm1[i];
      tkm1[i] = tk[i];
      tk[i] = next;
    }
    const cd ck = coeff(k);
    if (ck != cd(0, 0))
      for (long i = 0; i < dim; i++) acc[i] += ck * tk[i];
    if (std::abs(ck) < tol && k > x) {
      if (++tail_small >= 8) break;
    } else {
      tail_small = 0;
    }
  }
  const cd phase = std::exp(cd(0, -c * t));
  for (long i = 0; i < dim; i++) psi.amp[i] = phase * acc[i];
}

Tensor dense_density_matrix(const DenseState& psi) {
  const long dim = psi.dim();
  Tensor rho({dim, dim});
  for (long i = 0; i < dim; i++)
    for (long j = 0; j < dim; j++) rho.data()[i * dim + j] = psi.amp[i] * std::conj(psi.amp[j]);
  return rho;
}

std::vector<cd> lindblad_observable(const ModelSpec& m, const Tensor& rho,
                                    const ObservableSpec& obs) {
  const int M = model_sites(m);
  const int d = model_local_dim(m);
  const long dim = rho.dim(0);
  std::vector<cd> out(M, cd(0, 0));
  auto digit = [&](long i, int site) { return int(i / ipow(d, M - 1 - site)) % d; };
  switch (obs.kind) {
    case ObservableKind::density:
      for (long i = 0; i < dim; i++) {
        const cd w = rho.data()[i * dim + i];
        for (int n = 0; n < M; n++) out[n] += w * double(digit(i, n) >> 1);
      }
      return out;
    case ObservableKind::density_density: {
      const int r = obs.ref(M);
      for (long i = 0; i < dim; i++) {
        const cd w = rho.data()[i * dim + i];
        if (!(digit(i, r) >> 1)) continue;
        for (int n = 0; n < M; n++) out[n] += w * double(digit(i, n) >> 1);
      }
      return out;
    }
    default:
      throw std::invalid_argument("lindblad_observable supports diagonal kinds only");
  }
}

}  // namespace quench
