#include "quench/mps.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>

#include "quench/linalg.hpp"

namespace quench {

int centre_bond(int sites) { return (sites - 1) / 2; }

std::vector<long> MpsState::bond_dims() const {
  std::vector<long> d;
  for (size_t i = 0; i + 1 < tensors_.size(); i++) d.push_back(tensors_[i].dim(2));
  return d;
}

double MpsState::norm() const {
  // generic transfer contraction, no canonical assumptions
  Tensor env({1, 1});
  env.at({0, 0}) = 1;
  for (const auto& a : tensors_) {
    Tensor tmp = contract(env, a, {{1, 0}});          // (l', d, r)
    env = contract(conj(a), tmp, {{0, 0}, {1, 1}});   // (r', r)
  }
  return std::sqrt(std::abs(env.at({0, 0}).real()));
}

namespace {

// split theta (Dl, d, d, Dr) at the middle, renormalizing kept weight
double split_theta(MpsState& st, Tensor theta, int n, bool leave_center_left) {
  const long Dl = theta.dim(0), d = theta.dim(1), Dr = theta.dim(3);
  Tensor mat = reshape(std::move(theta), {Dl * d, d * Dr});
  SvdResult svd = svd_truncate(mat, st.max_bond, st.cutoff);
  const long k = (long)svd.singular_values.size();

  double kept = 0;
  for (double s : svd.singular_values) kept += s * s;
  const double total = svd.discarded_weight < 1 ? kept / (1 - svd.discarded_weight) : kept;
  st.last_prenorm = std::sqrt(total);
  const double inv = kept > 0 ? 1.0 / std::sqrt(kept) : 1.0;

  if (leave_center_left) {
    // A_n = U * diag(s/|s|), A_{n+1} = Vh
    Tensor left = svd.left;  // (Dl*d, k)
    for (long r = 0; r < Dl * d; r++)
      for (long c = 0; c < k; c++)
        left.data()[r * k + c] *= svd.singular_values[c] * inv;
    st.tensors()[n] = reshape(std::move(left), {Dl, d, k});
    st.tensors()[n + 1] = reshape(std::move(svd.right), {k, d, Dr});
    st.center_ = n;
  } else {
    Tensor right = svd.right;  // (k, d*Dr)
    for (long r = 0; r < k; r++) {
      const cd f = svd.singular_values[r] * inv;
      for (long c = 0; c < d * Dr; c++) right.data()[r * d * Dr + c] *= f;
    }
    st.tensors()[n] = reshape(std::move(svd.left), {Dl, d, k});
    st.tensors()[n + 1] = reshape(std::move(right), {k, d, Dr});
    st.center_ = n + 1;
  }
  st.cumulative_discarded_weight += svd.discarded_weight;
  return svd.discarded_weight;
}

double apply_adjacent_gate(MpsState& st, const Tensor& gate, int n, bool leave_center_left) {
  const int d = st.local_dim();
  if (st.center() < n)
    st.move_center(n);
  else if (st.center() > n + 1)
    st.move_center(n + 1);

  Tensor theta = contract(st.tensors()[n], st.tensors()[n + 1], {{2, 0}});  // (Dl,d,d,Dr)
  const long Dl = theta.dim(0), Dr = theta.dim(3);
  Tensor g4 = reshape(Tensor(gate.shape(), gate.storage()), {d, d, d, d});
  // (out_n, out_m, Dl, Dr) <- sum over (in_n, in_m)
  Tensor applied = contract(g4, theta, {{2, 1}, {3, 2}});
  theta = permute(applied, {2, 0, 1, 3});
  return split_theta(st, std::move(theta), n, leave_center_left);
}

}  // namespace

void MpsState::move_center(int site) {
  while (center_ < site) {
    Tensor& a = tensors_[center_];
    const long Dl = a.dim(0), d = a.dim(1), Dr = a.dim(2);
    std::vector<cd> q, r;
    la::qr(a.data(), Dl * d, Dr, q, r);
    const long k = std::min(Dl * d, Dr);
    a = reshape(Tensor({Dl * d, k}, std::move(q)), {Dl, d, k});
    Tensor rmat({k, Dr}, std::move(r));
    tensors_[center_ + 1] = contract(rmat, tensors_[center_ + 1], {{1, 0}});
    center_++;
  }
  while (center_ > site) {
    Tensor& a = tensors_[center_];
    const long Dl = a.dim(0), d = a.dim(1), Dr = a.dim(2);
    std::vector<cd> l, q;
    la::lq(a.data(), Dl, d * Dr, l, q);
    const long k = std::min(Dl, d * Dr);
    a = reshape(Tensor({k, d * Dr}, std::move(q)), {k, d, Dr});
    Tensor lmat({Dl, k}, std::move(l));
    tensors_[center_ - 1] = contract(tensors_[center_ - 1], lmat, {{2, 0}});
    center_--;
  }
}

MpsState init_product_state(const ModelSpec& model, const ProductStateSpec& spec,
                            long max_bond, double cutoff) {
  const int M = model_sites(model);
  if ((int)spec.labels.size() != M)
    throw std::invalid_argument("product state pattern length must equal the site count");
  MpsState st;
  st.local_dim_ = model_local_dim(model);
  st.fermionic_ = model_fermionic(model);
  st.max_bond = max_bond;
  st.cutoff = cutoff;
  for (int i = 0; i < M; i++) {
    std::vector<cd> v = local_state(model, spec.labels[i]);
    st.tensors().push_back(Tensor({1, (long)v.size(), 1}, std::move(v)));
  }
  st.center_ = 0;
  return st;
}

double apply_two_site_gate(MpsState& state, const Tensor& gate, int n, int m,
                           bool leave_center_left) {
  const int d = state.local_dim();
  if (n < 0 || m <= n || m >= state.sites()) throw std::invalid_argument("bad gate sites");
  if (gate.rank() != 2 || gate.dim(0) != d * d || gate.dim(1) != d * d)
    throw std::invalid_argument("gate must be (d^2 x d^2)");
  if (m == n + 1) return apply_adjacent_gate(state, gate, n, leave_center_left);

  // route site m next to n with (fermionic) swaps, apply, unroute
  ModelSpec dummy;  // swap gate depends only on local structure
  Tensor sw;
  if (state.fermionic()) {
    HubbardSpec h;
    sw = swap_gate(ModelSpec(h));
  } else {
    IsingSpec s;
    sw = swap_gate(ModelSpec(s));
  }
  double dw = 0;
  for (int k = m - 1; k > n; k--) dw += apply_adjacent_gate(state, sw, k, true);
  dw += apply_adjacent_gate(state, gate, n, false);
  for (int k = n + 1; k < m; k++) dw += apply_adjacent_gate(state, sw, k, false);
  return dw;
}

void apply_single_site(MpsState& state, const Tensor& op, int site, bool renormalize) {
  state.move_center(site);
  Tensor& a = state.tensors()[site];
  Tensor updated = permute(contract(op, a, {{1, 1}}), {1, 0, 2});
  if (renormalize) {
    double nrm = frob_norm(updated);
    if (nrm == 0) throw std::runtime_error("single-site operator annihilated the state");
    for (cd& z : updated.storage()) z /= nrm;
  }
  a = std::move(updated);
}

double entanglement_entropy(MpsState& state, int bond) {
  if (bond < 0 || bond >= state.sites() - 1) throw std::invalid_argument("bad bond index");
  state.move_center(bond);
  const Tensor& a = state.tensors()[bond];
  const long Dl = a.dim(0), d = a.dim(1), Dr = a.dim(2);
  Tensor mat = reshape(Tensor(a.shape(), a.storage()), {Dl * d, Dr});
  SvdResult svd = svd_truncate(mat, std::min(Dl * d, Dr), 0.0);
  double w = 0;
  for (double s : svd.singular_values) w += s * s;
  double entropy = 0;
  for (double s : svd.singular_values) {
    const double p = s * s / w;
    if (p > 1e-300) entropy -= p * std::log(p);
  }
  return entropy;
}

cd overlap(const MpsState& a, const MpsState& b) {
  if (a.sites() != b.sites()) throw std::invalid_argument("overlap: size mismatch");
  Tensor env({1, 1});
  env.at({0, 0}) = 1;
  for (int i = 0; i < a.sites(); i++) {
    Tensor tmp = contract(env, b.tensors()[i], {{1, 0}});        // (la', d, rb)
    env = contract(conj(a.tensors()[i]), tmp, {{0, 0}, {1, 1}}); // (ra, rb)
  }
  return env.at({0, 0});
}

const Tensor& GateCache::gate(const ModelSpec& model, int n, int m, GatePart part, double dt,
                              double gamma) {
  long long bits;
  static_assert(sizeof(double) == sizeof(long long));
  std::memcpy(&bits, &dt, sizeof bits);
  auto key = std::make_tuple(n, m, (int)part, bits);
  auto it = cache_.find(key);
  if (it != cache_.end()) return it->second;

  Tensor h = gamma == 0 ? build_bond_hamiltonian(model, n, m, part)
                        : build_bond_hamiltonian_eff(model, n, m, gamma, part);
  const long dim = h.dim(0);
  std::vector<cd> g;
  if (gamma == 0) {
    g = la::expm_hermitian(h.data(), dim, cd(0, -dt));
  } else {
    for (cd& z : h.storage()) z *= cd(0, -dt);
    g = la::expm_general(h.data(), dim);
  }
  auto [pos, ok] = cache_.emplace(key, Tensor({dim, dim}, std::move(g)));
  return pos->second;
}

double apply_schedule_step(MpsState& state, const ModelSpec& model, const TrotterSchedule& sched,
                           double tau, GateCache& cache, double gamma) {
  const auto seq = sweep_gate_sequence(sched, model, tau);
  double dw = 0;
  for (size_t i = 0; i < seq.size(); i++) {
    const auto& g = seq[i];
    // leave the center pointing toward the next gate
    bool leave_left = false;
    if (i + 1 < seq.size()) leave_left = seq[i + 1].n < g.n;
    dw += apply_two_site_gate(state, cache.gate(model, g.n, g.m, g.part, g.dt, gamma), g.n, g.m,
                              leave_left);
  }
  return dw;
}

SeriesRecord evolve(MpsState& state, ModelSpec model, const TrotterSchedule& sched, double tau,
                    int n_steps, const EvolveOptions& opts) {
  if (tau <= 0) throw std::invalid_argument("tau must be positive");
  SeriesRecord rec;
  rec.observables = opts.observables;
  rec.values.resize(opts.observables.size());

  GateCache cache;
  auto record = [&](int step) {
    rec.times.push_back(step * tau);
    for (size_t o = 0; o < opts.observables.size(); o++)
      rec.values[o].push_back(evaluate_observable(state, model, opts.observables[o]));
    if (opts.record_entropy) rec.entropy.push_back(entanglement_entropy(state, centre_bond(state.sites())));
    rec.discarded.push_back(state.cumulative_discarded_weight);
  };

  record(0);
  for (int step = 1; step <= n_steps; step++) {
    if (opts.before_step && opts.before_step(step, model)) cache.clear();
    apply_schedule_step(state, model, sched, tau, cache, opts.gamma);
    if (opts.after_step) opts.after_step(step, state);
    if (step % std::max(1, opts.measure_stride) == 0 || step == n_steps) record(step);
  }
  if (state.cumulative_discarded_weight > opts.alarm_discarded) rec.truncation_alarm = true;
  return rec;
}

}  // namespace quench
