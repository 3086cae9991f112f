#include <cmath>
#include <stdexcept>

#include "quench/linalg.hpp"
#include "quench/model.hpp"
#include "quench/mps.hpp"

// Observable evaluation on MPS via plain transfer-matrix environments; no
// canonical-form assumptions, state is not mutated.
//
// Environment convention: env[a, b] with a the bra-chain bond and b the
// ket-chain bond.
//
// Fermionic off-diagonal correlators carry the Jordan-Wigner string over both
// spin species of the intervening sites; the endpoints pick up intra-site mode
// factors (model.hpp conventions):
//   r < n:  O_n = c^dag_{r,up} c_{n,up} = (a^dag Z)_r  P_{r+1..n-1}  (a 1)_n
//   n < r:  O_n = c^dag_{r,up} c_{n,up} = (a Z)_n      P_{n+1..r-1}  (a^dag 1)_r
// with P the site parity (-1)^{n_up+n_dn}.

namespace quench {

namespace {

// env (a, b) -> transfer through site i (left to right), op acting on the ket
Tensor transfer_right(const Tensor& env, const Tensor& site, const Tensor* op) {
  Tensor tmp = contract(env, site, {{1, 0}});  // (a, d, rb)
  if (op) tmp = permute(contract(*op, tmp, {{1, 1}}), {1, 0, 2});
  return contract(conj(site), tmp, {{0, 0}, {1, 1}});  // (ra, rb)
}

// env (a, b) at cut k+1 -> environment at cut k (right to left)
Tensor transfer_left(const Tensor& env, const Tensor& site, const Tensor* op) {
  Tensor tmp = contract(site, env, {{2, 1}});  // (lb, d, a)
  if (op) tmp = permute(contract(*op, tmp, {{1, 1}}), {1, 0, 2});
  return contract(conj(site), tmp, {{1, 1}, {2, 2}});  // (la, lb)
}

cd close_env(const Tensor& left, const Tensor& right) {
  cd v = 0;
  for (long i = 0; i < left.size(); i++) v += left.data()[i] * right.data()[i];
  return v;
}

Tensor matmul2(const Tensor& a, const Tensor& b) { return contract(a, b, {{1, 0}}); }

}  // namespace

std::vector<double> site_expectations(const MpsState& state, const Tensor& op) {
  const int M = state.sites();
  const auto& A = state.tensors();
  std::vector<Tensor> L(M + 1), R(M + 1);
  L[0] = Tensor({1, 1});
  L[0].at({0, 0}) = 1;
  for (int k = 0; k < M; k++) L[k + 1] = transfer_right(L[k], A[k], nullptr);
  R[M] = Tensor({1, 1});
  R[M].at({0, 0}) = 1;
  for (int k = M - 1; k >= 0; k--) R[k] = transfer_left(R[k + 1], A[k], nullptr);
  const double nrm2 = std::abs(close_env(L[M], R[M]).real());
  std::vector<double> out(M, 0.0);
  for (int n = 0; n < M; n++) {
    Tensor e = transfer_right(L[n], A[n], &op);
    out[n] = (close_env(e, R[n + 1]) / nrm2).real();
  }
  return out;
}

std::vector<cd> evaluate_observable(const MpsState& state, const ModelSpec& m,
                                    const ObservableSpec& obs) {
  const int M = state.sites();
  if (M != model_sites(m)) throw std::invalid_argument("state/model size mismatch");
  if (!observable_compatible(m, obs.kind))
    throw std::invalid_argument("observable incompatible with the model: " +
                                observable_kind_to_string(obs.kind));
  if (obs.kind == ObservableKind::entropy_center)
    throw std::invalid_argument("entropy_center is recorded by evolve, not per site");

  const auto& A = state.tensors();
  const double nrm = state.norm();
  if (std::abs(nrm - 1.0) > 1e-8)
    throw std::invalid_argument("evaluate_observable requires a normalized state");

  std::vector<Tensor> L(M + 1), R(M + 1);
  L[0] = Tensor({1, 1});
  L[0].at({0, 0}) = 1;
  for (int k = 0; k < M; k++) L[k + 1] = transfer_right(L[k], A[k], nullptr);
  R[M] = Tensor({1, 1});
  R[M].at({0, 0}) = 1;
  for (int k = M - 1; k >= 0; k--) R[k] = transfer_left(R[k + 1], A[k], nullptr);

  const int r = obs.ref(M);
  std::vector<cd> out(M, cd(0, 0));

  const bool hub = is_hubbard(m);
  const Tensor id2 = Tensor({2, 2}, {1, 0, 0, 1});

  if (obs.kind == ObservableKind::density || obs.kind == ObservableKind::sx) {
    Tensor op = hub ? ops::n_up() : ops::sx();
    for (int n = 0; n < M; n++) {
      Tensor e = transfer_right(L[n], A[n], &op);
      out[n] = close_env(e, R[n + 1]);
    }
    return out;
  }

  Tensor op_r_right, op_n_right;  // n > r
  Tensor op_r_left, op_n_left;    // n < r
  Tensor diag_op;                 // n == r
  bool string = false;
  switch (obs.kind) {
    case ObservableKind::offdiag_hubbard:
      op_r_right = ops::kron(ops::mode_adag(), ops::mode_z());
      op_n_right = ops::kron(ops::mode_a(), id2);
      op_n_left = ops::kron(ops::mode_a(), ops::mode_z());
      op_r_left = ops::kron(ops::mode_adag(), id2);
      diag_op = ops::n_up();
      string = true;
      break;
    case ObservableKind::density_density:
      op_r_right = op_n_right = op_r_left = op_n_left = ops::n_up();
      diag_op = ops::n_up();  // n_up^2 = n_up
      break;
    case ObservableKind::spsm:
      op_r_right = ops::sp();
      op_n_right = ops::sm();
      op_n_left = ops::sm();
      op_r_left = ops::sp();
      diag_op = matmul2(ops::sp(), ops::sm());
      break;
    case ObservableKind::szsz:
      op_r_right = op_n_right = op_r_left = op_n_left = ops::sz();
      diag_op = matmul2(ops::sz(), ops::sz());
      break;
    default:
      throw std::logic_error("unhandled observable kind");
  }
  const Tensor parity = hub ? ops::site_parity() : Tensor();
  const Tensor* string_op = (string && hub) ? &parity : nullptr;

  {
    Tensor e = transfer_right(L[r], A[r], &diag_op);
    out[r] = close_env(e, R[r + 1]);
  }
  // n > r: extend a left environment seeded with op_r at site r
  {
    Tensor e = transfer_right(L[r], A[r], &op_r_right);
    for (int n = r + 1; n < M; n++) {
      Tensor en = transfer_right(e, A[n], &op_n_right);
      out[n] = close_env(en, R[n + 1]);
      if (n + 1 < M) e = transfer_right(e, A[n], string_op);
    }
  }
  // n < r: extend a right environment seeded with op_r at site r
  {
    Tensor f = transfer_left(R[r + 1], A[r], &op_r_left);
    for (int n = r - 1; n >= 0; n--) {
      Tensor fn = transfer_left(f, A[n], &op_n_left);
      out[n] = close_env(L[n], fn);
      if (n > 0) f = transfer_left(f, A[n], string_op);
    }
  }
  return out;
}

}  // namespace quench
