// Brute-force reference: dense state-vector evolution (full eigendecomposition
// or Chebyshev/Lanczos stepping), dense Trotter gate application, observables,
// reduced-density-matrix entropy, and the Lindblad master-equation integrator.
//
// Basis ordering matches the MPS linearization: site 0 is the most significant
// base-d digit of the index (d = local dimension), Hubbard digit = 2 n_up +
// n_dn.  Fermionic operators use the mode order (0up, 0dn, 1up, 1dn, ...).
#pragma once

#include <map>
#include <memory>
#include <tuple>
#include <vector>

#include "quench/model.hpp"
#include "quench/trotter.hpp"

namespace quench {

struct DenseState {
  int sites = 0;
  int local_dim = 0;
  std::vector<cd> amp;

  long dim() const { return (long)amp.size(); }
  double norm() const;
  void normalize();
};

// Enforced oracle caps: Hubbard M <= 8, Ising M <= 14.
void check_ed_size(const ModelSpec& m);

DenseState dense_product_state(const ModelSpec& m, const ProductStateSpec& spec);

// out = H * in (matrix-free).
void hamiltonian_apply(const ModelSpec& m, const cd* in, cd* out);

// Dense Hamiltonian assembled column by column (small sizes / tests).
Tensor dense_hamiltonian(const ModelSpec& m);

// Cached full eigendecomposition; exact_evolve applies e^{-iHt} through it.
// The dense matrix route is memory-bound around dim ~ 8k on a 5 GB machine;
// use krylov_evolve for larger reference runs.
class EdOracle {
 public:
  explicit EdOracle(const ModelSpec& m);
  DenseState exact_evolve(const DenseState& psi0, double t) const;
  const std::vector<double>& eigenvalues() const { return evals_; }

 private:
  ModelSpec model_;
  long dim_;
  std::vector<double> evals_;
  std::vector<cd> evecs_;  // row i = eigenvector i
};

DenseState exact_evolve(const ModelSpec& m, const DenseState& psi0, double t);

// Chebyshev-expanded e^{-iHt} (matrix-free, deterministic); accuracy tol in the
// series tail.  Validated against exact_evolve in the test suite.
DenseState krylov_evolve(const ModelSpec& m, const DenseState& psi0, double t,
                         double tol = 1e-11);

// Reusable Chebyshev propagator: spectral bounds and sparse bond actions are
// built once, then step() advances a state by dt repeatedly.
class KrylovPropagator {
 public:
  explicit KrylovPropagator(ModelSpec m);
  ~KrylovPropagator();
  KrylovPropagator(KrylovPropagator&&) noexcept;
  void step(DenseState& psi, double dt, double tol = 1e-11) const;
  void apply_h(const cd* in, cd* out) const;
  const ModelSpec& model() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Lower/upper spectral bound estimate (Lanczos extreme Ritz values, padded).
std::pair<double, double> spectral_range(const ModelSpec& m);

// <O_n> for n = 0..M-1 on a dense state; mirrors evaluate_observable.
std::vector<cd> dense_observable(const ModelSpec& m, const DenseState& psi,
                                 const ObservableSpec& obs);

// von Neumann entropy of the reduced density matrix of sites [0, cut).
double reduced_entropy(const DenseState& psi, int cut);

// Two-site gate on a dense state.  The gate is given in the adjacent (routed)
// frame, exactly as consumed by the MPS engine; for fermionic models and
// m > n+1 the intervening Jordan-Wigner parity flips the sign of the
// odd-parity block, which for pure-tunnelling gates means applying the
// conjugate gate built from the sign-flipped bond Hamiltonian.
void apply_dense_two_site_gate(DenseState& psi, const Tensor& gate, int n, int m,
                               const ModelSpec& model);

// One full Trotter step of length tau on a dense state (exact gates, no
// truncation); cache holds exponentials keyed like the MPS gate cache.
class DenseGateCache {
 public:
  const Tensor& gate(const ModelSpec& model, int n, int m, GatePart part, double dt,
                     bool parity_flipped);
  void clear() { cache_.clear(); }

 private:
  std::map<std::tuple<int, int, int, long long, bool>, Tensor> cache_;
};

void dense_schedule_step(DenseState& psi, const ModelSpec& model, const TrotterSchedule& sched,
                         double tau, DenseGateCache& cache);

// Lindblad master equation for the Hubbard model with L_n = sqrt(gamma)
// (n_up + n_dn): integrates rho(t) with an adaptive embedded Runge-Kutta pair;
// trace preserved to 1e-9.  Enforced cap M <= 3.
Tensor lindblad_evolve(const ModelSpec& m, double gamma, const Tensor& rho0, double t,
                       double tol = 1e-10);

Tensor dense_density_matrix(const DenseState& psi);  // |psi><psi|

// tr(O_n rho) for the diagonal observable kinds (density, density_density).
std::vector<cd> lindblad_observable(const ModelSpec& m, const Tensor& rho,
                                    const ObservableSpec& obs);

}  // namespace quench
