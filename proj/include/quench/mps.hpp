// Time-evolving block decimation on matrix-product states: two-site gates with
// SVD truncation, swap routing for long-range pairs, canonical-form bookkeeping
// and entanglement diagnostics.
#pragma once

#include <functional>
#include <map>
#include <vector>

#include "quench/model.hpp"
#include "quench/trotter.hpp"

namespace quench {

class MpsState {
 public:
  MpsState() = default;

  // Site tensors have shape (left bond, local dim, right bond); boundary bonds
  // are one-dimensional.  Canonical form holds on both sides of center().
  std::vector<Tensor>& tensors() { return tensors_; }
  const std::vector<Tensor>& tensors() const { return tensors_; }
  int sites() const { return (int)tensors_.size(); }
  int center() const { return center_; }
  int local_dim() const { return local_dim_; }
  bool fermionic() const { return fermionic_; }

  long max_bond = 256;
  double cutoff = 1e-12;
  double cumulative_discarded_weight = 0;
  // norm of the two-site block before the post-truncation renormalization of
  // the most recent gate; stays within 1e-8 of 1 for unitary gates
  double last_prenorm = 1;

  std::vector<long> bond_dims() const;
  double norm() const;  // full contraction, no canonical assumptions

  void move_center(int site);

  friend MpsState init_product_state(const ModelSpec&, const ProductStateSpec&, long, double);

  int center_ = 0;
  int local_dim_ = 0;
  bool fermionic_ = false;

 private:
  std::vector<Tensor> tensors_;
};

MpsState init_product_state(const ModelSpec& model, const ProductStateSpec& spec,
                            long max_bond = 256, double cutoff = 1e-12);

// Applies a two-site gate, given as a (d^2 x d^2) matrix over basis i_n*d+i_m.
// Adjacent pairs go through contract-apply-split with svd_truncate; m > n+1 is
// routed with swap gates (fermionic swaps for Hubbard) and unrouted afterwards.
// The state is renormalized after truncation.  Returns the discarded weight
// accumulated by the call (swaps included).
double apply_two_site_gate(MpsState& state, const Tensor& gate, int n, int m,
                           bool leave_center_left = false);

// Applies a single-site operator (d x d) at the given site; optionally
// renormalizes (used for quantum-jump application).
void apply_single_site(MpsState& state, const Tensor& op, int site, bool renormalize);

// von Neumann entropy of the Schmidt spectrum across bond b (between sites b
// and b+1); moves the orthogonality center to the bond.
double entanglement_entropy(MpsState& state, int bond);

cd overlap(const MpsState& a, const MpsState& b);

// <op_n> for every site, for a single-site operator (trajectory jump rates).
std::vector<double> site_expectations(const MpsState& state, const Tensor& op);

// Cache of exponentiated bond gates keyed by (n, m, part, dt).  Cleared when
// model parameters change between steps.
class GateCache {
 public:
  const Tensor& gate(const ModelSpec& model, int n, int m, GatePart part, double dt,
                     double gamma);
  void clear() { cache_.clear(); }

 private:
  std::map<std::tuple<int, int, int, long long>, Tensor> cache_;
};

// One full schedule application of length tau (all sweeps).  gamma != 0 folds
// the trajectory drift into the bond gates (non-unitary; state renormalized on
// every application).  Returns discarded weight added.
double apply_schedule_step(MpsState& state, const ModelSpec& model, const TrotterSchedule& sched,
                           double tau, GateCache& cache, double gamma = 0);

struct EvolveOptions {
  std::vector<ObservableSpec> observables;
  int measure_stride = 1;   // record every k-th step (t=0 and the end always)
  bool record_entropy = false;
  double alarm_discarded = 1e-3;
  double gamma = 0;
  // Called before each step (1-based); may rewrite model parameters (laser
  // noise); return true to invalidate cached gates.
  std::function<bool(int, ModelSpec&)> before_step;
  std::function<void(int, MpsState&)> after_step;
};

struct SeriesRecord {
  std::vector<double> times;
  std::vector<ObservableSpec> observables;
  // values[obs][time index][site]
  std::vector<std::vector<std::vector<cd>>> values;
  std::vector<double> entropy;    // centre bond, when record_entropy
  std::vector<double> discarded;  // cumulative discarded weight at each record
  bool truncation_alarm = false;

  const std::vector<cd>& at(int obs, int t) const { return values[obs][t]; }
};

SeriesRecord evolve(MpsState& state, ModelSpec model, const TrotterSchedule& sched, double tau,
                    int n_steps, const EvolveOptions& opts);

int centre_bond(int sites);

}  // namespace quench
