// Whole-evolution resource totals (Tables-style accounting with fractional
// time steps), T-gate synthesis costs with identical-rotation grouping, the
// post-Trotter qubitization estimate and the NISQ fidelity model.
#pragma once

#include <string>

#include "quench/circuit.hpp"

namespace quench {

struct ResourceEstimate {
  std::string model_kind;  // "hubbard" | "ising_lr" | "ising_nn"
  int M = 0;
  double tau_star = 0;
  double t = 0;
  int sweeps_per_step = 18;
  double steps = 0;  // t / tau_star, used as a real number
  GateCounts per_sweep;

  double total_cnot = 0, total_rz = 0, total_clifford = 0;
  double total_cnot_depth = 0, total_rz_depth = 0, total_clifford_depth = 0;
  long qubits = 0;
  long ancillas = 0;

  // fault-tolerant synthesis
  double n_sigma_r = 0;        // total rotation count of the evolution
  double e_per_rotation = 0;   // 1% / n_sigma_r
  double t_gates = 0;

  // post-Trotter
  double qubitization_K = 0;
  double qubitization_alpha = 0;
  double qubitization_t_cost = 0;

  std::string to_json() const;
  std::string table_row_csv() const;  // two-significant-figure row plus exact values
};

// Round to two significant figures (the tables' reporting convention).
double round_2sig(double x);

// N_T for a group of N_R identical parallel rotations at per-rotation error E;
// single rotations use 1.15 log2(1/E) + 9.2.
double t_count_group(long n_r, double e);

// Sum of t_count_group over (layer, angle) rotation groups of one sweep.
double t_synthesis_count(const std::map<std::pair<long, std::uint64_t>, long>& groups,
                         double e);

// Totals for one model family; integer_steps = ceil(t/tau*) instead of the
// fractional default.
ResourceEstimate total_resources(const std::string& model_kind, int M, double tau_star,
                                 double t, int sweeps_per_step = 18, double u_over_j = 1.0,
                                 bool integer_steps = false);

// 2 alpha t * 4K with K = 11M, alpha = M(4J + 3U/4); Jt in units of 1/J.
double qubitization_estimate(int M, double Jt, double u_over_j);

double nisq_fidelity(double n_gates, double p);
double nisq_required_error(double n_gates, double target_fidelity);

}  // namespace quench
