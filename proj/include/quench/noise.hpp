// Analogue-error channels and error metrics: static calibration offsets,
// laser-intensity noise through the lattice-calibration map, decoherence via
// quantum trajectories, state-preparation defects, perturbing Hamiltonian
// terms, realization averaging, and critical-time-step extraction.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "quench/lattice.hpp"
#include "quench/model.hpp"
#include "quench/mps.hpp"
#include "quench/util.hpp"

namespace quench {

struct NoiseSpec {
  double calibration_width = 0;               // std dev as a fraction of each mean
  std::string calibration_scope = "global";   // "global" | "per_site"
  double laser_width = 0;                     // std dev of the depth, fraction of E_R
  double decoherence_rate = 0;                // gamma in units of J
  std::optional<int> prep_defect_site;
  bool prep_defect_average = false;
  int n_realizations = 100;
  std::uint64_t seed = 0;
};

// Gaussian offsets of the model parameters (U and J for Hubbard, J0 and B for
// Ising).  Global scope draws one value per parameter; per-site scope draws
// per bond / per site.  Draws with |value| outside (0, 2 mean) are redrawn and
// counted.
ModelSpec sample_calibration(const ModelSpec& target, double delta, bool per_site, Rng& rng,
                             long* redraw_count = nullptr);

// Eq.-4 style RMS error over sites between two per-site expectation vectors.
double error_rms(const std::vector<cd>& sim, const std::vector<cd>& exact);

// 1 - |<sim|ex>|^2
double fidelity_error(cd overlap_value);

struct LaserNoiseSeries {
  std::vector<double> J, U;  // per engine step, units of J(V0)
  long redraws = 0;
  double sigma_J_over_J = 0;  // sample statistics of the generated series
  double sigma_U_over_U = 0;
  int correlation_sign = 0;
};

// Per-step (J, U) overrides: V_t = V0 + N(0, delta_l) in recoil units mapped
// through the Wannier table.  Draws with V <= 0 are redrawn and counted.
LaserNoiseSeries laser_noise_series(const WannierTable& table, double delta_l, double V0,
                                    int n_steps, Rng& rng);

struct CriticalTauFit {
  bool ok = false;
  std::string message;
  double tau_star = 0;
  double order = 0;    // fitted power p
  double log_c = 0;    // fitted log prefactor
  double max_residual = 0;
};

// Least-squares fit of log eps = log c + p log tau; tau* = (budget/c)^{1/p}.
// Requires >= 3 samples spanning at least a factor 4 in tau and a monotone
// eps(tau); otherwise the fit is rejected with a diagnostic.
CriticalTauFit fit_critical_tau(const std::vector<double>& taus,
                                const std::vector<double>& eps, double budget);

// ---------------------------------------------------------------------------
// Campaign drivers (shared by the CLI and the acceptance suite)

enum class Backend {
  automatic,  // dense state-vector propagation when it fits, MPS otherwise
  mps,
  dense,
};

struct EngineSettings {
  SweepStyle style = SweepStyle::oddeven2;
  bool split_JU = false;
  double tau = 0.1;
  int steps = 30;
  long max_bond = 64;
  double cutoff = 1e-12;
  int measure_stride = 1;
  Backend backend = Backend::automatic;
};

struct ChannelResult {
  std::vector<double> times;
  std::vector<ObservableSpec> observables;
  // realization-averaged expectations and the reference run  [obs][time][site]
  std::vector<std::vector<std::vector<cd>>> mean;
  std::vector<std::vector<std::vector<cd>>> reference;
  // Eq.-4 error of the averaged observables      [obs][time]
  std::vector<std::vector<double>> epsilon;
  // site-RMS realization scatter of the mean     [obs][time]
  std::vector<std::vector<double>> scatter;
  std::vector<double> epsilon_fidelity;  // mean 1-|<sim|ref>|^2 per time (when tracked)
  long redraws = 0;
  int n_realizations = 1;
  std::string channel;
  bool truncation_alarm = false;
};

// Static calibration-offset ensemble against the mean-parameter reference run
// executed with identical engine settings.
ChannelResult calibration_campaign(const ModelSpec& target, const ProductStateSpec& pattern,
                                   const std::vector<ObservableSpec>& observables,
                                   const EngineSettings& engine, double delta, bool per_site,
                                   int n_realizations, std::uint64_t seed, int threads,
                                   bool track_fidelity = false);

// Laser-noise ensemble (time-dependent J(t), U(t) refreshed each engine step).
ChannelResult laser_campaign(const ModelSpec& target, const ProductStateSpec& pattern,
                             const std::vector<ObservableSpec>& observables,
                             const EngineSettings& engine, const WannierTable& table,
                             double delta_l, double V0, int n_realizations,
                             std::uint64_t seed, int threads);

// State-preparation defect: remove one fermion at t=0 (site or all-site
// average), compare against the defect-free run.
ChannelResult prep_defect_campaign(const ModelSpec& target, const ProductStateSpec& pattern,
                                   const std::vector<ObservableSpec>& observables,
                                   const EngineSettings& engine,
                                   std::optional<int> defect_site, int threads);

// Perturbing Hamiltonian terms (next-nearest tunnelling / nearest-neighbour
// interaction) at a relative strength eta, against the unperturbed run.
ChannelResult extra_terms_campaign(const ModelSpec& target, const ProductStateSpec& pattern,
                                   const std::vector<ObservableSpec>& observables,
                                   const EngineSettings& engine, const std::string& which,
                                   double eta, int threads);

// ---------------------------------------------------------------------------
// Quantum trajectories (trajectories.cpp)

struct TrajectoryAverage {
  std::vector<double> times;
  std::vector<ObservableSpec> observables;
  std::vector<std::vector<std::vector<cd>>> mean;     // [obs][time][site]
  std::vector<std::vector<std::vector<double>>> se;   // standard error, same shape
  int n_traj = 0;
};

// Stochastic unraveling of the Lindblad equation with L_n = sqrt(gamma)
// (n_up+n_dn): first-order jump sampling with sum_n p_n <= max_jump_prob per
// substep (automatic subdivision), no-jump evolution under H_eff with the
// drift folded into the bond gates.  MPS backend.
TrajectoryAverage trajectory_evolve(const ModelSpec& model, const ProductStateSpec& pattern,
                                    const std::vector<ObservableSpec>& observables,
                                    const EngineSettings& engine, double gamma, int n_traj,
                                    std::uint64_t seed, int threads,
                                    double max_jump_prob = 0.1);

// Dense state-vector backend with the same jump protocol (Strang split of the
// Hermitian part and the diagonal drift); used where the MPS route is too
// slow.  Validated against the MPS backend and the Lindblad oracle at M = 2.
TrajectoryAverage trajectory_evolve_dense(const ModelSpec& model,
                                          const ProductStateSpec& pattern,
                                          const std::vector<ObservableSpec>& observables,
                                          double dt, double t_total, int measure_stride,
                                          double gamma, int n_traj, std::uint64_t seed,
                                          int threads, double max_jump_prob = 0.1);

}  // namespace quench
