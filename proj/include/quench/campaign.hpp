// Reproducible experiment campaigns: JSON config parsing with strict key
// validation, orchestration of the engine/noise/lattice/circuit modules, and
// CSV/JSON/plot-script artifact emission.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "quench/model.hpp"
#include "quench/noise.hpp"
#include "quench/trotter.hpp"

namespace quench {

struct ResourceRequest {
  std::string model_kind = "hubbard";
  int M = 100;
  double tau_star = 2.7;
  double t = 10.0;
  double u_over_j = 1.0;
  int sweeps_per_step = 18;
  bool integer_steps = false;
};

struct LatticeRequest {
  double V0 = 10.0;
  double v_min = 4.0;
  double v_max = 20.0;
  int nodes = 161;
  double delta_l = 0.001;
};

struct CampaignConfig {
  std::string experiment;  // simulate | trotter_scan | calibration | laser_noise |
                           // decoherence | prep_defect | extra_terms | truncation_study |
                           // critical_tau | resources | qubitization | calibrate_lattice
  std::uint64_t seed = 1;
  int threads = 0;  // 0 -> default_threads()
  std::string out_dir = "out";

  ModelSpec model;
  ProductStateSpec initial_state;
  std::vector<ObservableSpec> observables;
  EngineSettings engine;
  NoiseSpec noise;

  std::vector<double> tau_grid;
  std::string budget_observable = "offdiag_hubbard";
  double t_fixed = 3.0;
  std::vector<double> gamma_grid;
  int n_trajectories = 400;
  std::vector<long> bond_dims;
  std::string extra_term_which = "Jnn";
  double extra_term_eta = 0.01;
  ResourceRequest resources;
  LatticeRequest lattice;

  std::string canonical_json() const;       // round-trippable serialization
  static CampaignConfig parse(const std::string& json_text);  // strict
};

// Runs the campaign, writing artifacts under config.out_dir.
// Returns 0 on success, 2 on runtime failure (validation errors throw
// std::invalid_argument before any computation starts).
int run_campaign(const CampaignConfig& config);

// Self-check battery behind the `verify` subcommand: fast oracle suites with
// one PASS/FAIL line each; returns the number of failures.
int run_verify(bool verbose);

}  // namespace quench
