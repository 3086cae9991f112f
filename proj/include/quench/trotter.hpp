// Product-formula schedules: 2nd/4th-order directed sweeps and odd-even
// (Suzuki) decompositions, expanded into ordered two-site gate sequences.
#pragma once

#include <string>
#include <vector>

#include "quench/model.hpp"

namespace quench {

enum class SweepStyle { sweep2, sweepA4, sweepB4, sweepC4, oddeven2, oddeven4 };

enum class SweepDirection { LR, RL, Odd, Even };

struct Sweep {
  SweepDirection direction;
  double scale;  // bond time step is scale * tau / normalizer
};

struct TrotterSchedule {
  SweepStyle style;
  std::vector<Sweep> sweeps;
  bool split_JU = false;
  double normalizer = 1.0;  // sum of scales for sweep styles; 1 for odd-even
};

SweepStyle sweep_style_from_string(const std::string& s);
std::string sweep_style_to_string(SweepStyle s);

// The exact scale sequences compared in the error study.  split_JU further
// factors each Hubbard bond gate into tunnelling and interaction pieces:
// kinetic-then-interaction on LR sweeps, the adjoint order on RL sweeps (which
// keeps palindromic schedules exactly time symmetric), and a per-gate Strang
// split (K/2, V, K/2) inside odd-even layers.
TrotterSchedule make_schedule(SweepStyle style, bool split_JU = false);

struct GateStep {
  int n, m;        // site pair, n < m
  double dt;       // evolution time for this factor
  GatePart part;   // whole / kinetic / interaction
};

// Ordered gate list realizing one time step of length tau.  LR visits the
// model's interaction pairs in lexicographic order, RL in reverse; odd/even
// layers require a nearest-neighbour-only model.  The per-pair times summed
// over the whole step equal tau for every pair.
std::vector<GateStep> sweep_gate_sequence(const TrotterSchedule& sched, const ModelSpec& model,
                                          double tau);

// Guard for the odd-even extension question: odd-even styles are accepted for
// the Hubbard model; for the NN Ising model only when allow_oddeven_ising is
// set, and never for the long-range model.
void validate_schedule_for_model(const TrotterSchedule& sched, const ModelSpec& model,
                                 bool allow_oddeven_ising = false);

}  // namespace quench
