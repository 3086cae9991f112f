#include "quench/trotter.hpp"

#include <cmath>
#include <stdexcept>

namespace quench {

SweepStyle sweep_style_from_string(const std::string& s) {
  if (s == "sweep2") return SweepStyle::sweep2;
  if (s == "sweepA4") return SweepStyle::sweepA4;
  if (s == "sweepB4") return SweepStyle::sweepB4;
  if (s == "sweepC4") return SweepStyle::sweepC4;
  if (s == "oddeven2") return SweepStyle::oddeven2;
  if (s == "oddeven4") return SweepStyle::oddeven4;
  throw std::invalid_argument("unknown schedule style: " + s);
}

std::string sweep_style_to_string(SweepStyle s) {
  switch (s) {
    case SweepStyle::sweep2: return "sweep2";
    case SweepStyle::sweepA4: return "sweepA4";
    case SweepStyle::sweepB4: return "sweepB4";
    case SweepStyle::sweepC4: return "sweepC4";
    case SweepStyle::oddeven2: return "oddeven2";
    case SweepStyle::oddeven4: return "oddeven4";
  }
  return "?";
}

namespace {

// (s) is a left-to-right sweep, (s)^T right-to-left.
Sweep lr(double s) { return {SweepDirection::LR, s}; }
Sweep rl(double s) { return {SweepDirection::RL, s}; }

void append_oddeven2_block(std::vector<Sweep>& v, double s) {
  v.push_back({SweepDirection::Odd, s / 2});
  v.push_back({SweepDirection::Even, s});
  v.push_back({SweepDirection::Odd, s / 2});
}

}  // namespace

TrotterSchedule make_schedule(SweepStyle style, bool split_JU) {
  TrotterSchedule sch;
  sch.style = style;
  sch.split_JU = split_JU;
  switch (style) {
    case SweepStyle::sweep2:
      sch.sweeps = {lr(1), rl(1)};
      break;
    case SweepStyle::sweepA4:
      sch.sweeps = {rl(1), lr(1), rl(1),  lr(-2), rl(1), rl(1),  rl(1), rl(1), lr(1),
                    rl(1), lr(1), lr(1),  lr(1),  lr(1), rl(-2), lr(1), rl(1), lr(1)};
      break;
    case SweepStyle::sweepB4:
      sch.sweeps = {rl(1), lr(2), rl(1), rl(-3), lr(2), lr(2),  lr(1),
                    rl(2), rl(2), lr(-3), rl(2), lr(1), lr(1), rl(1)};
      break;
    case SweepStyle::sweepC4:
      sch.sweeps = {rl(1), lr(2),  rl(3), rl(1), lr(-4), rl(3),
                    lr(3), rl(-4), lr(1), lr(3), rl(2),  lr(1)};
      break;
    case SweepStyle::oddeven2:
      append_oddeven2_block(sch.sweeps, 1.0);
      break;
    case SweepStyle::oddeven4: {
      // five 2nd-order blocks, tau1 = tau2 = tau/(4 - 4^{1/3}), tau3 = tau - 4 tau1
      const double r1 = 1.0 / (4.0 - std::cbrt(4.0));
      const double r3 = 1.0 - 4.0 * r1;
      for (double s : {r1, r1, r3, r1, r1}) append_oddeven2_block(sch.sweeps, s);
      break;
    }
  }
  if (style == SweepStyle::oddeven2 || style == SweepStyle::oddeven4) {
    sch.normalizer = 1.0;
  } else {
    double sum = 0;
    for (const auto& s : sch.sweeps) sum += s.scale;
    sch.normalizer = sum;  // 2 for sweep2, 12 for the 4th-order sweeps
  }
  return sch;
}

void validate_schedule_for_model(const TrotterSchedule& sched, const ModelSpec& model,
                                 bool allow_oddeven_ising) {
  const bool oddeven =
      sched.style == SweepStyle::oddeven2 || sched.style == SweepStyle::oddeven4;
  if (sched.split_JU && !is_hubbard(model))
    throw std::invalid_argument("split_JU applies to Hubbard runs only");
  if (!oddeven) return;
  if (is_hubbard(model)) {
    if (std::get<HubbardSpec>(model).Jnn != 0.0)
      throw std::invalid_argument("odd-even schedules require nearest-neighbour bonds only");
    return;
  }
  const auto& ising = std::get<IsingSpec>(model);
  if (!ising.nearest_neighbour())
    throw std::invalid_argument("odd-even schedules are not defined for long-range couplings");
  if (!allow_oddeven_ising)
    throw std::invalid_argument("odd-even schedules for the NN Ising model are disabled "
                                "(extension flag allow_oddeven_ising)");
}

std::vector<GateStep> sweep_gate_sequence(const TrotterSchedule& sched, const ModelSpec& model,
                                          double tau) {
  if (tau <= 0) throw std::invalid_argument("tau must be positive");
  const auto pairs = interaction_pairs(model);
  const bool split = sched.split_JU;
  std::vector<GateStep> seq;

  auto has_interaction = [&](const BondPair& p) {
    return p.m == p.n + 1;  // next-nearest bonds are pure tunnelling
  };

  auto emit = [&](const BondPair& p, double dt, bool reversed_within_gate) {
    if (!split || !is_hubbard(model)) {
      seq.push_back({p.n, p.m, dt, GatePart::whole});
      return;
    }
    if (!has_interaction(p)) {
      seq.push_back({p.n, p.m, dt, GatePart::whole});  // kinetic-only bond
      return;
    }
    if (!reversed_within_gate) {
      seq.push_back({p.n, p.m, dt, GatePart::kinetic});
      seq.push_back({p.n, p.m, dt, GatePart::interaction});
    } else {
      seq.push_back({p.n, p.m, dt, GatePart::interaction});
      seq.push_back({p.n, p.m, dt, GatePart::kinetic});
    }
  };

  auto emit_strang = [&](const BondPair& p, double dt) {
    if (!split || !is_hubbard(model) || !has_interaction(p)) {
      emit(p, dt, false);
      return;
    }
    seq.push_back({p.n, p.m, dt / 2, GatePart::kinetic});
    seq.push_back({p.n, p.m, dt, GatePart::interaction});
    seq.push_back({p.n, p.m, dt / 2, GatePart::kinetic});
  };

  for (const auto& sweep : sched.sweeps) {
    const double dt = sweep.scale * tau / sched.normalizer;
    switch (sweep.direction) {
      case SweepDirection::LR:
        for (const auto& p : pairs) emit(p, dt, false);
        break;
      case SweepDirection::RL:
        for (auto it = pairs.rbegin(); it != pairs.rend(); ++it) emit(*it, dt, true);
        break;
      case SweepDirection::Odd:
        for (const auto& p : pairs)
          if (p.n % 2 == 0) emit_strang(p, dt);
        break;
      case SweepDirection::Even:
        for (const auto& p : pairs)
          if (p.n % 2 == 1) emit_strang(p, dt);
        break;
    }
  }
  return seq;
}

}  // namespace quench
