#include <cmath>
#include <stdexcept>

#include "quench/ed.hpp"
#include "quench/noise.hpp"

// Quantum-trajectory unraveling with jump operators L_n = sqrt(gamma)
// (n_up + n_dn).  Per substep dt: jump probabilities p_n = gamma dt <Lt_n^2>;
// with probability sum p_n one site is selected proportionally to p_n and
// Lt_n applied (renormalized); otherwise the state evolves under
// H_eff = H - (i/2) gamma sum_n Lt_n^2.  Substeps subdivide recursively until
// sum p_n <= max_jump_prob.

namespace quench {

namespace {

long ipow(long b, int e) {
  long r = 1;
  while (e-- > 0) r *= b;
  return r;
}

// per-trajectory series [traj][obs][time][site]; reduced in trajectory order so
// results do not depend on thread scheduling
using TrajSeries = std::vector<std::vector<std::vector<cd>>>;

TrajectoryAverage finalize(const std::vector<TrajSeries>& runs,
                           const std::vector<ObservableSpec>& observables,
                           const std::vector<double>& times, int M) {
  TrajectoryAverage out;
  out.times = times;
  out.observables = observables;
  out.n_traj = (int)runs.size();
  const size_t O = observables.size(), T = times.size();
  const int n_traj = out.n_traj;
  out.mean.assign(O, std::vector<std::vector<cd>>(T, std::vector<cd>(M, cd(0, 0))));
  out.se.assign(O, std::vector<std::vector<double>>(T, std::vector<double>(M, 0.0)));
  for (size_t o = 0; o < O; o++)
    for (size_t t = 0; t < T; t++)
      for (int s = 0; s < M; s++) {
        cd total(0, 0);
        double total2 = 0;
        for (const auto& r : runs) {
          total += r[o][t][s];
          total2 += std::norm(r[o][t][s]);
        }
        const cd mean = total / double(n_traj);
        out.mean[o][t][s] = mean;
        if (n_traj > 1) {
          const double var =
              std::max(0.0, (total2 - double(n_traj) * std::norm(mean)) / double(n_traj - 1));
          out.se[o][t][s] = std::sqrt(var / double(n_traj));
        }
      }
  return out;
}

}  // namespace

TrajectoryAverage trajectory_evolve(const ModelSpec& model, const ProductStateSpec& pattern,
                                    const std::vector<ObservableSpec>& observables,
                                    const EngineSettings& engine, double gamma, int n_traj,
                                    std::uint64_t seed, int threads, double max_jump_prob) {
  if (gamma < 0) throw std::invalid_argument("gamma must be >= 0");
  if (!is_hubbard(model)) throw std::invalid_argument("trajectory channel is Hubbard-only");
  const int M = model_sites(model);
  const TrotterSchedule sched = make_schedule(engine.style, engine.split_JU);
  validate_schedule_for_model(sched, model);
  const Tensor lt2 = ops::ltilde_sq();
  const Tensor lt = ops::n_total();

  std::vector<double> times{0.0};
  for (int k = engine.measure_stride; k < engine.steps; k += engine.measure_stride)
    times.push_back(k * engine.tau);
  if (engine.steps > 0) times.push_back(engine.steps * engine.tau);

  std::vector<TrajSeries> runs(n_traj);
  run_parallel(n_traj, threads, [&](int traj) {
    Rng rng(derive_seed(seed, 0x7247EC7, traj));  // stream independent of gamma
    MpsState psi = init_product_state(model, pattern, engine.max_bond, engine.cutoff);
    GateCache cache;
    TrajSeries& series = runs[traj];
    series.assign(observables.size(), {});

    auto record = [&]() {
      for (size_t o = 0; o < observables.size(); o++)
        series[o].push_back(evaluate_observable(psi, model, observables[o]));
    };
    record();

    std::function<void(double)> advance = [&](double dt) {
      std::vector<double> lt2exp = site_expectations(psi, lt2);
      double total = 0;
      std::vector<double> p(M);
      for (int s = 0; s < M; s++) {
        p[s] = std::max(0.0, gamma * dt * lt2exp[s]);
        total += p[s];
      }
      if (total > max_jump_prob) {
        advance(dt / 2);
        advance(dt / 2);
        return;
      }
      const double u = rng.uniform();
      if (u < total) {
        double edge = 0;
        int site = M - 1;
        const double pick = rng.uniform() * total;
        for (int s = 0; s < M; s++) {
          edge += p[s];
          if (pick <= edge) {
            site = s;
            break;
          }
        }
        apply_single_site(psi, lt, site, true);
      } else {
        apply_schedule_step(psi, model, sched, dt, cache, gamma);
      }
    };

    for (int step = 1; step <= engine.steps; step++) {
      advance(engine.tau);
      if (step % std::max(1, engine.measure_stride) == 0 || step == engine.steps) record();
    }
  });

  return finalize(runs, observables, times, M);
}

TrajectoryAverage trajectory_evolve_dense(const ModelSpec& model,
                                          const ProductStateSpec& pattern,
                                          const std::vector<ObservableSpec>& observables,
                                          double dt, double t_total, int measure_stride,
                                          double gamma, int n_traj, std::uint64_t seed,
                                          int threads, double max_jump_prob) {
  if (gamma < 0) throw std::invalid_argument("gamma must be >= 0");
  if (!is_hubbard(model)) throw std::invalid_argument("trajectory channel is Hubbard-only");
  check_ed_size(model);
  const int M = model_sites(model);
  const int d = model_local_dim(model);
  const int n_steps = (int)std::llround(t_total / dt);
  if (std::abs(n_steps * dt - t_total) > 1e-9)
    throw std::invalid_argument("t_total must be a multiple of dt");

  KrylovPropagator prop(model);

  // per-site Lt values by digit, and the total drift diagonal
  const long dim = ipow(d, M);
  std::vector<double> site_l2(dim, 0.0);
  auto digit = [&](long i, int site) { return int(i / ipow(d, M - 1 - site)) % d; };
  auto lval = [&](int dig) { return double((dig >> 1) + (dig & 1)); };
  for (long i = 0; i < dim; i++) {
    double s = 0;
    for (int n = 0; n < M; n++) {
      const double l = lval(digit(i, n));
      s += l * l;
    }
    site_l2[i] = s;
  }

  std::vector<double> times{0.0};
  for (int k = measure_stride; k < n_steps; k += measure_stride) times.push_back(k * dt);
  if (n_steps > 0) times.push_back(n_steps * dt);

  std::vector<TrajSeries> runs(n_traj);
  run_parallel(n_traj, threads, [&](int traj) {
    Rng rng(derive_seed(seed, 0x7247EC7, traj));  // same streams as the MPS backend
    DenseState psi = dense_product_state(model, pattern);
    TrajSeries& series = runs[traj];
    series.assign(observables.size(), {});

    auto record = [&]() {
      for (size_t o = 0; o < observables.size(); o++)
        series[o].push_back(dense_observable(model, psi, observables[o]));
    };
    record();

    std::vector<double> p(M);
    std::function<void(double)> advance = [&](double step_dt) {
      // p_n = gamma dt <Lt_n^2>
      std::fill(p.begin(), p.end(), 0.0);
      for (long i = 0; i < dim; i++) {
        const double w = std::norm(psi.amp[i]);
        if (w == 0) continue;
        for (int n = 0; n < M; n++) {
          const double l = lval(digit(i, n));
          p[n] += w * l * l;
        }
      }
      double total = 0;
      for (int n = 0; n < M; n++) {
        p[n] *= gamma * step_dt;
        total += p[n];
      }
      if (total > max_jump_prob) {
        advance(step_dt / 2);
        advance(step_dt / 2);
        return;
      }
      const double u = rng.uniform();
      if (u < total) {
        double edge = 0;
        int site = M - 1;
        const double pick = rng.uniform() * total;
        for (int n = 0; n < M; n++) {
          edge += p[n];
          if (pick <= edge) {
            site = n;
            break;
          }
        }
        for (long i = 0; i < dim; i++) psi.amp[i] *= lval(digit(i, site));
        psi.normalize();
      } else {
        // Strang: exp(-gamma W dt/4) exp(-iH dt) exp(-gamma W dt/4), W = sum Lt^2
        if (gamma > 0)
          for (long i = 0; i < dim; i++)
            psi.amp[i] *= std::exp(-0.25 * gamma * step_dt * site_l2[i]);
        prop.step(psi, step_dt);
        if (gamma > 0)
          for (long i = 0; i < dim; i++)
            psi.amp[i] *= std::exp(-0.25 * gamma * step_dt * site_l2[i]);
        psi.normalize();
      }
    };

    for (int step = 1; step <= n_steps; step++) {
      advance(dt);
      if (step % std::max(1, measure_stride) == 0 || step == n_steps) record();
    }
  });

  return finalize(runs, observables, times, M);
}

}  // namespace quench
