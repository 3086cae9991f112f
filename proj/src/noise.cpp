#include "quench/noise.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "quench/ed.hpp"

namespace quench {

namespace {

double redraw_gaussian(double mean, double delta, Rng& rng, long* redraws) {
  if (delta == 0 || mean == 0) return mean;
  const double sigma = std::abs(delta * mean);
  for (;;) {
    const double v = mean + sigma * rng.normal();
    // reject sign flips: |draw| must stay inside (0, 2|mean|)
    if (v > 0 == mean > 0 && std::abs(v) < 2 * std::abs(mean) && v != 0) return v;
    if (redraws) (*redraws)++;
  }
}

}  // namespace

ModelSpec sample_calibration(const ModelSpec& target, double delta, bool per_site, Rng& rng,
                             long* redraw_count) {
  if (delta < 0) throw std::invalid_argument("calibration width must be >= 0");
  ModelSpec out = target;
  if (delta == 0) return out;
  if (is_hubbard(out)) {
    auto& h = std::get<HubbardSpec>(out);
    if (!per_site) {
      h.J = redraw_gaussian(h.J, delta, rng, redraw_count);
      h.U = redraw_gaussian(h.U, delta, rng, redraw_count);
    } else {
      h.J_bond.resize(h.sites - 1);
      h.U_site.resize(h.sites);
      for (int b = 0; b < h.sites - 1; b++)
        h.J_bond[b] = redraw_gaussian(h.J, delta, rng, redraw_count);
      for (int s = 0; s < h.sites; s++)
        h.U_site[s] = redraw_gaussian(h.U, delta, rng, redraw_count);
    }
    return out;
  }
  auto& s = std::get<IsingSpec>(out);
  if (!per_site) {
    s.J0 = redraw_gaussian(s.J0, delta, rng, redraw_count);
    s.B = redraw_gaussian(s.B, delta, rng, redraw_count);
  } else {
    const int M = s.sites;
    s.J0_pair.assign((size_t)M * (M - 1) / 2, 0.0);
    s.B_site.resize(M);
    for (auto& v : s.J0_pair) v = redraw_gaussian(s.J0, delta, rng, redraw_count);
    for (auto& v : s.B_site) v = redraw_gaussian(s.B, delta, rng, redraw_count);
  }
  return out;
}

double error_rms(const std::vector<cd>& sim, const std::vector<cd>& exact) {
  if (sim.size() != exact.size()) throw std::invalid_argument("error_rms: size mismatch");
  double acc = 0;
  for (size_t i = 0; i < sim.size(); i++) acc += std::norm(sim[i] - exact[i]);
  return std::sqrt(acc / double(sim.size()));
}

double fidelity_error(cd overlap_value) { return 1.0 - std::norm(overlap_value); }

LaserNoiseSeries laser_noise_series(const WannierTable& table, double delta_l, double V0,
                                    int n_steps, Rng& rng) {
  if (delta_l < 0) throw std::invalid_argument("laser width must be >= 0");
  LaserNoiseSeries out;
  const double J0 = table.J(V0);
  const double vmin = table.depths.front(), vmax = table.depths.back();
  for (int s = 0; s < n_steps; s++) {
    double V;
    for (;;) {
      V = V0 + delta_l * rng.normal();  // sigma is a fraction of E_R = 1
      if (V > 0) break;
      out.redraws++;
    }
    V = std::clamp(V, vmin, vmax);  // table coverage is +-10 sigma at 1%
    out.J.push_back(table.J(V) / J0);
    out.U.push_back(table.U(V) / J0);
  }
  // sample statistics and the anti-correlation sign
  auto stats = [](const std::vector<double>& v) {
    double m = 0, s2 = 0;
    for (double x : v) m += x;
    m /= v.size();
    for (double x : v) s2 += (x - m) * (x - m);
    return std::pair<double, double>(m, std::sqrt(s2 / std::max<size_t>(1, v.size() - 1)));
  };
  if (n_steps > 1) {
    auto [mj, sj] = stats(out.J);
    auto [mu, su] = stats(out.U);
    out.sigma_J_over_J = sj / mj;
    out.sigma_U_over_U = su / mu;
    double cov = 0;
    for (int s = 0; s < n_steps; s++) cov += (out.J[s] - mj) * (out.U[s] - mu);
    out.correlation_sign = cov < 0 ? -1 : (cov > 0 ? 1 : 0);
  }
  return out;
}

CriticalTauFit fit_critical_tau(const std::vector<double>& taus, const std::vector<double>& eps,
                                double budget) {
  CriticalTauFit fit;
  if (taus.size() != eps.size() || taus.size() < 3) {
    fit.message = "need at least 3 (tau, eps) samples";
    return fit;
  }
  std::vector<std::pair<double, double>> pts;
  for (size_t i = 0; i < taus.size(); i++) pts.push_back({taus[i], eps[i]});
  std::sort(pts.begin(), pts.end());
  if (pts.back().first / pts.front().first < 3.999) {
    fit.message = "tau samples must span at least a factor 4";
    return fit;
  }
  for (size_t i = 1; i < pts.size(); i++) {
    if (pts[i].second <= pts[i - 1].second) {
      fit.message = "eps(tau) is not monotone increasing; fit rejected";
      return fit;
    }
    if (pts[i].second <= 0 || pts[i - 1].second <= 0) {
      fit.message = "eps must be positive";
      return fit;
    }
  }
  const size_t n = pts.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (auto& [t, e] : pts) {
    const double x = std::log(t), y = std::log(e);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double p = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double logc = (sy - p * sx) / n;
  fit.order = p;
  fit.log_c = logc;
  for (auto& [t, e] : pts)
    fit.max_residual = std::max(fit.max_residual,
                                std::abs(std::log(e) - (logc + p * std::log(t))));
  if (budget <= 0 || p <= 0) {
    fit.message = "budget and fitted order must be positive";
    return fit;
  }
  fit.tau_star = std::exp((std::log(budget) - logc) / p);
  fit.ok = true;
  return fit;
}

// ---------------------------------------------------------------------------

namespace {

bool dense_feasible(const ModelSpec& m) {
  const int M = model_sites(m);
  return is_hubbard(m) ? M <= 8 : M <= 14;
}

std::vector<int> record_steps(int steps, int stride) {
  std::vector<int> out{0};
  for (int k = stride; k < steps; k += stride) out.push_back(k);
  if (steps > 0) out.push_back(steps);
  return out;
}

struct RunSeries {
  std::vector<std::vector<std::vector<cd>>> values;  // [obs][time][site]
  std::vector<cd> overlaps;                          // vs reference, per time
  bool alarm = false;
};

// One full run (dense or MPS backend) of `model` recorded on the common grid.
RunSeries run_one(const ModelSpec& model, const ProductStateSpec& pattern,
                  const std::vector<ObservableSpec>& observables, const EngineSettings& eng,
                  bool dense, const std::vector<DenseState>* dense_ref_states,
                  const std::vector<MpsState>* mps_ref_states,
                  std::function<bool(int, ModelSpec&)> before_step = {}) {
  RunSeries rs;
  rs.values.resize(observables.size());
  const auto recs = record_steps(eng.steps, eng.measure_stride);

  if (dense) {
    if (before_step)
      throw std::invalid_argument("per-step parameter overrides need the MPS backend");
    DenseState psi = dense_product_state(model, pattern);
    KrylovPropagator prop(model);
    size_t ri = 0;
    for (int k = 0; k <= eng.steps; k++) {
      if (ri < recs.size() && recs[ri] == k) {
        for (size_t o = 0; o < observables.size(); o++)
          rs.values[o].push_back(dense_observable(model, psi, observables[o]));
        if (dense_ref_states) {
          cd ov = 0;
          const DenseState& ref = (*dense_ref_states)[ri];
          for (long i = 0; i < psi.dim(); i++) ov += std::conj(ref.amp[i]) * psi.amp[i];
          rs.overlaps.push_back(ov);
        }
        ri++;
      }
      if (k < eng.steps) prop.step(psi, eng.tau);
    }
    return rs;
  }

  MpsState psi = init_product_state(model, pattern, eng.max_bond, eng.cutoff);
  TrotterSchedule sched = make_schedule(eng.style, eng.split_JU);
  validate_schedule_for_model(sched, model);
  EvolveOptions opts;
  opts.observables = observables;
  opts.measure_stride = eng.measure_stride;
  opts.before_step = std::move(before_step);
  size_t ri = 1;  // t = 0 handled below
  if (mps_ref_states) rs.overlaps.push_back(overlap((*mps_ref_states)[0], psi));
  opts.after_step = [&](int step, MpsState& st) {
    if (!mps_ref_states) return;
    if (step % std::max(1, eng.measure_stride) == 0 || step == eng.steps) {
      if (ri < mps_ref_states->size()) {
        rs.overlaps.push_back(overlap((*mps_ref_states)[ri], st));
        ri++;
      }
    }
  };
  SeriesRecord rec = evolve(psi, model, sched, eng.tau, eng.steps, opts);
  rs.values = std::move(rec.values);
  rs.alarm = rec.truncation_alarm;
  return rs;
}

// Reference-run snapshots for fidelity tracking on the MPS backend.
std::vector<MpsState> mps_snapshots(const ModelSpec& model, const ProductStateSpec& pattern,
                                    const EngineSettings& eng) {
  std::vector<MpsState> snaps;
  MpsState psi = init_product_state(model, pattern, eng.max_bond, eng.cutoff);
  snaps.push_back(psi);
  TrotterSchedule sched = make_schedule(eng.style, eng.split_JU);
  GateCache cache;
  for (int k = 1; k <= eng.steps; k++) {
    apply_schedule_step(psi, model, sched, eng.tau, cache);
    if (k % std::max(1, eng.measure_stride) == 0 || k == eng.steps) snaps.push_back(psi);
  }
  return snaps;
}

std::vector<DenseState> dense_snapshots(const ModelSpec& model, const ProductStateSpec& pattern,
                                        const EngineSettings& eng) {
  std::vector<DenseState> snaps;
  DenseState psi = dense_product_state(model, pattern);
  KrylovPropagator prop(model);
  const auto recs = record_steps(eng.steps, eng.measure_stride);
  size_t ri = 0;
  for (int k = 0; k <= eng.steps; k++) {
    if (ri < recs.size() && recs[ri] == k) {
      snaps.push_back(psi);
      ri++;
    }
    if (k < eng.steps) prop.step(psi, eng.tau);
  }
  return snaps;
}

ChannelResult assemble(const std::vector<ObservableSpec>& observables,
                       const EngineSettings& eng, const ModelSpec& target,
                       const std::vector<RunSeries>& runs, const RunSeries& ref,
                       bool track_fidelity) {
  ChannelResult out;
  out.observables = observables;
  const auto recs = record_steps(eng.steps, eng.measure_stride);
  for (int k : recs) out.times.push_back(k * eng.tau);
  const int M = model_sites(target);
  const size_t R = runs.size(), T = recs.size(), O = observables.size();
  out.n_realizations = (int)R;
  out.reference = ref.values;
  out.mean.assign(O, std::vector<std::vector<cd>>(T, std::vector<cd>(M, cd(0, 0))));
  out.epsilon.assign(O, std::vector<double>(T, 0.0));
  out.scatter.assign(O, std::vector<double>(T, 0.0));

  for (size_t o = 0; o < O; o++)
    for (size_t t = 0; t < T; t++) {
      std::vector<double> var(M, 0.0);
      for (size_t r = 0; r < R; r++)
        for (int s = 0; s < M; s++) out.mean[o][t][s] += runs[r].values[o][t][s];
      for (int s = 0; s < M; s++) out.mean[o][t][s] /= double(R);
      for (size_t r = 0; r < R; r++)
        for (int s = 0; s < M; s++) var[s] += std::norm(runs[r].values[o][t][s] - out.mean[o][t][s]);
      double se2 = 0;
      if (R > 1)
        for (int s = 0; s < M; s++) se2 += var[s] / double(R - 1) / double(R);
      out.scatter[o][t] = std::sqrt(se2 / M);
      out.epsilon[o][t] = error_rms(out.mean[o][t], ref.values[o][t]);
    }

  if (track_fidelity) {
    out.epsilon_fidelity.assign(T, 0.0);
    for (size_t t = 0; t < T; t++) {
      double acc = 0;
      for (size_t r = 0; r < R; r++) acc += fidelity_error(runs[r].overlaps[t]);
      out.epsilon_fidelity[t] = acc / double(R);
    }
  }
  for (const auto& r : runs) out.truncation_alarm |= r.alarm;
  return out;
}

}  // namespace

ChannelResult calibration_campaign(const ModelSpec& target, const ProductStateSpec& pattern,
                                   const std::vector<ObservableSpec>& observables,
                                   const EngineSettings& engine, double delta, bool per_site,
                                   int n_realizations, std::uint64_t seed, int threads,
                                   bool track_fidelity) {
  const bool dense = engine.backend == Backend::dense ||
                     (engine.backend == Backend::automatic && dense_feasible(target));

  // reference: mean parameters, identical engine settings
  std::vector<DenseState> dref;
  std::vector<MpsState> mref;
  if (track_fidelity) {
    if (dense)
      dref = dense_snapshots(target, pattern, engine);
    else
      mref = mps_snapshots(target, pattern, engine);
  }
  RunSeries ref = run_one(target, pattern, observables, engine, dense,
                          track_fidelity && dense ? &dref : nullptr,
                          track_fidelity && !dense ? &mref : nullptr);

  std::vector<RunSeries> runs(n_realizations);
  std::vector<long> redraws(n_realizations, 0);
  run_parallel(n_realizations, threads, [&](int r) {
    Rng rng(derive_seed(seed, 0xCA11B, r));
    ModelSpec sampled = sample_calibration(target, delta, per_site, rng, &redraws[r]);
    runs[r] = run_one(sampled, pattern, observables, engine, dense,
                      track_fidelity && dense ? &dref : nullptr,
                      track_fidelity && !dense ? &mref : nullptr);
  });

  ChannelResult out = assemble(observables, engine, target, runs, ref, track_fidelity);
  out.channel = "calibration";
  for (long c : redraws) out.redraws += c;
  return out;
}

ChannelResult laser_campaign(const ModelSpec& target, const ProductStateSpec& pattern,
                             const std::vector<ObservableSpec>& observables,
                             const EngineSettings& engine, const WannierTable& table,
                             double delta_l, double V0, int n_realizations,
                             std::uint64_t seed, int threads) {
  if (!is_hubbard(target))
    throw std::invalid_argument("laser-noise channel drives the Hubbard model");
  EngineSettings eng = engine;
  eng.backend = Backend::mps;  // per-step parameter overrides

  RunSeries ref = run_one(target, pattern, observables, eng, false, nullptr, nullptr);

  std::vector<RunSeries> runs(n_realizations);
  std::vector<long> redraws(n_realizations, 0);
  run_parallel(n_realizations, threads, [&](int r) {
    Rng rng(derive_seed(seed, 0x1A5E6, r));
    LaserNoiseSeries series = laser_noise_series(table, delta_l, V0, eng.steps, rng);
    redraws[r] = series.redraws;
    auto hook = [series](int step, ModelSpec& m) {
      auto& h = std::get<HubbardSpec>(m);
      h.J = series.J[step - 1];
      h.U = series.U[step - 1];
      return true;
    };
    runs[r] = run_one(target, pattern, observables, eng, false, nullptr, nullptr, hook);
  });

  ChannelResult out = assemble(observables, eng, target, runs, ref, false);
  out.channel = "laser_noise";
  for (long c : redraws) out.redraws += c;
  return out;
}

ChannelResult prep_defect_campaign(const ModelSpec& target, const ProductStateSpec& pattern,
                                   const std::vector<ObservableSpec>& observables,
                                   const EngineSettings& engine,
                                   std::optional<int> defect_site, int threads) {
  if (!is_hubbard(target)) throw std::invalid_argument("prep defects act on fermion patterns");
  const bool dense = engine.backend == Backend::dense ||
                     (engine.backend == Backend::automatic && dense_feasible(target));
  const int M = model_sites(target);

  auto defect_pattern = [&](int site) {
    ProductStateSpec p = pattern;
    std::string& l = p.labels[site];
    if (l == "up" || l == "down")
      l = "0";
    else if (l == "updown")
      l = "down";  // remove the up fermion
    else
      throw std::invalid_argument("cannot remove a fermion from an empty site");
    return p;
  };

  std::vector<int> sites;
  if (defect_site) {
    sites.push_back(*defect_site);
    (void)defect_pattern(*defect_site);  // validate early
  } else {
    for (int s = 0; s < M; s++)
      if (pattern.labels[s] != "0" && pattern.labels[s] != "empty") sites.push_back(s);
  }

  RunSeries ref = run_one(target, pattern, observables, engine, dense, nullptr, nullptr);
  std::vector<RunSeries> runs(sites.size());
  run_parallel((int)sites.size(), threads, [&](int i) {
    runs[i] = run_one(target, defect_pattern(sites[i]), observables, engine, dense, nullptr,
                      nullptr);
  });

  // average the per-defect epsilons (not the observables)
  ChannelResult out = assemble(observables, engine, target, runs, ref, false);
  for (size_t o = 0; o < observables.size(); o++)
    for (size_t t = 0; t < out.times.size(); t++) {
      double acc = 0;
      for (const auto& r : runs) acc += error_rms(r.values[o][t], ref.values[o][t]);
      out.epsilon[o][t] = acc / double(runs.size());
    }
  out.channel = "prep_defect";
  return out;
}

ChannelResult extra_terms_campaign(const ModelSpec& target, const ProductStateSpec& pattern,
                                   const std::vector<ObservableSpec>& observables,
                                   const EngineSettings& engine, const std::string& which,
                                   double eta, int threads) {
  if (!is_hubbard(target)) throw std::invalid_argument("extra terms are Hubbard corrections");
  const bool dense = engine.backend == Backend::dense ||
                     (engine.backend == Backend::automatic && dense_feasible(target));
  ModelSpec perturbed = target;
  auto& h = std::get<HubbardSpec>(perturbed);
  if (which == "Jnn")
    h.Jnn = eta * h.J;
  else if (which == "Vnn")
    h.Vnn = eta * h.J;
  else
    throw std::invalid_argument("extra term must be Jnn or Vnn");

  RunSeries ref = run_one(target, pattern, observables, engine, dense, nullptr, nullptr);
  std::vector<RunSeries> runs(1);
  runs[0] = run_one(perturbed, pattern, observables, engine, dense, nullptr, nullptr);
  (void)threads;
  ChannelResult out = assemble(observables, engine, target, runs, ref, false);
  out.channel = "extra_terms_" + which;
  return out;
}

}  // namespace quench
