#include <cmath>
#include <stdexcept>

#include "quench/ed.hpp"
#include "quench/linalg.hpp"

// Lindblad master equation with on-site dephasing-type jumps
// L_n = sqrt(gamma) (n_up + n_dn):
//   drho = -i[H,rho] + gamma sum_n (l_n rho l_n - 1/2 {l_n^2, rho})
// Because every l_n is diagonal the dissipator is elementwise:
//   (D rho)_{ij} = -gamma/2 sum_n (l_n(i) - l_n(j))^2 rho_{ij}.
// Integrated with the Dormand-Prince 5(4) embedded pair, adaptive step.

namespace quench {

namespace {

long ipow(long b, int e) {
  long r = 1;
  while (e-- > 0) r *= b;
  return r;
}

struct LindbladRhs {
  long dim;
  Tensor h;
  std::vector<double> damp;  // gamma/2 sum_n (l_n(i)-l_n(j))^2, row-major

  LindbladRhs(const ModelSpec& m, double gamma) {
    const int M = model_sites(m);
    const int d = model_local_dim(m);
    dim = ipow(d, M);
    h = dense_hamiltonian(m);
    damp.assign((size_t)dim * dim, 0.0);
    auto digit = [&](long i, int site) { return int(i / ipow(d, M - 1 - site)) % d; };
    auto ln = [&](long i, int site) {
      const int dig = digit(i, site);
      return double((dig >> 1) + (dig & 1));
    };
    for (long i = 0; i < dim; i++)
      for (long j = 0; j < dim; j++) {
        double s = 0;
        for (int n = 0; n < M; n++) {
          const double diff = ln(i, n) - ln(j, n);
          s += diff * diff;
        }
        damp[(size_t)i * dim + j] = 0.5 * gamma * s;
      }
  }

  void operator()(const std::vector<cd>& rho, std::vector<cd>& out) const {
    // out = -i (H rho - rho H) - damp .* rho
    std::vector<cd> hr((size_t)dim * dim), rh((size_t)dim * dim);
    la::matmul(h.data(), rho.data(), hr.data(), dim, dim, dim);
    la::matmul(rho.data(), h.data(), rh.data(), dim, dim, dim);
    out.resize((size_t)dim * dim);
    const cd mi(0, -1);
    for (size_t k = 0; k < out.size(); k++)
      out[k] = mi * (hr[k] - rh[k]) - damp[k] * rho[k];
  }
};

}  // namespace

Tensor lindblad_evolve(const ModelSpec& m, double gamma, const Tensor& rho0, double t,
                       double tol) {
  if (!is_hubbard(m)) throw std::invalid_argument("lindblad_evolve is Hubbard-only");
  if (model_sites(m) > 3) throw std::invalid_argument("lindblad_evolve capped at M = 3");
  if (gamma < 0) throw std::invalid_argument("gamma must be >= 0");
  LindbladRhs rhs(m, gamma);
  const long dim = rhs.dim;
  if (rho0.rank() != 2 || rho0.dim(0) != dim || rho0.dim(1) != dim)
    throw std::invalid_argument("rho0 dimension mismatch");

  // Dormand-Prince coefficients
  static const double a21 = 1.0 / 5;
  static const double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                      a54 = -212.0 / 729;
  static const double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                      a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                      b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static const double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                      e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  std::vector<cd> y(rho0.storage());
  std::vector<cd> k1, k2, k3, k4, k5, k6, k7, ytmp((size_t)dim * dim), y5((size_t)dim * dim);

  auto stage = [&](const std::vector<cd>& base, std::vector<cd>& out,
                   std::initializer_list<std::pair<const std::vector<cd>*, double>> terms,
                   double hstep) {
    out = base;
    for (auto& [kv, c] : terms)
      for (size_t i = 0; i < out.size(); i++) out[i] += hstep * c * (*kv)[i];
  };

  double time = 0;
  double hstep = std::min(0.01, t > 0 ? t : 0.01);
  const double hmin = 1e-10;
  while (time < t) {
    if (time + hstep > t) hstep = t - time;
    rhs(y, k1);
    stage(y, ytmp, {{&k1, a21}}, hstep);
    rhs(ytmp, k2);
    stage(y, ytmp, {{&k1, a31}, {&k2, a32}}, hstep);
    rhs(ytmp, k3);
    stage(y, ytmp, {{&k1, a41}, {&k2, a42}, {&k3, a43}}, hstep);
    rhs(ytmp, k4);
    stage(y, ytmp, {{&k1, a51}, {&k2, a52}, {&k3, a53}, {&k4, a54}}, hstep);
    rhs(ytmp, k5);
    stage(y, ytmp, {{&k1, a61}, {&k2, a62}, {&k3, a63}, {&k4, a64}, {&k5, a65}}, hstep);
    rhs(ytmp, k6);
    stage(y, y5, {{&k1, b1}, {&k3, b3}, {&k4, b4}, {&k5, b5}, {&k6, b6}}, hstep);
    rhs(y5, k7);

    double err = 0, scale = 0;
    for (size_t i = 0; i < y.size(); i++) {
      const cd e = hstep * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                            e7 * k7[i]);
      err += std::norm(e);
      scale += std::norm(y5[i]);
    }
    err = std::sqrt(err) / (tol * (1 + std::sqrt(scale)));
    if (err <= 1.0) {
      y.swap(y5);
      time += hstep;
    }
    const double fac = std::clamp(0.9 * std::pow(err > 0 ? err : 1e-16, -0.2), 0.2, 5.0);
    hstep = std::max(hmin, hstep * fac);
    if (hstep <= hmin && err > 1.0)
      throw std::runtime_error("lindblad_evolve: step size underflow");
  }

  Tensor rho({dim, dim}, std::move(y));
  // trace guard
  cd tr = 0;
  for (long i = 0; i < dim; i++) tr += rho.data()[i * dim + i];
  if (std::abs(tr.real() - 1.0) > 1e-9 || std::abs(tr.imag()) > 1e-9)
    throw std::runtime_error("lindblad_evolve: trace drift beyond tolerance");
  return rho;
}

}  // namespace quench
