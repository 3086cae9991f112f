#include "quench/lattice.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "quench/linalg.hpp"
#include "quench/util.hpp"

namespace quench {

namespace {

// lowest eigenvalue (optionally vector) of the plane-wave operator at fixed q:
// diagonal (q + 2n)^2 + V/2, off-diagonal -V/4, n = -N..N
double band_eig(double V, double q, int N, std::vector<double>* ground_coeffs) {
  const int dim = 2 * N + 1;
  std::vector<double> diag(dim), off(dim - 1, -V / 4.0);
  for (int i = 0; i < dim; i++) {
    const double n = i - N;
    diag[i] = (q + 2.0 * n) * (q + 2.0 * n) + V / 2.0;
  }
  if (!ground_coeffs) {
    la::eigh_tridiag(diag, off, nullptr);
    return diag[0];
  }
  std::vector<double> vecs;
  la::eigh_tridiag(diag, off, &vecs);
  ground_coeffs->assign(vecs.begin(), vecs.begin() + dim);
  return diag[0];
}

int converged_basis(double V, double q, int n_start) {
  int N = std::max(15, n_start);
  double e = band_eig(V, q, N, nullptr);
  for (int iter = 0; iter < 20; iter++) {
    const double e2 = band_eig(V, q, N + 5, nullptr);
    if (std::abs(e2 - e) <= 1e-10) return N;
    N += 5;
    e = e2;
  }
  throw std::runtime_error("plane-wave basis failed to converge");
}

}  // namespace

double lowest_band(double V, double q, int n_planewaves) {
  if (V < 0) throw std::invalid_argument("depth must be >= 0");
  const int N = converged_basis(V, q, n_planewaves);
  return band_eig(V, q, N, nullptr);
}

double hopping_J(double V) {
  if (V <= 0) throw std::invalid_argument("depth must be positive");
  return (lowest_band(V, 1.0) - lowest_band(V, 0.0)) / 4.0;
}

WannierFunction build_wannier(double V, int n_planewaves, int n_q) {
  const int N = converged_basis(V, 0.0, n_planewaves);
  const int dim = 2 * N + 1;

  // Bloch functions phi_q(x) = sum_n c_n(q) e^{i(q+2n)x}; with the sign fixed
  // so that sum_n c_n > 0 the Wannier sum is real and centered at x = 0.
  const double pi = std::acos(-1.0);
  const int periods = 16;              // grid spans +- periods/2 lattice sites
  const double xmax = periods * pi / 2.0;
  const int nx = 4096;
  const double hx = 2 * xmax / nx;

  WannierFunction wf;
  wf.x.resize(nx);
  wf.w.assign(nx, 0.0);
  for (int i = 0; i < nx; i++) wf.x[i] = -xmax + i * hx;

  // cos((q+2k)x) = cos(qx)cos(2kx) - sin(qx)sin(2kx); by inversion symmetry the
  // +-q pair's sine parts cancel, so only the cosine sum survives.
  std::vector<double> cos2kx((size_t)dim * nx), sin2kx((size_t)dim * nx);
  for (int n = 0; n < dim; n++) {
    const double k2 = 2.0 * (n - N);
    for (int i = 0; i < nx; i++) {
      cos2kx[(size_t)n * nx + i] = std::cos(k2 * wf.x[i]);
      sin2kx[(size_t)n * nx + i] = std::sin(k2 * wf.x[i]);
    }
  }
  std::vector<double> coeffs, accc(nx), accs(nx);
  for (int j = 0; j < n_q; j++) {
    const double q = -1.0 + 2.0 * (j + 0.5) / n_q;
    band_eig(V, q, N, &coeffs);
    double csum = 0;
    for (double c : coeffs) csum += c;
    const double sgn = csum >= 0 ? 1.0 : -1.0;
    std::fill(accc.begin(), accc.end(), 0.0);
    std::fill(accs.begin(), accs.end(), 0.0);
    for (int n = 0; n < dim; n++) {
      const double c = sgn * coeffs[n];
      if (c == 0) continue;
      const double* ct = cos2kx.data() + (size_t)n * nx;
      const double* st = sin2kx.data() + (size_t)n * nx;
      for (int i = 0; i < nx; i++) {
        accc[i] += c * ct[i];
        accs[i] += c * st[i];
      }
    }
    for (int i = 0; i < nx; i++) {
      const double x = wf.x[i];
      wf.w[i] += accc[i] * std::cos(q * x) - accs[i] * std::sin(q * x);
    }
  }
  // normalize on the grid (trapezoid; periodic decay makes ends negligible)
  double nrm2 = 0;
  for (double v : wf.w) nrm2 += v * v;
  nrm2 *= hx;
  const double inv = 1.0 / std::sqrt(nrm2);
  for (double& v : wf.w) v *= inv;

  double u4 = 0, outside = 0;
  for (int i = 0; i < nx; i++) {
    const double w2 = wf.w[i] * wf.w[i];
    u4 += w2 * w2;
    if (std::abs(wf.x[i]) > 2 * pi) outside += w2;
  }
  wf.u4_integral = u4 * hx;
  wf.outside_two_sites = outside * hx;
  if (wf.outside_two_sites > 0.01)
    throw std::runtime_error("Wannier function failed to localize; increase basis");
  return wf;
}

double onsite_U(double V, double g) { return g * build_wannier(V).u4_integral; }

double normalize_g(double V0) { return hopping_J(V0) / build_wannier(V0).u4_integral; }

namespace {

// natural cubic spline through (xs, ys); xs uniform ascending
struct Spline {
  std::vector<double> xs, ys, y2;

  void build(const std::vector<double>& x, const std::vector<double>& y) {
    xs = x;
    ys = y;
    const int n = (int)x.size();
    y2.assign(n, 0.0);
    std::vector<double> u(n, 0.0);
    for (int i = 1; i < n - 1; i++) {
      const double sig = (x[i] - x[i - 1]) / (x[i + 1] - x[i - 1]);
      const double p = sig * y2[i - 1] + 2.0;
      y2[i] = (sig - 1.0) / p;
      u[i] = (y[i + 1] - y[i]) / (x[i + 1] - x[i]) - (y[i] - y[i - 1]) / (x[i] - x[i - 1]);
      u[i] = (6.0 * u[i] / (x[i + 1] - x[i - 1]) - sig * u[i - 1]) / p;
    }
    for (int k = n - 2; k >= 0; k--) y2[k] = y2[k] * y2[k + 1] + u[k];
  }

  int segment(double x) const {
    int lo = 0, hi = (int)xs.size() - 1;
    while (hi - lo > 1) {
      const int mid = (lo + hi) / 2;
      (xs[mid] > x ? hi : lo) = mid;
    }
    return lo;
  }

  double eval(double x) const {
    const int k = segment(x);
    const double h = xs[k + 1] - xs[k];
    const double a = (xs[k + 1] - x) / h, b = (x - xs[k]) / h;
    return a * ys[k] + b * ys[k + 1] +
           ((a * a * a - a) * y2[k] + (b * b * b - b) * y2[k + 1]) * h * h / 6.0;
  }

  double deriv(double x) const {
    const int k = segment(x);
    const double h = xs[k + 1] - xs[k];
    const double a = (xs[k + 1] - x) / h, b = (x - xs[k]) / h;
    return (ys[k + 1] - ys[k]) / h +
           ((3 * b * b - 1) * y2[k + 1] - (3 * a * a - 1) * y2[k]) * h / 6.0;
  }
};

Spline spline_J(const WannierTable& t) {
  Spline s;
  s.build(t.depths, t.J_of_V);
  return s;
}

Spline spline_U(const WannierTable& t) {
  Spline s;
  s.build(t.depths, t.U_of_V);
  return s;
}

}  // namespace

double WannierTable::J(double V) const { return spline_J(*this).eval(V); }
double WannierTable::U(double V) const { return spline_U(*this).eval(V); }
double WannierTable::dJ_dV(double V) const { return spline_J(*this).deriv(V); }
double WannierTable::dU_dV(double V) const { return spline_U(*this).deriv(V); }

std::string WannierTable::to_csv() const {
  std::ostringstream out;
  out << "# optical lattice calibration table, recoil units (E_R = k_l = 1)\n";
  out << "# g=" << format_double(g) << " n_planewaves=" << n_planewaves << "\n";
  out << "V,J,U\n";
  for (size_t i = 0; i < depths.size(); i++)
    out << format_double(depths[i]) << "," << format_double(J_of_V[i]) << ","
        << format_double(U_of_V[i]) << "\n";
  return out.str();
}

WannierTable WannierTable::from_csv(const std::string& text) {
  WannierTable t;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      auto gpos = line.find("g=");
      if (gpos != std::string::npos) t.g = std::strtod(line.c_str() + gpos + 2, nullptr);
      auto npos = line.find("n_planewaves=");
      if (npos != std::string::npos) t.n_planewaves = std::atoi(line.c_str() + npos + 13);
      continue;
    }
    if (line.rfind("V,", 0) == 0) continue;
    double v, j, u;
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &v, &j, &u) == 3) {
      t.depths.push_back(v);
      t.J_of_V.push_back(j);
      t.U_of_V.push_back(u);
    }
  }
  if (t.depths.size() < 4) throw std::invalid_argument("table too short");
  return t;
}

WannierTable build_wannier_table(double v_min, double v_max, int nodes) {
  WannierTable t;
  t.n_planewaves = 15;
  const double g = normalize_g(10.0);
  t.g = g;
  for (int i = 0; i < nodes; i++) {
    const double V = v_min + (v_max - v_min) * i / (nodes - 1);
    t.depths.push_back(V);
    t.J_of_V.push_back(hopping_J(V));
    t.U_of_V.push_back(g * build_wannier(V).u4_integral);
  }
  return t;
}

NoiseSensitivity noise_sensitivity(const WannierTable& table, double V0, double delta_l) {
  if (delta_l < 0) throw std::invalid_argument("delta_l must be >= 0");
  NoiseSensitivity s;
  const double sigma_v = delta_l;  // fraction of E_R, and E_R = 1
  const double J = table.J(V0), U = table.U(V0);
  s.sigma_J_over_J = std::abs(table.dJ_dV(V0)) * sigma_v / J;
  s.sigma_U_over_U = std::abs(table.dU_dV(V0)) * sigma_v / U;
  s.correlation_sign = -1;  // dJ/dV < 0, dU/dV > 0
  return s;
}

}  // namespace quench
