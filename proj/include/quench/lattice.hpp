// Band structure of the 1D sinusoidal optical lattice, V(x) = V sin^2(k_l x),
// in recoil units (E_R = k_l = 1): lowest-band energies from the plane-wave
// tridiagonal, J(V) from the bandwidth, U(V) from the Wannier-function overlap
// up to one normalization constant fixed at the working point.
#pragma once

#include <string>
#include <vector>

namespace quench {

// Lowest band energy at quasimomentum q (units of k_l, q in [-1, 1]) for depth
// V (units of E_R).  Plane-wave basis of 2N+1 momenta; N grows automatically
// until the energy is stable to 1e-10 (N >= 15 to start).  The potential's
// constant offset V/2 is retained.
double lowest_band(double V, double q, int n_planewaves = 15);

// Tight-binding bandwidth relation J = (E(k_l) - E(0)) / 4.
double hopping_J(double V);

struct WannierFunction {
  std::vector<double> x;  // grid, units of 1/k_l; lattice period is pi
  std::vector<double> w;  // real, symmetric about x = 0, normalized to 1
  double u4_integral = 0; // int |w|^4 dx
  double outside_two_sites = 0;  // probability weight beyond |x| > 2 pi
};

WannierFunction build_wannier(double V, int n_planewaves = 15, int n_q = 64);

// U(V) = g * int |w|^4 dx with g fixed once by U(V0) = J(V0) at V0 = 10 E_R.
double onsite_U(double V, double g);
double normalize_g(double V0 = 10.0);  // returns g

struct WannierTable {
  std::vector<double> depths;  // V grid in E_R
  std::vector<double> J_of_V;
  std::vector<double> U_of_V;
  double g = 0;
  int n_planewaves = 0;

  double J(double V) const;  // cubic interpolation
  double U(double V) const;
  double dJ_dV(double V) const;
  double dU_dV(double V) const;

  std::string to_csv() const;
  static WannierTable from_csv(const std::string& text);
};

// Default grid V in [4, 20] E_R, 161 nodes.
WannierTable build_wannier_table(double v_min = 4.0, double v_max = 20.0, int nodes = 161);

struct NoiseSensitivity {
  double sigma_J_over_J = 0;
  double sigma_U_over_U = 0;
  int correlation_sign = -1;
};

// First-order propagation of sigma_V = delta_l * E_R through the table.
NoiseSensitivity noise_sensitivity(const WannierTable& table, double V0, double delta_l);

}  // namespace quench
