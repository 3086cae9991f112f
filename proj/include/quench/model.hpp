// Hamiltonians under study (Hubbard chain, transverse-field Ising chain with
// power-law or nearest-neighbour couplings), their bond decompositions, initial
// product states, and the measured observables.
//
// Conventions shared across the code base:
//  - sites are 0-based;
//  - Hubbard local basis index is 2*n_up + n_dn: {0: empty, 1: down, 2: up,
//    3: doubly occupied}, with |updown> = c^dag_up c^dag_dn |0>;
//  - Ising local basis {0: up (S_z=+1/2), 1: down};
//  - the fermionic mode order is (0up, 0dn, 1up, 1dn, ...); Jordan-Wigner
//    strings inside a two-site block reduce to single-mode Z factors, which is
//    what keeps nearest-neighbour bond gates strictly two-local;
//  - energies in units of J (Hubbard) or J0 (Ising), hbar = 1, time in 1/J.
#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "quench/tensor.hpp"

namespace quench {

struct HubbardSpec {
  int sites = 2;
  double J = 1.0;
  double U = 1.0;
  double Jnn = 0.0;  // next-nearest tunnelling
  double Vnn = 0.0;  // nearest-neighbour density-density interaction
  // Per-site / per-bond overrides for inhomogeneous (per-site calibration)
  // sampling; empty means homogeneous.
  std::vector<double> J_bond;   // size sites-1
  std::vector<double> U_site;   // size sites
  double bond_J(int n) const { return J_bond.empty() ? J : J_bond[n]; }
  double site_U(int n) const { return U_site.empty() ? U : U_site[n]; }
};

struct IsingSpec {
  int sites = 2;
  double J0 = 1.0;
  double B = 1.0;
  // Power-law exponent; infinity() selects the nearest-neighbour limit.
  double alpha = 2.0;
  std::vector<double> J0_pair;  // per-pair override, lexicographic (n<m)
  std::vector<double> B_site;   // per-site override

  bool nearest_neighbour() const;
  // J0 / |n-m|^alpha (zero beyond distance 1 in the NN limit)
  double coupling(int n, int m) const;
  double site_B(int n) const { return B_site.empty() ? B : B_site[n]; }
  int pair_index(int n, int m) const;  // lexicographic enumeration over n<m
};

using ModelSpec = std::variant<HubbardSpec, IsingSpec>;

int model_sites(const ModelSpec& m);
int model_local_dim(const ModelSpec& m);
bool model_fermionic(const ModelSpec& m);
bool is_hubbard(const ModelSpec& m);

// Ordered interaction pairs visited by a left-to-right sweep: lexicographic
// (n, m).  Hubbard: (n, n+1) plus (n, n+2) when Jnn != 0; long-range Ising:
// every pair; NN Ising: (n, n+1).
struct BondPair {
  int n, m;
};
std::vector<BondPair> interaction_pairs(const ModelSpec& m);

enum class GatePart { whole, kinetic, interaction };

// Two-site Hermitian bond Hamiltonian h(n,m) as a (d*d) x (d*d) matrix over
// basis index i_n*d + i_m, such that sum over interaction_pairs reproduces the
// full Hamiltonian.  On-site pieces (Hubbard U, Ising B) are split half/half
// onto the two bonds adjacent to an interior site; edge sites give full weight
// to their only bond.  For the long-range Ising model each pair carries
// B/(M-1) of each endpoint's field.  Next-nearest bonds are expressed in the
// swap-routed frame (sites adjacent after routing) and carry no on-site share.
Tensor build_bond_hamiltonian(const ModelSpec& m, int n, int mm,
                              GatePart part = GatePart::whole);

// Same with the trajectory drift term: h - (i/2) gamma * (site shares of
// Ltilde^dag Ltilde), Ltilde_n = n_up + n_dn.  Non-Hermitian; Hubbard only.
Tensor build_bond_hamiltonian_eff(const ModelSpec& m, int n, int mm, double gamma,
                                  GatePart part = GatePart::whole);

struct ProductStateSpec {
  std::vector<std::string> labels;  // per site; Hubbard: 0|up|down|updown, Ising: plus|minus|up|down
  static ProductStateSpec neel(int sites);             // up,down,up,down,...
  static ProductStateSpec all_plus(int sites);         // Ising |+,+,...>
  static ProductStateSpec half_filled_left(int sites); // updown on left half, empty right
};

// Local state vector for one site label (length = local dim); throws on labels
// invalid for the model.
std::vector<cd> local_state(const ModelSpec& m, const std::string& label);

enum class ObservableKind {
  density,          // <n_{n,up}>
  offdiag_hubbard,  // <c^dag_{r,up} c_{n,up}> with JW string
  density_density,  // <n_{r,up} n_{n,up}>
  sx,               // <S_x^n>
  spsm,             // <S_+^r S_-^n>
  szsz,             // <S_z^r S_z^n>
  entropy_center,   // von Neumann entropy at the centre bond
};

struct ObservableSpec {
  ObservableKind kind = ObservableKind::density;
  int reference_site = -1;  // -1 -> sites/2
  int ref(int sites) const { return reference_site < 0 ? sites / 2 : reference_site; }
};

ObservableKind observable_kind_from_string(const std::string& s);
std::string observable_kind_to_string(ObservableKind k);
bool observable_compatible(const ModelSpec& m, ObservableKind k);

// 2x2 and 4x4 local operator matrices (row-major) used throughout.
namespace ops {
// single fermionic mode (qubit rep): a, a^dag, Z = 1 - 2 n
Tensor mode_a();
Tensor mode_adag();
Tensor mode_z();
// Hubbard site (dim 4)
Tensor n_up();
Tensor n_dn();
Tensor n_total();       // n_up + n_dn
Tensor n_updn();        // n_up * n_dn
Tensor site_parity();   // (-1)^{n_up+n_dn}
Tensor ltilde_sq();     // (n_up + n_dn)^2
// Ising site (dim 2)
Tensor sx();
Tensor sz();
Tensor sp();
Tensor sm();
// kron of two square matrices
Tensor kron(const Tensor& a, const Tensor& b);
}  // namespace ops

// Swap gate used for routing long-range gates: plain for spins, fermionic
// (sign (-1)^{p(a) p(b)}) for Hubbard sites.  Returned as (d*d) x (d*d).
Tensor swap_gate(const ModelSpec& m);

class MpsState;  // mps.hpp

// <O_n> for n = 0..M-1.  Requires a normalized state (norm within 1e-8 of 1).
std::vector<cd> evaluate_observable(const MpsState& state, const ModelSpec& m,
                                    const ObservableSpec& obs);

}  // namespace quench
