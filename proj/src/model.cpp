#include "quench/model.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace quench {

bool IsingSpec::nearest_neighbour() const { return std::isinf(alpha); }

int IsingSpec::pair_index(int n, int m) const {
  // lexicographic over 0 <= n < m < sites
  return n * sites - n * (n + 1) / 2 + (m - n - 1);
}

double IsingSpec::coupling(int n, int m) const {
  if (n > m) std::swap(n, m);
  if (nearest_neighbour() && m - n > 1) return 0.0;
  double base = J0_pair.empty() ? J0 : J0_pair[pair_index(n, m)];
  if (nearest_neighbour()) return base;
  return base / std::pow(double(m - n), alpha);
}

int model_sites(const ModelSpec& m) {
  return std::visit([](const auto& s) { return s.sites; }, m);
}

int model_local_dim(const ModelSpec& m) { return is_hubbard(m) ? 4 : 2; }

bool model_fermionic(const ModelSpec& m) { return is_hubbard(m); }

bool is_hubbard(const ModelSpec& m) { return std::holds_alternative<HubbardSpec>(m); }

std::vector<BondPair> interaction_pairs(const ModelSpec& m) {
  std::vector<BondPair> out;
  const int M = model_sites(m);
  if (is_hubbard(m)) {
    const auto& h = std::get<HubbardSpec>(m);
    for (int n = 0; n < M - 1; n++) {
      out.push_back({n, n + 1});
      if (h.Jnn != 0.0 && n + 2 < M) out.push_back({n, n + 2});
    }
    return out;
  }
  const auto& s = std::get<IsingSpec>(m);
  if (s.nearest_neighbour()) {
    for (int n = 0; n < M - 1; n++) out.push_back({n, n + 1});
  } else {
    for (int n = 0; n < M - 1; n++)
      for (int mm = n + 1; mm < M; mm++) out.push_back({n, mm});
  }
  return out;
}

namespace ops {

namespace {
Tensor mat2(std::initializer_list<cd> v) { return Tensor({2, 2}, std::vector<cd>(v)); }
Tensor diag4(cd a, cd b, cd c, cd d) {
  Tensor t({4, 4});
  t.at({0, 0}) = a;
  t.at({1, 1}) = b;
  t.at({2, 2}) = c;
  t.at({3, 3}) = d;
  return t;
}
}  // namespace

Tensor mode_a() { return mat2({0, 1, 0, 0}); }
Tensor mode_adag() { return mat2({0, 0, 1, 0}); }
Tensor mode_z() { return mat2({1, 0, 0, -1}); }

// basis index 2 n_up + n_dn: 0 empty, 1 dn, 2 up, 3 updn
Tensor n_up() { return diag4(0, 0, 1, 1); }
Tensor n_dn() { return diag4(0, 1, 0, 1); }
Tensor n_total() { return diag4(0, 1, 1, 2); }
Tensor n_updn() { return diag4(0, 0, 0, 1); }
Tensor site_parity() { return diag4(1, -1, -1, 1); }
Tensor ltilde_sq() { return diag4(0, 1, 1, 4); }

Tensor sx() { return mat2({0, 0.5, 0.5, 0}); }
Tensor sz() { return mat2({0.5, 0, 0, -0.5}); }
Tensor sp() { return mat2({0, 1, 0, 0}); }
Tensor sm() { return mat2({0, 0, 1, 0}); }

Tensor kron(const Tensor& a, const Tensor& b) {
  const long da = a.dim(0), db = b.dim(0);
  Tensor out({da * db, da * db});
  for (long i = 0; i < da; i++)
    for (long j = 0; j < da; j++) {
      const cd aij = a.data()[i * da + j];
      if (aij == cd(0, 0)) continue;
      for (long k = 0; k < db; k++)
        for (long l = 0; l < db; l++)
          out.data()[(i * db + k) * da * db + (j * db + l)] = aij * b.data()[k * db + l];
    }
  return out;
}

}  // namespace ops

namespace {

void add_scaled(Tensor& acc, const Tensor& t, cd scale) {
  for (long i = 0; i < acc.size(); i++) acc.data()[i] += scale * t.data()[i];
}

Tensor dagger(const Tensor& t) {
  const long n = t.dim(0);
  Tensor out({n, n});
  for (long i = 0; i < n; i++)
    for (long j = 0; j < n; j++) out.data()[i * n + j] = std::conj(t.data()[j * n + i]);
  return out;
}

// weight of site s's on-site term on bond (n, n+1); edge sites put everything
// on their single bond, interior sites split half/half
double onsite_weight(int site, int bond_left, int M) {
  if (site == bond_left) return (site == 0) ? 1.0 : 0.5;
  return (site == M - 1) ? 1.0 : 0.5;
}

Tensor hubbard_bond(const HubbardSpec& h, int n, int m, GatePart part, double gamma) {
  const int M = h.sites;
  if (n < 0 || m <= n || m >= M) throw std::invalid_argument("invalid bond indices");
  if (m - n > 2) throw std::invalid_argument("hubbard bonds are (n,n+1) or (n,n+2)");
  if (m == n + 2 && h.Jnn == 0.0) throw std::invalid_argument("Jnn bond requested with Jnn = 0");

  Tensor hb({16, 16});
  const Tensor id2 = Tensor({2, 2}, {1, 0, 0, 1});
  const Tensor a = ops::mode_a(), ad = ops::mode_adag(), z = ops::mode_z();

  const bool kinetic = part != GatePart::interaction;
  const bool interaction = part != GatePart::kinetic;

  if (kinetic) {
    // c^dag_{n,s} c_{m,s} + h.c. in the (routed-)adjacent frame:
    //   up:  (a^dag Z) x (a 1),  dn: (1 a^dag) x (Z a)
    const double amp = (m == n + 1) ? h.bond_J(n) : h.Jnn;
    Tensor hop_up = ops::kron(ops::kron(ad, z), ops::kron(a, id2));
    Tensor hop_dn = ops::kron(ops::kron(id2, ad), ops::kron(z, a));
    add_scaled(hb, hop_up, -amp);
    add_scaled(hb, dagger(hop_up), -amp);
    add_scaled(hb, hop_dn, -amp);
    add_scaled(hb, dagger(hop_dn), -amp);
  }

  if (interaction && m == n + 1) {
    const Tensor id4 = ops::kron(id2, id2);
    const double wn = onsite_weight(n, n, M), wm = onsite_weight(m, n, M);
    add_scaled(hb, ops::kron(ops::n_updn(), id4), wn * h.site_U(n));
    add_scaled(hb, ops::kron(id4, ops::n_updn()), wm * h.site_U(m));
    if (h.Vnn != 0.0) add_scaled(hb, ops::kron(ops::n_total(), ops::n_total()), h.Vnn);
    if (gamma != 0.0) {
      // trajectory drift -(i/2) gamma Ltilde^dag Ltilde, same half/half split
      add_scaled(hb, ops::kron(ops::ltilde_sq(), id4), cd(0, -0.5) * gamma * wn);
      add_scaled(hb, ops::kron(id4, ops::ltilde_sq()), cd(0, -0.5) * gamma * wm);
    }
  }
  return hb;
}

Tensor ising_bond(const IsingSpec& s, int n, int m, GatePart part) {
  const int M = s.sites;
  if (n < 0 || m <= n || m >= M) throw std::invalid_argument("invalid bond indices");
  if (s.nearest_neighbour() && m != n + 1) throw std::invalid_argument("NN Ising bond must be adjacent");

  Tensor hb({4, 4});
  const bool coupling = part != GatePart::interaction;   // kinetic <-> SzSz here
  const bool field = part != GatePart::kinetic;
  const Tensor id2 = Tensor({2, 2}, {1, 0, 0, 1});

  if (coupling) add_scaled(hb, ops::kron(ops::sz(), ops::sz()), s.coupling(n, m));
  if (field) {
    double wn, wm;
    if (s.nearest_neighbour()) {
      wn = onsite_weight(n, n, M);
      wm = onsite_weight(m, n, M);
    } else {
      wn = wm = 1.0 / double(M - 1);
    }
    add_scaled(hb, ops::kron(ops::sx(), id2), wn * s.site_B(n));
    add_scaled(hb, ops::kron(id2, ops::sx()), wm * s.site_B(m));
  }
  return hb;
}

}  // namespace

Tensor build_bond_hamiltonian(const ModelSpec& m, int n, int mm, GatePart part) {
  if (is_hubbard(m)) return hubbard_bond(std::get<HubbardSpec>(m), n, mm, part, 0.0);
  return ising_bond(std::get<IsingSpec>(m), n, mm, part);
}

Tensor build_bond_hamiltonian_eff(const ModelSpec& m, int n, int mm, double gamma, GatePart part) {
  if (!is_hubbard(m)) throw std::invalid_argument("effective bond Hamiltonian is Hubbard-only");
  return hubbard_bond(std::get<HubbardSpec>(m), n, mm, part, gamma);
}

ProductStateSpec ProductStateSpec::neel(int sites) {
  ProductStateSpec p;
  for (int i = 0; i < sites; i++) p.labels.push_back(i % 2 == 0 ? "up" : "down");
  return p;
}

ProductStateSpec ProductStateSpec::all_plus(int sites) {
  ProductStateSpec p;
  p.labels.assign(sites, "plus");
  return p;
}

ProductStateSpec ProductStateSpec::half_filled_left(int sites) {
  ProductStateSpec p;
  for (int i = 0; i < sites; i++) p.labels.push_back(i < sites / 2 ? "updown" : "0");
  return p;
}

std::vector<cd> local_state(const ModelSpec& m, const std::string& label) {
  const double r = 1.0 / std::sqrt(2.0);
  if (is_hubbard(m)) {
    if (label == "0" || label == "empty") return {1, 0, 0, 0};
    if (label == "down") return {0, 1, 0, 0};
    if (label == "up") return {0, 0, 1, 0};
    if (label == "updown") return {0, 0, 0, 1};
    throw std::invalid_argument("invalid Hubbard site label: " + label);
  }
  if (label == "up") return {1, 0};
  if (label == "down") return {0, 1};
  if (label == "plus") return {r, r};
  if (label == "minus") return {r, -r};
  throw std::invalid_argument("invalid Ising site label: " + label);
}

ObservableKind observable_kind_from_string(const std::string& s) {
  if (s == "density") return ObservableKind::density;
  if (s == "offdiag_hubbard") return ObservableKind::offdiag_hubbard;
  if (s == "density_density") return ObservableKind::density_density;
  if (s == "sx") return ObservableKind::sx;
  if (s == "spsm") return ObservableKind::spsm;
  if (s == "szsz") return ObservableKind::szsz;
  if (s == "entropy_center") return ObservableKind::entropy_center;
  throw std::invalid_argument("unknown observable kind: " + s);
}

std::string observable_kind_to_string(ObservableKind k) {
  switch (k) {
    case ObservableKind::density: return "density";
    case ObservableKind::offdiag_hubbard: return "offdiag_hubbard";
    case ObservableKind::density_density: return "density_density";
    case ObservableKind::sx: return "sx";
    case ObservableKind::spsm: return "spsm";
    case ObservableKind::szsz: return "szsz";
    case ObservableKind::entropy_center: return "entropy_center";
  }
  return "?";
}

bool observable_compatible(const ModelSpec& m, ObservableKind k) {
  if (k == ObservableKind::entropy_center) return true;
  const bool hub = is_hubbard(m);
  switch (k) {
    case ObservableKind::density:
    case ObservableKind::offdiag_hubbard:
    case ObservableKind::density_density:
      return hub;
    default:
      return !hub;
  }
}

Tensor swap_gate(const ModelSpec& m) {
  const long d = model_local_dim(m);
  Tensor g({d * d, d * d});
  for (long a = 0; a < d; a++)
    for (long b = 0; b < d; b++) {
      double sign = 1.0;
      if (model_fermionic(m)) {
        const int pa = (a == 1 || a == 2) ? 1 : 0;  // odd occupation
        const int pb = (b == 1 || b == 2) ? 1 : 0;
        sign = (pa && pb) ? -1.0 : 1.0;
      }
      g.data()[(b * d + a) * d * d + (a * d + b)] = sign;
    }
  return g;
}

}  // namespace quench
