#include "quench/circuit.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "quench/util.hpp"

namespace quench {

void CircuitIR::add(Gate g) {
  if (g.q0 < 0 || g.q0 >= n_qubits || (g.q1 >= 0 && (g.q1 >= n_qubits || g.q1 == g.q0)))
    throw std::invalid_argument("gate operands out of range");
  if (g.kind == GateKind::RZ) {
    if (!std::isfinite(g.angle)) throw std::invalid_argument("non-finite rotation angle");
    if (g.group_key == 0) g.group_key = std::bit_cast<std::uint64_t>(g.angle);
  }
  gates.push_back(std::move(g));
}

std::string CircuitIR::to_gate_list() const {
  std::ostringstream out;
  auto name = [](GateKind k) {
    switch (k) {
      case GateKind::CNOT: return "CNOT";
      case GateKind::CZ: return "CZ";
      case GateKind::H: return "H";
      case GateKind::YB: return "YB";
      case GateKind::YBdag: return "YBdag";
      case GateKind::RZ: return "RZ";
      case GateKind::SWAP: return "SWAP";
    }
    return "?";
  };
  for (const auto& g : gates) {
    out << name(g.kind) << " " << g.q0;
    if (g.q1 >= 0) out << " " << g.q1;
    if (g.kind == GateKind::RZ) out << " " << format_double(g.angle);
    out << "\n";
  }
  return out.str();
}

std::vector<long> assign_layers(const CircuitIR& c) {
  std::vector<long> layer(c.gates.size(), 0);
  long current = 0;
  std::vector<char> used(c.n_qubits, 0);
  for (size_t i = 0; i < c.gates.size(); i++) {
    const Gate& g = c.gates[i];
    const bool conflict =
        (current > 0) && (used[g.q0] || (g.q1 >= 0 && used[g.q1]));
    if (current == 0 || conflict) {
      current++;
      std::fill(used.begin(), used.end(), 0);
    }
    used[g.q0] = 1;
    if (g.q1 >= 0) used[g.q1] = 1;
    layer[i] = current;
  }
  return layer;
}

GateCounts schedule_depth(const CircuitIR& c) {
  GateCounts counts;
  counts.ancillas = c.n_ancilla;
  const auto layers = assign_layers(c);
  std::vector<char> has_cnot, has_rz, has_cliff;
  long max_layer = 0;
  for (long l : layers) max_layer = std::max(max_layer, l);
  has_cnot.assign(max_layer + 1, 0);
  has_rz.assign(max_layer + 1, 0);
  has_cliff.assign(max_layer + 1, 0);
  for (size_t i = 0; i < c.gates.size(); i++) {
    const Gate& g = c.gates[i];
    switch (g.kind) {
      case GateKind::CNOT:
      case GateKind::CZ:
      case GateKind::SWAP:
        counts.cnot++;
        has_cnot[layers[i]] = 1;
        break;
      case GateKind::RZ:
        counts.rz++;
        has_rz[layers[i]] = 1;
        break;
      case GateKind::H:
      case GateKind::YB:
      case GateKind::YBdag:
        counts.clifford++;
        has_cliff[layers[i]] = 1;
        break;
    }
  }
  for (long l = 1; l <= max_layer; l++) {
    counts.cnot_depth += has_cnot[l];
    counts.rz_depth += has_rz[l];
    counts.clifford_depth += has_cliff[l];
  }
  return counts;
}

std::map<std::pair<long, std::uint64_t>, long> rotation_groups(const CircuitIR& c) {
  std::map<std::pair<long, std::uint64_t>, long> groups;
  const auto layers = assign_layers(c);
  for (size_t i = 0; i < c.gates.size(); i++)
    if (c.gates[i].kind == GateKind::RZ) groups[{layers[i], c.gates[i].group_key}]++;
  return groups;
}

namespace {

// A moment is a set of gates on disjoint qubits emitted together; the helper
// keeps the in-order layering honest by leading with a conflicting gate (the
// builders pass lead-first gate lists).
void emit(CircuitIR& c, std::vector<Gate> moment) {
  for (auto& g : moment) c.add(std::move(g));
}

Gate g1(GateKind k, int q) { return Gate{k, q, -1, 0, 0, {}}; }
Gate g2(GateKind k, int a, int b) { return Gate{k, a, b, 0, 0, {}}; }
Gate grz(int q, double angle, const char* tag) {
  Gate g{GateKind::RZ, q, -1, angle, 0, tag};
  return g;
}

// XX+YY hop block between adjacent JW qubits a, b with angle theta = -J dt.
// Emitted as sub-moments across all pairs in `hops`.
struct HopTriple {
  int a, b;
};

void emit_hop_blocks(CircuitIR& c, const std::vector<HopTriple>& hops, double theta,
                     const char* tag) {
  std::vector<Gate> m;
  auto moment = [&](auto&& fill) {
    m.clear();
    fill();
    emit(c, m);
  };
  moment([&] {
    for (const auto& h : hops) m.push_back(g1(GateKind::H, h.a));
    for (const auto& h : hops) m.push_back(g1(GateKind::H, h.b));
  });
  moment([&] {
    for (const auto& h : hops) m.push_back(g2(GateKind::CNOT, h.a, h.b));
  });
  moment([&] {
    for (const auto& h : hops) m.push_back(grz(h.b, theta, tag));
  });
  moment([&] {
    for (const auto& h : hops) m.push_back(g2(GateKind::CNOT, h.a, h.b));
  });
  moment([&] {
    for (const auto& h : hops) m.push_back(g1(GateKind::H, h.a));
    for (const auto& h : hops) m.push_back(g1(GateKind::H, h.b));
  });
  moment([&] {
    for (const auto& h : hops) m.push_back(g1(GateKind::YB, h.a));
    for (const auto& h : hops) m.push_back(g1(GateKind::YB, h.b));
  });
  moment([&] {
    for (const auto& h : hops) m.push_back(g2(GateKind::CNOT, h.a, h.b));
  });
  moment([&] {
    for (const auto& h : hops) m.push_back(grz(h.b, theta, tag));
  });
  moment([&] {
    for (const auto& h : hops) m.push_back(g2(GateKind::CNOT, h.a, h.b));
  });
  moment([&] {
    for (const auto& h : hops) m.push_back(g1(GateKind::YBdag, h.a));
    for (const auto& h : hops) m.push_back(g1(GateKind::YBdag, h.b));
  });
}

// On-site interaction section: 3M rotations (depth 2), 2M CNOTs (depth 2).
void emit_onsite(CircuitIR& c, int M, double U, double dt,
                 const std::function<int(int)>& up_qubit,
                 const std::function<int(int)>& dn_qubit) {
  std::vector<Gate> m;
  for (int s = 0; s < M; s++) {
    m.push_back(grz(up_qubit(s), -U * dt / 2, "onsite_z"));
    m.push_back(grz(dn_qubit(s), -U * dt / 2, "onsite_z"));
  }
  emit(c, std::move(m));
  m.clear();
  for (int s = 0; s < M; s++) m.push_back(g2(GateKind::CNOT, up_qubit(s), dn_qubit(s)));
  emit(c, std::move(m));
  m.clear();
  for (int s = 0; s < M; s++) m.push_back(grz(dn_qubit(s), U * dt / 2, "onsite_zz"));
  emit(c, std::move(m));
  m.clear();
  for (int s = 0; s < M; s++) m.push_back(g2(GateKind::CNOT, up_qubit(s), dn_qubit(s)));
  emit(c, std::move(m));
  c.global_phase += -U * dt / 4 * M;
}

}  // namespace

CircuitIR build_hubbard_sweep(int L, double J, double U, double dt) {
  if (L < 2) throw std::invalid_argument("lattice side must be >= 2");
  const int M = L * L;
  CircuitIR c;
  c.n_data = 2 * M;
  c.n_ancilla = 2 * L;
  c.n_qubits = c.n_data + c.n_ancilla;
  const double theta_h = -J * dt;

  auto snake = [&](int i, int j) { return i * L + (i % 2 == 0 ? j : L - 1 - j); };
  auto q = [&](int s, int i, int j) { return s * M + snake(i, j); };
  auto anc = [&](int s, int i) { return 2 * M + s * L + i; };

  // up qubit of snake site k is k, the down qubit is M + k
  emit_onsite(c, M, U, dt, [](int k) { return k; }, [&](int k) { return M + k; });

  // horizontal tunnelling: two column-parity groups, all rows and species
  for (int par = 0; par < 2; par++) {
    std::vector<HopTriple> hops;
    for (int s = 0; s < 2; s++)
      for (int i = 0; i < L; i++)
        for (int j = par; j + 1 < L; j += 2) hops.push_back({q(s, i, j), q(s, i, j + 1)});
    if (!hops.empty()) emit_hop_blocks(c, hops, theta_h, "hop_h");
  }

  // vertical tunnelling: two row-parity groups; per row pair the Jordan-Wigner
  // string parities are accumulated incrementally on the row ancilla, hop
  // rotations run in parallel conjugated by CZ(anc, q), then the ancilla is
  // uncomputed exactly.
  for (int par = 0; par < 2; par++) {
    std::vector<std::pair<int, int>> row_pairs;  // (species, row i)
    for (int s = 0; s < 2; s++)
      for (int i = par; i + 1 < L; i += 2) row_pairs.push_back({s, i});
    if (row_pairs.empty()) continue;

    // column order, innermost (snake-adjacent) first
    auto columns_in = [&](int i) {
      std::vector<int> cols(L);
      for (int j = 0; j < L; j++) cols[j] = (i % 2 == 0) ? L - 1 - j : j;
      return cols;
    };

    std::vector<Gate> stamp;  // serialized per pair, interleaved across pairs
    // chain position ordering: for k = 1..L-1: E_k (2 CNOTs), CZ_k
    for (int k = 1; k < L; k++) {
      std::vector<Gate> m1, m2, m3;
      for (auto [s, i] : row_pairs) {
        auto cols = columns_in(i);
        const int jprev = cols[k - 1], jk = cols[k];
        const int a = anc(s, i);
        m1.push_back(g2(GateKind::CNOT, q(s, i, jprev), a));
        m2.push_back(g2(GateKind::CNOT, q(s, i + 1, jprev), a));
        m3.push_back(g2(GateKind::CZ, a, q(s, i + 1, jk)));
      }
      for (auto& g : m1) stamp.push_back(g);
      for (auto& g : m2) stamp.push_back(g);
      for (auto& g : m3) stamp.push_back(g);
    }
    for (auto& g : stamp) c.add(g);

    // parallel rotation cores for every column; the innermost column needs no
    // parity and joins the same moments
    {
      std::vector<Gate> m;
      auto moment = [&](auto&& fill) {
        m.clear();
        fill();
        emit(c, m);
      };
      auto all_pq = [&](auto&& fn) {
        // outermost first so each moment's lead gate conflicts with the
        // stamping chain's final layer
        for (int k = L - 1; k >= 0; k--)
          for (auto [s, i] : row_pairs) {
            auto cols = columns_in(i);
            fn(q(s, i, cols[k]), q(s, i + 1, cols[k]));
          }
      };
      moment([&] { all_pq([&](int p, int qq) { m.push_back(g1(GateKind::H, qq)); m.push_back(g1(GateKind::H, p)); }); });
      moment([&] { all_pq([&](int p, int qq) { m.push_back(g2(GateKind::CNOT, p, qq)); }); });
      moment([&] { all_pq([&](int p, int qq) { m.push_back(grz(qq, theta_h, "hop_v")); }); });
      moment([&] { all_pq([&](int p, int qq) { m.push_back(g2(GateKind::CNOT, p, qq)); }); });
      moment([&] { all_pq([&](int p, int qq) { m.push_back(g1(GateKind::H, qq)); m.push_back(g1(GateKind::H, p)); }); });
      moment([&] { all_pq([&](int p, int qq) { m.push_back(g1(GateKind::YB, qq)); m.push_back(g1(GateKind::YB, p)); }); });
      moment([&] { all_pq([&](int p, int qq) { m.push_back(g2(GateKind::CNOT, p, qq)); }); });
      moment([&] { all_pq([&](int p, int qq) { m.push_back(grz(qq, theta_h, "hop_v")); }); });
      moment([&] { all_pq([&](int p, int qq) { m.push_back(g2(GateKind::CNOT, p, qq)); }); });
      moment([&] { all_pq([&](int p, int qq) { m.push_back(g1(GateKind::YBdag, qq)); m.push_back(g1(GateKind::YBdag, p)); }); });
    }

    // uncompute: exact reverse of the stamp sequence
    for (auto it = stamp.rbegin(); it != stamp.rend(); ++it) c.add(*it);
  }
  return c;
}

CircuitIR build_hubbard_chain_sweep(int M, double J, double U, double dt) {
  if (M < 2) throw std::invalid_argument("need at least 2 sites");
  CircuitIR c;
  c.n_data = 2 * M;
  c.n_ancilla = 0;
  c.n_qubits = 2 * M;
  const double theta_h = -J * dt;
  emit_onsite(c, M, U, dt, [&](int s) { return s; }, [&](int s) { return M + s; });
  for (int par = 0; par < 2; par++) {
    std::vector<HopTriple> hops;
    for (int s = 0; s < 2; s++)
      for (int n = par; n + 1 < M; n += 2) hops.push_back({s * M + n, s * M + n + 1});
    if (!hops.empty()) emit_hop_blocks(c, hops, theta_h, "hop");
  }
  return c;
}

CircuitIR build_hubbard_row_pair_optimized(int L, double J, double dt) {
  // single species, rows 0 and 1 of an L-column snake, one ancilla
  CircuitIR c;
  c.n_data = 2 * L;
  c.n_ancilla = 1;
  c.n_qubits = 2 * L + 1;
  const double theta_h = -J * dt;
  const int a = 2 * L;
  auto q = [&](int i, int j) { return i == 0 ? j : 2 * L - 1 - j; };  // snake

  std::vector<Gate> stamp;
  for (int k = 1; k < L; k++) {
    const int jprev = L - k, jk = L - 1 - k;
    stamp.push_back(g2(GateKind::CNOT, q(0, jprev), a));
    stamp.push_back(g2(GateKind::CNOT, q(1, jprev), a));
    stamp.push_back(g2(GateKind::CZ, a, q(1, jk)));
  }
  for (auto& g : stamp) c.add(g);
  // parity conjugation happens through the explicit CZ stamps above, so the
  // rotation blocks themselves are plain; outermost column first
  std::vector<HopTriple> hops;
  for (int k = L - 1; k >= 0; k--) hops.push_back({q(0, L - 1 - k), q(1, L - 1 - k)});
  emit_hop_blocks(c, hops, theta_h, "hop_v");
  for (auto it = stamp.rbegin(); it != stamp.rend(); ++it) c.add(*it);
  return c;
}

CircuitIR build_hubbard_row_pair_naive(int L, double J, double dt) {
  CircuitIR c;
  c.n_data = 2 * L;
  c.n_ancilla = 0;
  c.n_qubits = 2 * L;
  const double theta_h = -J * dt;
  auto q = [&](int i, int j) { return i == 0 ? j : 2 * L - 1 - j; };

  // same term order as the optimized circuit: innermost column first
  for (int j = L - 1; j >= 0; j--) {
    const int p = q(0, j), qq = q(1, j);
    std::vector<int> string_qubits;
    for (int x = p + 1; x < qq; x++) string_qubits.push_back(x);
    auto rotation = [&](GateKind basis_in, GateKind basis_out) {
      c.add(g1(basis_in, p));
      c.add(g1(basis_in, qq));
      int prev = p;
      for (int sq : string_qubits) {
        c.add(g2(GateKind::CNOT, prev, sq));
        prev = sq;
      }
      c.add(g2(GateKind::CNOT, prev, qq));
      c.add(grz(qq, theta_h, "hop_v"));
      c.add(g2(GateKind::CNOT, prev, qq));
      for (int k = (int)string_qubits.size() - 1; k >= 0; k--) {
        const int sq = string_qubits[k];
        const int before = k == 0 ? p : string_qubits[k - 1];
        c.add(g2(GateKind::CNOT, before, sq));
      }
      c.add(g1(basis_out, p));
      c.add(g1(basis_out, qq));
    };
    rotation(GateKind::H, GateKind::H);
    rotation(GateKind::YB, GateKind::YBdag);
  }
  return c;
}

CircuitIR build_ising_sweep(const IsingSpec& spec, double dt) {
  const int M = spec.sites;
  CircuitIR c;
  c.n_data = M;
  c.n_ancilla = 0;
  c.n_qubits = M;

  auto transverse = [&]() {
    std::vector<Gate> m;
    for (int n = 0; n < M; n++) m.push_back(g1(GateKind::H, n));
    emit(c, std::move(m));
    m.clear();
    for (int n = 0; n < M; n++) m.push_back(grz(n, spec.site_B(n) * dt, "field"));
    emit(c, std::move(m));
    m.clear();
    for (int n = 0; n < M; n++) m.push_back(g1(GateKind::H, n));
    emit(c, std::move(m));
  };

  auto zz_brick = [&](int parity) {
    std::vector<Gate> m;
    for (int n = parity; n + 1 < M; n += 2) m.push_back(g2(GateKind::CNOT, n, n + 1));
    emit(c, std::move(m));
    m.clear();
    for (int n = parity; n + 1 < M; n += 2)
      m.push_back(grz(n + 1, spec.coupling(n, n + 1) * dt / 2, "zz"));
    emit(c, std::move(m));
    m.clear();
    for (int n = parity; n + 1 < M; n += 2) m.push_back(g2(GateKind::CNOT, n, n + 1));
    emit(c, std::move(m));
  };

  if (spec.nearest_neighbour()) {
    // doubled (1)(1)^T-style bricks: 2(M-1) rotations, depths 4 / 8
    transverse();
    zz_brick(0);
    zz_brick(1);
    zz_brick(1);
    zz_brick(0);
    return c;
  }

  // long-range: round-robin scheduling of every pair
  transverse();
  auto zz_round = [&](const std::vector<std::pair<int, int>>& pairs) {
    std::vector<Gate> m;
    for (auto [a, b] : pairs) m.push_back(g2(GateKind::CNOT, a, b));
    emit(c, std::move(m));
    m.clear();
    for (auto [a, b] : pairs) m.push_back(grz(b, spec.coupling(a, b) * dt / 2, "zz"));
    emit(c, std::move(m));
    m.clear();
    for (auto [a, b] : pairs) m.push_back(g2(GateKind::CNOT, a, b));
    emit(c, std::move(m));
  };
  if (M % 2 == 0) {
    for (int r = 0; r < M - 1; r++) {
      std::vector<std::pair<int, int>> pairs;
      int a = M - 1, b = r % (M - 1);
      pairs.push_back({std::min(a, b), std::max(a, b)});
      for (int k = 1; k <= M / 2 - 1; k++) {
        int x = (r + k) % (M - 1), y = (r - k + (M - 1)) % (M - 1);
        pairs.push_back({std::min(x, y), std::max(x, y)});
      }
      zz_round(pairs);
    }
  } else {
    for (int r = 0; r < M; r++) {
      std::vector<std::pair<int, int>> pairs;
      for (int k = 1; k <= (M - 1) / 2; k++) {
        int x = (r + k) % M, y = (r - k + M) % M;
        pairs.push_back({std::min(x, y), std::max(x, y)});
      }
      zz_round(pairs);
    }
  }
  return c;
}

GateCounts closed_form_hubbard_sweep(int L) {
  GateCounts g;
  const long M = (long)L * L;
  const long rt = L;  // sqrt(M)
  g.rz = 11 * M - 8 * rt;
  g.cnot = 2 * (15 * M - 20 * rt + 6);
  g.clifford = 32 * (M - rt);
  g.rz_depth = 10;
  g.cnot_depth = 6 * (2 * rt + 1);
  g.clifford_depth = 16;
  g.ancillas = 2 * rt;
  return g;
}

GateCounts closed_form_ising_long_range(int M) {
  GateCounts g;
  g.rz = M + (long)M * (M / 2);
  g.cnot = 2L * M * (M / 2);
  g.clifford = 2L * M;
  g.rz_depth = M + 2;
  g.cnot_depth = 2L * M;
  g.clifford_depth = 2;
  g.ancillas = 0;
  return g;
}

GateCounts closed_form_ising_nn(int M) {
  GateCounts g;
  g.rz = M + 2L * (M - 1);
  g.cnot = 4L * (M - 1);
  g.clifford = 2L * M;
  g.rz_depth = 5;   // 1 transverse + 4 coupling layers
  g.cnot_depth = 8;
  g.clifford_depth = 2;
  g.ancillas = 0;
  return g;
}

}  // namespace quench
