#include "quench/resources.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "quench/util.hpp"

namespace quench {

double round_2sig(double x) {
  if (x == 0) return 0;
  const double mag = std::pow(10.0, std::floor(std::log10(std::abs(x))) - 1);
  return std::round(x / mag) * mag;
}

double t_count_group(long n_r, double e) {
  if (n_r < 1) throw std::invalid_argument("group size must be >= 1");
  if (e <= 0) throw std::invalid_argument("synthesis error must be positive");
  if (n_r == 1) return 1.15 * std::log2(1.0 / e) + 9.2;
  const double l = std::log2((double)n_r);
  return 4.0 * n_r + l * (1.15 * std::log2(l / e) + 9.2);
}

double t_synthesis_count(const std::map<std::pair<long, std::uint64_t>, long>& groups,
                         double e) {
  double total = 0;
  for (const auto& [key, n_r] : groups) total += t_count_group(n_r, e);
  return total;
}

double qubitization_estimate(int M, double Jt, double u_over_j) {
  if (M < 1 || Jt <= 0) throw std::invalid_argument("need M >= 1 and Jt > 0");
  const double K = 11.0 * M;
  const double alpha_t = M * (4.0 + 0.75 * u_over_j) * Jt;  // alpha * t in units of 1/J
  return 2.0 * alpha_t * 4.0 * K;
}

double nisq_fidelity(double n_gates, double p) {
  if (p < 0 || p >= 1) throw std::invalid_argument("p must be in [0, 1)");
  return std::pow(1.0 - p, n_gates);
}

double nisq_required_error(double n_gates, double target_fidelity) {
  if (target_fidelity <= 0 || target_fidelity > 1)
    throw std::invalid_argument("fidelity must be in (0, 1]");
  return 1.0 - std::pow(target_fidelity, 1.0 / n_gates);
}

ResourceEstimate total_resources(const std::string& model_kind, int M, double tau_star,
                                 double t, int sweeps_per_step, double u_over_j,
                                 bool integer_steps) {
  ResourceEstimate r;
  r.model_kind = model_kind;
  r.M = M;
  r.tau_star = tau_star;
  r.t = t;
  r.sweeps_per_step = sweeps_per_step;
  r.steps = integer_steps ? std::ceil(t / tau_star) : t / tau_star;

  CircuitIR sweep;
  if (model_kind == "hubbard") {
    const int L = (int)std::llround(std::sqrt((double)M));
    if (L * L != M) throw std::invalid_argument("hubbard resource estimates need M = L^2");
    r.per_sweep = closed_form_hubbard_sweep(L);
    r.qubits = 2L * M + r.per_sweep.ancillas;
    sweep = build_hubbard_sweep(L, 1.0, u_over_j, 1.0);
  } else if (model_kind == "ising_lr") {
    r.per_sweep = closed_form_ising_long_range(M);
    r.qubits = M;
    IsingSpec s;
    s.sites = M;
    s.alpha = 2.0;
    sweep = build_ising_sweep(s, 1.0);
  } else if (model_kind == "ising_nn") {
    r.per_sweep = closed_form_ising_nn(M);
    r.qubits = M;
    IsingSpec s;
    s.sites = M;
    s.alpha = std::numeric_limits<double>::infinity();
    sweep = build_ising_sweep(s, 1.0);
  } else {
    throw std::invalid_argument("unknown model kind: " + model_kind);
  }
  r.ancillas = r.per_sweep.ancillas;

  const double factor = sweeps_per_step * r.steps;
  r.total_cnot = r.per_sweep.cnot * factor;
  r.total_rz = r.per_sweep.rz * factor;
  r.total_clifford = r.per_sweep.clifford * factor;
  r.total_cnot_depth = r.per_sweep.cnot_depth * factor;
  r.total_rz_depth = r.per_sweep.rz_depth * factor;
  r.total_clifford_depth = r.per_sweep.clifford_depth * factor;

  // synthesis budget: 1% spread across every rotation of the evolution
  r.n_sigma_r = r.total_rz;
  r.e_per_rotation = 0.01 / r.n_sigma_r;
  const double per_sweep_t = t_synthesis_count(rotation_groups(sweep), r.e_per_rotation);
  r.t_gates = per_sweep_t * factor;

  r.qubitization_K = 11.0 * M;
  r.qubitization_alpha = M * (4.0 + 0.75 * u_over_j);
  r.qubitization_t_cost = qubitization_estimate(M, t, u_over_j);
  return r;
}

std::string ResourceEstimate::to_json() const {
  std::ostringstream o;
  o << "{\n";
  o << "  \"model\": \"" << model_kind << "\",\n";
  o << "  \"M\": " << M << ",\n";
  o << "  \"tau_star\": " << format_double(tau_star) << ",\n";
  o << "  \"t\": " << format_double(t) << ",\n";
  o << "  \"sweeps_per_step\": " << sweeps_per_step << ",\n";
  o << "  \"steps\": " << format_double(steps) << ",\n";
  o << "  \"qubits\": " << qubits << ",\n";
  o << "  \"ancillas\": " << ancillas << ",\n";
  o << "  \"per_sweep\": {\"cnot\": " << per_sweep.cnot << ", \"rz\": " << per_sweep.rz
    << ", \"clifford\": " << per_sweep.clifford << ", \"cnot_depth\": " << per_sweep.cnot_depth
    << ", \"rz_depth\": " << per_sweep.rz_depth
    << ", \"clifford_depth\": " << per_sweep.clifford_depth << "},\n";
  o << "  \"totals\": {\"cnot\": " << format_double(total_cnot)
    << ", \"rz\": " << format_double(total_rz)
    << ", \"clifford\": " << format_double(total_clifford)
    << ", \"cnot_depth\": " << format_double(total_cnot_depth)
    << ", \"rz_depth\": " << format_double(total_rz_depth)
    << ", \"clifford_depth\": " << format_double(total_clifford_depth) << "},\n";
  o << "  \"totals_2sig\": {\"cnot\": " << format_double(round_2sig(total_cnot))
    << ", \"rz\": " << format_double(round_2sig(total_rz))
    << ", \"cnot_depth\": " << format_double(round_2sig(total_cnot_depth))
    << ", \"rz_depth\": " << format_double(round_2sig(total_rz_depth)) << "},\n";
  o << "  \"t_synthesis\": {\"n_sigma_r\": " << format_double(n_sigma_r)
    << ", \"e_per_rotation\": " << format_double(e_per_rotation)
    << ", \"t_gates\": " << format_double(t_gates) << "},\n";
  o << "  \"qubitization\": {\"K\": " << format_double(qubitization_K)
    << ", \"alpha\": " << format_double(qubitization_alpha)
    << ", \"t_cost\": " << format_double(qubitization_t_cost) << "}\n";
  o << "}\n";
  return o.str();
}

std::string ResourceEstimate::table_row_csv() const {
  std::ostringstream o;
  o << model_kind << "," << M << "," << format_double(tau_star) << "," << format_double(t)
    << "," << format_double(round_2sig(total_cnot)) << ","
    << format_double(round_2sig(total_cnot_depth)) << "," << format_double(round_2sig(total_rz))
    << "," << format_double(round_2sig(total_rz_depth)) << "," << format_double(total_cnot)
    << "," << format_double(total_cnot_depth) << "," << format_double(total_rz) << ","
    << format_double(total_rz_depth) << "," << format_double(t_gates) << "\n";
  return o.str();
}

}  // namespace quench
