// Command-line front end: reproducible experiment campaigns from JSON configs.
//
//   quenchsim <subcommand> --config <path> [--seed N] [--out DIR] [--threads N]
//
// Exit codes: 0 success, 1 validation error, 2 runtime failure.
#include <cstdio>
#include <set>
#include <string>

#include <CLI11.hpp>

#include "quench/campaign.hpp"
#include "quench/util.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string out;
  int threads = 0;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "campaign config file (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--seed", args.seed, "override the config seed")
      ->each([&args](const std::string&) { args.seed_set = true; });
  cmd->add_option("--out", args.out, "output directory (overrides config)");
  cmd->add_option("--threads", args.threads, "worker threads (overrides config)");
}

int run(const CommonArgs& args, const std::set<std::string>& allowed_experiments) {
  quench::CampaignConfig config;
  try {
    config = quench::CampaignConfig::parse(quench::read_text_file(args.config_path));
    if (!allowed_experiments.count(config.experiment)) {
      std::fprintf(stderr, "experiment '%s' does not belong to this subcommand\n",
                   config.experiment.c_str());
      return 1;
    }
    if (args.seed_set) config.seed = args.seed;
    if (!args.out.empty()) config.out_dir = args.out;
    if (args.threads > 0) config.threads = args.threads;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  }
  try {
    return quench::run_campaign(config);
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "validation error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "runtime failure: %s\n", e.what());
    return 2;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"quench-dynamics error budgets and fault-tolerant resource estimates"};
  app.require_subcommand(1);

  CommonArgs sim_args, budget_args, tau_args, res_args, lattice_args;
  CLI::App* simulate = app.add_subcommand("simulate", "single evolution, observable series");
  add_common(simulate, sim_args);
  CLI::App* budget = app.add_subcommand(
      "error-budget", "calibration / laser / decoherence / defect / extra-term channels");
  add_common(budget, budget_args);
  CLI::App* ctau = app.add_subcommand("critical-tau", "Trotter error budget intersection");
  add_common(ctau, tau_args);
  CLI::App* resources = app.add_subcommand("resources", "gate counts, depths, T-gate costs");
  add_common(resources, res_args);
  CLI::App* lattice = app.add_subcommand("calibrate-lattice", "J(V), U(V) Wannier table");
  add_common(lattice, lattice_args);
  bool verbose = false;
  CLI::App* verify = app.add_subcommand("verify", "run the oracle self-check suites");
  verify->add_flag("--verbose", verbose, "print details");

  CLI11_PARSE(app, argc, argv);

  if (simulate->parsed())
    return run(sim_args, {"simulate", "trotter_scan", "truncation_study"});
  if (budget->parsed())
    return run(budget_args,
               {"calibration", "laser_noise", "decoherence", "prep_defect", "extra_terms"});
  if (ctau->parsed()) return run(tau_args, {"critical_tau"});
  if (resources->parsed()) return run(res_args, {"resources", "qubitization"});
  if (lattice->parsed()) return run(lattice_args, {"calibrate_lattice"});
  if (verify->parsed()) {
    const int failures = quench::run_verify(verbose);
    std::printf("%s\n", failures == 0 ? "all checks passed" : "some checks FAILED");
    return failures == 0 ? 0 : 2;
  }
  return 1;
}
