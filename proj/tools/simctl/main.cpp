// simctl — scenario-driven simulator CLI.
//
//   simctl simulate --scenario <file> --out <dir> [--seed N] [--rounds N] [--audit]
//   simctl validate --chain <file>
//   simctl replay   --chain <file> --out <dir> [--scenario <file>]
//
// Exit codes: 0 success, 2 validation failure, 3 invalid chain.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "xrgsim/chain_io.hpp"
#include "xrgsim/metrics.hpp"
#include "xrgsim/scenario.hpp"
#include "xrgsim/simulation.hpp"

namespace fs = std::filesystem;
using namespace xrg;

namespace {

constexpr int kOk = 0;
constexpr int kValidationFailure = 2;
constexpr int kInvalidChain = 3;

bool write_file(const fs::path& path, const auto& writer) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    std::cerr << "error: cannot write " << path << "\n";
    return false;
  }
  writer(out);
  return out.good();
}

int write_run_outputs(const fs::path& out_dir, const MetricsSummary& metrics,
                      const LiveStats* live, const std::string& scenario_name) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) {
    std::cerr << "error: cannot create output directory " << out_dir << ": "
              << ec.message() << "\n";
    return kValidationFailure;
  }
  const bool ok =
      write_file(out_dir / "metrics.csv",
                 [&](std::ostream& o) { write_metrics_csv(metrics, o); }) &&
      write_file(out_dir / "summary.json", [&](std::ostream& o) {
        write_summary_json(metrics, live, scenario_name, o);
      });
  return ok ? kOk : kValidationFailure;
}

int cmd_simulate(const std::string& scenario_path, const std::string& out_dir,
                 std::optional<std::uint64_t> seed, std::optional<std::uint64_t> rounds,
                 bool audit) {
  ScenarioConfig config;
  try {
    config = load_scenario(scenario_path);
  } catch (const ScenarioParseError& e) {
    std::cerr << "scenario parse error: " << e.what() << "\n";
    return kValidationFailure;
  } catch (const ScenarioValidationError& e) {
    std::cerr << "scenario validation error: " << e.what() << "\n";
    return kValidationFailure;
  }
  if (seed) config.seed = *seed;
  if (rounds) config.rounds = *rounds;

  const RunResult result = run_simulation(config);

  const fs::path out(out_dir);
  const int rc = write_run_outputs(out, result.metrics, &result.live, config.name);
  if (rc != kOk) return rc;
  if (!write_file(out / "chain.jsonl",
                  [&](std::ostream& o) { export_chain(result.chain, o); })) {
    return kValidationFailure;
  }

  if (audit) {
    const PermissionTable permissions = config.build_permissions();
    const ReplayAudit replay = replay_audit(result.chain, permissions, config.ledger);
    MetricsSummary live_view = result.metrics;
    live_view.fork_events = 0;          // network observations; a replay of one
    live_view.first_fork_round.reset();  // replica cannot see the fork
    if (!(live_view == replay.metrics) || !(replay.final_token == result.final_token)) {
      std::cerr << "audit FAILED: replay of the exported chain disagrees with the live run\n";
      return kValidationFailure;
    }
    if (!write_file(out / "token_audit.jsonl", [&](std::ostream& o) {
          write_token_audit(result.chain, permissions, config.ledger, o);
        })) {
      return kValidationFailure;
    }
    std::cout << "audit OK: replay matches live metrics and balances\n";
  }

  std::cout << "scenario '" << config.name << "': " << result.metrics.blocks_finalized
            << " blocks finalized over " << config.rounds << " rounds, "
            << result.metrics.total_fills << " fills, " << result.metrics.fork_events
            << " fork events\n"
            << "outputs in " << out.string() << "\n";
  return kOk;
}

int cmd_validate(const std::string& chain_path) {
  Chain chain;
  try {
    chain = import_chain_file(chain_path);
  } catch (const ChainIoError& e) {
    std::cerr << "invalid chain: " << e.what() << "\n";
    return kInvalidChain;
  }
  const ChainValidity verdict = validate_chain(chain);
  if (!verdict.valid) {
    std::cout << "invalid: first bad height " << verdict.first_bad_height << "\n";
    return kInvalidChain;
  }
  std::cout << "valid: " << chain.blocks().size() << " blocks, tip height "
            << chain.tip_height() << ", tip hash " << chain.tip_hash().to_hex() << "\n";
  return kOk;
}

int cmd_replay(const std::string& chain_path, const std::string& out_dir,
               const std::string& scenario_path) {
  Chain chain;
  try {
    chain = import_chain_file(chain_path);
  } catch (const ChainIoError& e) {
    std::cerr << "invalid chain: " << e.what() << "\n";
    return kInvalidChain;
  }
  const ChainValidity verdict = validate_chain(chain);
  if (!verdict.valid) {
    std::cerr << "invalid chain: first bad height " << verdict.first_bad_height << "\n";
    return kInvalidChain;
  }

  PermissionTable permissions;
  LedgerConfig ledger;
  std::string name = fs::path(chain_path).stem().string();
  if (!scenario_path.empty()) {
    try {
      const ScenarioConfig config = load_scenario(scenario_path);
      permissions = config.build_permissions();
      ledger = config.ledger;
      name = config.name;
    } catch (const ScenarioParseError& e) {
      std::cerr << "scenario parse error: " << e.what() << "\n";
      return kValidationFailure;
    } catch (const ScenarioValidationError& e) {
      std::cerr << "scenario validation error: " << e.what() << "\n";
      return kValidationFailure;
    }
  } else {
    permissions = infer_permissions(chain, ledger);
  }

  const ReplayAudit audit = replay_audit(chain, permissions, ledger);
  const fs::path out(out_dir);
  const int rc = write_run_outputs(out, audit.metrics, nullptr, name);
  if (rc != kOk) return rc;
  if (!write_file(out / "token_audit.jsonl", [&](std::ostream& o) {
        write_token_audit(chain, permissions, ledger, o);
      })) {
    return kValidationFailure;
  }
  std::cout << "replayed " << chain.blocks().size() << " blocks: "
            << audit.metrics.total_fills << " fills, final supply "
            << audit.metrics.final_total_supply << " units\n"
            << "outputs in " << out.string() << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"xrgsim: deterministic permissioned energy-market blockchain simulator"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string chain_path;
  std::string out_dir;
  std::string replay_scenario;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> rounds;
  bool audit = false;

  auto* simulate = app.add_subcommand("simulate", "Run a scenario and export chain + metrics");
  simulate->add_option("--scenario", scenario_path, "Scenario file (JSON)")->required();
  simulate->add_option("--out", out_dir, "Output directory")->required();
  simulate->add_option("--seed", seed, "Override the scenario RNG seed");
  simulate->add_option("--rounds", rounds, "Override the scenario round count");
  simulate->add_flag("--audit", audit, "Replay the exported chain and verify it matches");

  auto* validate = app.add_subcommand("validate", "Check an exported chain's hash links");
  validate->add_option("--chain", chain_path, "Chain export (JSON Lines)")->required();

  auto* replay = app.add_subcommand("replay", "Recompute metrics and balances from a chain");
  replay->add_option("--chain", chain_path, "Chain export (JSON Lines)")->required();
  replay->add_option("--out", out_dir, "Output directory")->required();
  replay->add_option("--scenario", replay_scenario,
                     "Scenario file for permissions/constants (otherwise inferred)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) return cmd_simulate(scenario_path, out_dir, seed, rounds, audit);
    if (validate->parsed()) return cmd_validate(chain_path);
    if (replay->parsed()) return cmd_replay(chain_path, out_dir, replay_scenario);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidationFailure;
  }
  return kOk;
}
