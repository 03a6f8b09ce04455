// Command-line front end: solve a scenario, simulate a solved policy, run an
// epsilon sweep, or emit one of the canned figure data files.

#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mmcast/errors.hpp"
#include "mmcast/sweep.hpp"

namespace {

std::ofstream open_output(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw mmcast::validation_error("cannot open output file '" + path + "'");
  return os;
}

int run(int argc, char** argv) {
  CLI::App app{"mmWave directional multicast planner"};
  app.require_subcommand(1);

  std::string scenario_path, policy_path, output_path = "-";
  std::string kind_str = "hierarchical";
  double epsilon = 0.0;
  long n_runs = 10000;
  std::uint64_t seed = 1;
  std::vector<double> epsilons;
  bool allow_large_n = false;
  int figure_id = 0;

  auto add_scenario = [&](CLI::App* cmd) {
    cmd->add_option("scenario", scenario_path, "scenario JSON file")
        ->required()
        ->check(CLI::ExistingFile);
  };

  CLI::App* solve = app.add_subcommand("solve", "solve a policy and dump it");
  add_scenario(solve);
  solve->add_option("--policy", kind_str, "exact|unicast|broadcast|hierarchical");
  solve->add_option("--epsilon", epsilon, "per-user deadline penalty (seconds)")
      ->required();
  solve->add_option("-o,--output", output_path, "dump path ('-' = stdout)");
  solve->add_flag("--allow-large-n", allow_large_n,
                  "lift the exact solver's 4-user refusal");

  CLI::App* simulate = app.add_subcommand("simulate", "run a dumped policy");
  add_scenario(simulate);
  simulate->add_option("policy_file", policy_path, "policy dump from 'solve'")
      ->required()
      ->check(CLI::ExistingFile);
  simulate->add_option("--runs", n_runs, "number of episodes");
  simulate->add_option("--seed", seed, "RNG seed");
  simulate->add_option("--epsilon", epsilon, "penalty used in the realized cost");

  CLI::App* sweep_cmd = app.add_subcommand("sweep", "epsilon sweep to CSV");
  add_scenario(sweep_cmd);
  sweep_cmd->add_option("--policy", kind_str, "exact|unicast|broadcast|hierarchical");
  sweep_cmd->add_option("--epsilons", epsilons, "explicit grid (default: log grid)");
  sweep_cmd->add_option("--runs", n_runs, "episodes per point");
  sweep_cmd->add_option("--seed", seed, "RNG seed");
  sweep_cmd->add_option("-o,--output", output_path, "CSV path ('-' = stdout)");

  CLI::App* figure = app.add_subcommand("figure", "emit a canned figure data file");
  figure->add_option("id", figure_id, "figure recipe: 2, 3, or 5")->required();
  add_scenario(figure);
  figure->add_option("--runs", n_runs, "episodes per point");
  figure->add_option("--seed", seed, "RNG seed");
  figure->add_option("-o,--output", output_path, "CSV path ('-' = stdout)");

  CLI11_PARSE(app, argc, argv);

  auto write_rows = [&](const std::vector<mmcast::SweepRow>& rows) {
    if (output_path == "-") {
      mmcast::write_csv(rows, std::cout);
    } else {
      std::ofstream os = open_output(output_path);
      mmcast::write_csv(rows, os);
    }
  };

  if (solve->parsed()) {
    mmcast::Scenario scenario = mmcast::load_scenario(scenario_path);
    mmcast::SolveOptions options;
    options.allow_large_n = allow_large_n;
    std::unique_ptr<mmcast::Policy> policy = mmcast::solve_policy(
        scenario, mmcast::policy_kind_from_string(kind_str), epsilon, options);
    if (output_path == "-") {
      policy->dump(std::cout);
    } else {
      std::ofstream os = open_output(output_path);
      policy->dump(os);
    }
    std::cerr << "J0 = " << policy->expected_cost() << "\n";
    return 0;
  }

  if (simulate->parsed()) {
    mmcast::Scenario scenario = mmcast::load_scenario(scenario_path);
    std::ifstream is(policy_path);
    std::unique_ptr<mmcast::Policy> policy = mmcast::load_policy(is, scenario);
    mmcast::SimConfig cfg;
    cfg.n_runs = n_runs;
    cfg.seed = seed;
    cfg.mode = scenario.reception_mode;
    cfg.epsilon = epsilon;
    mmcast::SimStats st = mmcast::simulate(*policy, scenario, cfg);
    std::cout.precision(17);
    std::cout << "policy " << policy->kind() << "\n"
              << "runs " << st.n_runs << "\n"
              << "mean_duration_s " << st.mean_duration_s << " +/- "
              << st.ci95_duration_s << "\n"
              << "mean_failures " << st.mean_failures << " +/- " << st.ci95_failures
              << "\n"
              << "mean_cost " << st.mean_cost << " (se " << st.se_cost << ")\n"
              << "J0 " << policy->expected_cost() << "\n";
    return 0;
  }

  if (sweep_cmd->parsed()) {
    mmcast::Scenario scenario = mmcast::load_scenario(scenario_path);
    mmcast::SimConfig cfg;
    cfg.n_runs = n_runs;
    cfg.seed = seed;
    std::vector<double> grid =
        epsilons.empty() ? mmcast::default_epsilon_grid(scenario) : epsilons;
    write_rows(mmcast::sweep(scenario, mmcast::policy_kind_from_string(kind_str), grid,
                             cfg));
    return 0;
  }

  if (figure->parsed()) {
    mmcast::Scenario scenario = mmcast::load_scenario(scenario_path);
    mmcast::SimConfig cfg;
    cfg.n_runs = n_runs;
    cfg.seed = seed;
    switch (figure_id) {
      case 2: write_rows(mmcast::figure2_rows(scenario, cfg)); break;
      case 3: write_rows(mmcast::figure3_rows(scenario, cfg)); break;
      case 5: write_rows(mmcast::figure5_rows(scenario, cfg)); break;
      default:
        throw mmcast::validation_error("figure id must be 2, 3, or 5");
    }
    return 0;
  }

  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const mmcast::capacity_error& e) {
    std::cerr << "capacity error: " << e.what() << "\n";
    return 3;
  } catch (const mmcast::numerical_error& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 4;
  } catch (const mmcast::validation_error& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
