// Command-line front end: optimize | oracle | generate | sweep.
//
// Exit codes: 0 success, 1 runtime failure, 2 validation/usage error,
// 3 plan-space saturation.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "planforge/planforge.hpp"

namespace {

planforge::Weights parse_weights(const std::string& text) {
  std::vector<double> parts;
  std::istringstream in(text);
  std::string field;
  while (std::getline(in, field, ',')) {
    try {
      std::size_t pos = 0;
      parts.push_back(std::stod(field, &pos));
      if (pos != field.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw planforge::ValidationError("--weights must be three numbers, got '" +
                                       text + "'");
    }
  }
  if (parts.size() != 3)
    throw planforge::ValidationError(
        "--weights must be three comma-separated numbers, got '" + text + "'");
  return planforge::Weights::make(parts[0], parts[1], parts[2]);
}

int threads_from_env() {
  const char* raw = std::getenv("PLANFORGE_THREADS");
  if (raw == nullptr || *raw == '\0') return 0;
  try {
    std::size_t pos = 0;
    const int value = std::stoi(raw, &pos);
    if (pos != std::string(raw).size() || value < 0)
      throw std::invalid_argument("negative");
    return value;
  } catch (const std::exception&) {
    throw planforge::ValidationError(
        std::string("PLANFORGE_THREADS must be a nonnegative integer, got '") +
        raw + "'");
  }
}

struct OptimizeArgs {
  std::string rsm_path, catalog_path, query_path;
  std::string algo;
  std::string mode = "discrete";
  int k = 0;
  double qc = 0.0;
  int iters = 100;
  int pop = 20;
  std::uint64_t seed = 1;
  double pc = 0.8;
  double pm = 0.2;
  std::string weights = "0.2,0.5,0.3";
  int stagnation = 0;
  std::string out = "report.json";
};

int cmd_optimize(const OptimizeArgs& args) {
  const planforge::Instance inst = planforge::load_instance(
      args.rsm_path, args.catalog_path, args.query_path);

  planforge::Termination term;
  term.max_iterations = args.iters;
  term.top_k = args.k;
  term.qc_threshold = args.qc;
  term.stagnation_window = args.stagnation;

  planforge::OptimizationReport report;
  if (args.algo == "tlbo") {
    planforge::TlboConfig config;
    config.population_size = args.pop;
    config.mode = args.mode == "faithful" ? planforge::TlboMode::faithful
                                          : planforge::TlboMode::discrete;
    config.seed = args.seed;
    config.termination = term;
    report = planforge::run_tlbo(inst.rsm, inst.catalog, inst.query, config);
  } else {
    if (args.mode == "faithful")
      throw planforge::ConfigError(
          "--mode faithful applies only to --algo tlbo");
    planforge::GaConfig config;
    config.population_size = args.pop;
    config.crossover_probability = args.pc;
    config.mutation_probability = args.pm;
    config.weights = parse_weights(args.weights);
    config.seed = args.seed;
    config.termination = term;
    report = args.algo == "agga"
                 ? planforge::run_ga_aggregation(inst.rsm, inst.catalog,
                                                 inst.query, config)
                 : planforge::run_vega(inst.rsm, inst.catalog, inst.query,
                                       config);
  }

  std::ofstream out(args.out, std::ios::binary);
  if (!out)
    throw planforge::ValidationError("cannot write report to " + args.out);
  out << planforge::to_json(report).dump(2) << '\n';
  out.close();

  std::cout << "algorithm: " << report.algorithm << " (" << report.mode
            << ")\n"
            << "termination: " << report.termination_reason << " after "
            << (report.trace.empty() ? 0 : report.trace.back().iteration)
            << " iterations\n"
            << "evaluations: " << report.evaluations << '\n';
  if (report.iterations_to_topk)
    std::cout << "iterations_to_topk: " << *report.iterations_to_topk << '\n';
  else if (term.top_k > 0)
    std::cout << "iterations_to_topk: not reached\n";
  std::cout << "best plans:\n";
  const std::size_t show = std::min<std::size_t>(5, report.ranked.size());
  for (std::size_t i = 0; i < show; ++i) {
    const auto& r = report.ranked[i];
    std::printf("  %zu. %s  qac=%.4f qlc=%.4f lpc=%.4f fitness=%.4f control=S%d\n",
                i + 1, planforge::format_plan(r.plan).c_str(), r.cost.qac,
                r.cost.qlc, r.cost.lpc, r.fitness, r.cost.control_site);
  }
  std::cout << "report written to " << args.out << '\n';
  return 0;
}

struct OracleArgs {
  std::string rsm_path, catalog_path, query_path;
  int k = 10;
  std::string fitness = "sphere";
  std::string weights = "0.2,0.5,0.3";
  std::uint64_t bound = planforge::kDefaultPlanBound;
  std::string out;
};

int cmd_oracle(const OracleArgs& args) {
  const planforge::Instance inst = planforge::load_instance(
      args.rsm_path, args.catalog_path, args.query_path);
  const planforge::FitnessSpec fitness =
      args.fitness == "weighted"
          ? planforge::FitnessSpec::weighted(parse_weights(args.weights))
          : planforge::FitnessSpec::sphere();
  const auto plans = planforge::exact_topk(
      inst.rsm, inst.catalog, inst.query, static_cast<std::size_t>(args.k),
      fitness, args.bound);
  if (args.out.empty()) {
    planforge::write_oracle_csv(plans, std::cout);
  } else {
    std::ofstream out(args.out, std::ios::binary);
    if (!out)
      throw planforge::ValidationError("cannot write CSV to " + args.out);
    planforge::write_oracle_csv(plans, out);
  }
  return 0;
}

struct GenerateArgs {
  int sites = 0;
  int relations = 0;
  int degree = 0;
  std::uint64_t seed = 1;
  std::string out;
};

int cmd_generate(const GenerateArgs& args) {
  planforge::GenerateSpec spec;
  spec.n_sites = args.sites;
  spec.n_relations = args.relations;
  spec.replication_degree = args.degree;
  spec.seed = args.seed;
  const planforge::Instance inst = planforge::generate_instance(spec);
  planforge::write_instance(inst, args.out);
  const auto count = planforge::count_plans(inst.rsm, inst.query);
  std::cout << "instance written to " << args.out << " (plan space: ";
  if (count.saturated)
    std::cout << "over " << planforge::kDefaultPlanBound;
  else
    std::cout << count.value;
  std::cout << " plans)\n";
  return 0;
}

struct SweepArgs {
  std::string spec_path;
  std::string out;
};

int cmd_sweep(const SweepArgs& args) {
  const planforge::SweepSpec spec = planforge::load_sweep_spec(
      planforge::read_text_file(args.spec_path), args.spec_path);
  const int threads = threads_from_env();
  const auto rows = planforge::run_sweep(spec, threads);
  if (args.out.empty()) {
    planforge::write_sweep_csv(rows, std::cout);
  } else {
    std::ofstream out(args.out, std::ios::binary);
    if (!out)
      throw planforge::ValidationError("cannot write CSV to " + args.out);
    planforge::write_sweep_csv(rows, out);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distributed query-plan optimization toolkit"};
  app.require_subcommand(1);

  OptimizeArgs opt;
  CLI::App* optimize = app.add_subcommand(
      "optimize", "Search for low-cost site-assignment plans");
  optimize->add_option("--rsm", opt.rsm_path, "Allocation matrix CSV")
      ->required();
  optimize->add_option("--catalog", opt.catalog_path, "Statistics catalog")
      ->required();
  optimize->add_option("--query", opt.query_path, "Query file")->required();
  optimize->add_option("--algo", opt.algo, "Optimizer")
      ->required()
      ->check(CLI::IsMember({"tlbo", "agga", "vega"}));
  optimize->add_option("--mode", opt.mode, "TLBO search space")
      ->check(CLI::IsMember({"faithful", "discrete"}));
  optimize->add_option("--k", opt.k, "Top-K target (0 disables)");
  optimize->add_option("--qc", opt.qc, "Fitness threshold for the Top-K count");
  optimize->add_option("--iters", opt.iters, "Iteration budget");
  optimize->add_option("--pop", opt.pop, "Population size");
  optimize->add_option("--seed", opt.seed, "Random seed");
  optimize->add_option("--pc", opt.pc, "Crossover probability (GA)");
  optimize->add_option("--pm", opt.pm, "Mutation probability (GA)");
  optimize->add_option("--weights", opt.weights,
                       "Aggregation weights qac,qlc,lpc (GA)");
  optimize->add_option("--stagnation", opt.stagnation,
                       "Stop after this many iterations without improvement "
                       "(0 disables)");
  optimize->add_option("--out", opt.out, "Report path (JSON)");

  OracleArgs orc;
  CLI::App* oracle = app.add_subcommand(
      "oracle", "Exhaustively rank the k best plans");
  oracle->add_option("--rsm", orc.rsm_path, "Allocation matrix CSV")
      ->required();
  oracle->add_option("--catalog", orc.catalog_path, "Statistics catalog")
      ->required();
  oracle->add_option("--query", orc.query_path, "Query file")->required();
  oracle->add_option("--k", orc.k, "Number of plans to keep")
      ->check(CLI::NonNegativeNumber);
  oracle->add_option("--fitness", orc.fitness, "Ranking fitness")
      ->check(CLI::IsMember({"sphere", "weighted"}));
  oracle->add_option("--weights", orc.weights,
                     "Weights for --fitness weighted");
  oracle->add_option("--bound", orc.bound, "Enumeration bound on plan count");
  oracle->add_option("--out", orc.out, "CSV path (default stdout)");

  GenerateArgs gen;
  CLI::App* generate = app.add_subcommand(
      "generate", "Write a random reproducible instance");
  generate->add_option("--sites", gen.sites, "Number of sites")->required();
  generate->add_option("--relations", gen.relations, "Number of relations")
      ->required();
  generate->add_option("--degree", gen.degree,
                       "Replica sites per relation")
      ->required();
  generate->add_option("--seed", gen.seed, "Random seed");
  generate->add_option("--out", gen.out, "Output directory")->required();

  SweepArgs swp;
  CLI::App* sweep = app.add_subcommand(
      "sweep", "Run an experiment grid from a JSON spec");
  sweep->add_option("spec", swp.spec_path, "Sweep spec (JSON)")->required();
  sweep->add_option("--out", swp.out, "CSV path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (app.got_subcommand(optimize)) return cmd_optimize(opt);
    if (app.got_subcommand(oracle)) return cmd_oracle(orc);
    if (app.got_subcommand(generate)) return cmd_generate(gen);
    if (app.got_subcommand(sweep)) return cmd_sweep(swp);
    std::cerr << "no subcommand selected\n";
    return 2;
  } catch (const planforge::SaturationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const planforge::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const planforge::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const planforge::SemanticError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const planforge::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
