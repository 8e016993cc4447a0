#pragma once

#include <algorithm>
#include <array>
#include <functional>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "planforge/cost.hpp"
#include "planforge/error.hpp"
#include "planforge/plan.hpp"
#include "planforge/query.hpp"
#include "planforge/report.hpp"
#include "planforge/rng.hpp"
#include "planforge/rsm.hpp"
#include "planforge/tracking.hpp"

namespace planforge {

struct GaConfig {
  int population_size = 20;
  double crossover_probability = 0.8;
  double mutation_probability = 0.2;
  Weights weights;  // aggregation fitness only
  std::uint64_t seed = 1;
  Termination termination;
};

inline void validate(const GaConfig& config) {
  if (config.population_size < 2)
    throw ConfigError("population_size must be at least 2");
  if (config.crossover_probability < 0.0 || config.crossover_probability > 1.0)
    throw ConfigError("crossover_probability must lie in [0,1]");
  if (config.mutation_probability < 0.0 || config.mutation_probability > 1.0)
    throw ConfigError("mutation_probability must lie in [0,1]");
  try {
    Weights::make(config.weights.qac, config.weights.qlc, config.weights.lpc);
  } catch (const ValidationError& e) {
    throw ConfigError(e.what());
  }
  validate_termination(config.termination);
}

struct Chromosome {
  QueryPlan plan;
  CostVector cost;
  double native = 0.0;  // score the algorithm selects on
  double sphere = 0.0;
};

// Children swap tails after `point` (1 <= point < length), so every gene
// still comes from a parent's matching position and stays valid.
inline std::pair<QueryPlan, QueryPlan> single_point_crossover(
    const QueryPlan& a, const QueryPlan& b, int point) {
  if (a.size() != b.size())
    throw ValidationError("crossover parents must have equal length");
  if (point < 1 || point >= static_cast<int>(a.size()))
    throw ValidationError("crossover point out of range");
  QueryPlan c1(a.begin(), a.begin() + point);
  c1.insert(c1.end(), b.begin() + point, b.end());
  QueryPlan c2(b.begin(), b.begin() + point);
  c2.insert(c2.end(), a.begin() + point, a.end());
  return {std::move(c1), std::move(c2)};
}

// Per-gene reset: with probability pm the gene is redrawn uniformly from
// that relation's replica sites, so mutants stay valid by construction.
inline void mutate_plan(QueryPlan& plan,
                        const std::vector<std::vector<SiteId>>& site_choices,
                        double pm, RngStream& rng) {
  for (std::size_t i = 0; i < plan.size(); ++i) {
    if (rng.uniform() < pm) {
      const auto& sites = site_choices[i];
      plan[i] = sites[rng.uniform_int(0, static_cast<int>(sites.size()) - 1)];
    }
  }
}

// Subpopulation sizes for three objectives: floor(n/3) each, remainder
// distributed one-by-one starting from the first objective (20 -> 7,7,6).
inline std::array<int, 3> vega_subgroup_sizes(int population_size) {
  if (population_size < 3)
    throw ConfigError("VEGA needs a population of at least 3");
  std::array<int, 3> sizes{};
  const int base = population_size / 3;
  const int remainder = population_size % 3;
  for (int i = 0; i < 3; ++i) sizes[i] = base + (i < remainder ? 1 : 0);
  return sizes;
}

// Binary tournament under minimization: two independent uniform picks, the
// lower key wins, ties keep the earlier index.
inline std::size_t binary_tournament(
    std::size_t population_size,
    const std::function<double(std::size_t)>& key, RngStream& rng) {
  const int n = static_cast<int>(population_size);
  const std::size_t a = static_cast<std::size_t>(rng.uniform_int(0, n - 1));
  const std::size_t b = static_cast<std::size_t>(rng.uniform_int(0, n - 1));
  if (key(a) < key(b)) return a;
  if (key(b) < key(a)) return b;
  return std::min(a, b);
}

using GaObserver =
    std::function<void(int generation, const std::vector<Chromosome>&)>;

namespace detail {

struct GaRunState {
  const std::vector<std::vector<SiteId>>* site_choices;
  const CostContext* cost;
  RunTracker* tracker;
};

inline Chromosome evaluate_chromosome(QueryPlan plan, const GaRunState& state,
                                      const Weights* weights) {
  Chromosome c;
  c.cost = state.cost->evaluate(plan);
  c.sphere = sphere_fitness(c.cost);
  c.native = weights ? weighted_fitness(c.cost, *weights) : c.sphere;
  c.plan = std::move(plan);
  state.tracker->note_evaluation(c.plan, c.sphere);
  return c;
}

inline std::size_t best_index(const std::vector<Chromosome>& population) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < population.size(); ++i)
    if (population[i].native < population[best].native) best = i;
  return best;
}

// Shared generational step: copy the elite, then fill with children from
// `next_parents`, applying crossover with probability pc and per-gene
// mutation pm. Draw order per pair: crossover coin, then the crossover
// point if it fired, then the mutation coins gene by gene per child.
inline std::vector<Chromosome> breed_generation(
    const std::vector<Chromosome>& population, const Chromosome& elite,
    const std::function<std::pair<std::size_t, std::size_t>()>& next_parents,
    const GaConfig& config, const GaRunState& state, const Weights* weights,
    RngStream& rng) {
  const int n = config.population_size;
  std::vector<Chromosome> next;
  next.reserve(n);
  next.push_back(elite);
  const int length = static_cast<int>(elite.plan.size());

  while (static_cast<int>(next.size()) < n) {
    const auto [pa, pb] = next_parents();
    QueryPlan c1 = population[pa].plan;
    QueryPlan c2 = population[pb].plan;
    if (length >= 2 && rng.uniform() < config.crossover_probability) {
      const int point = rng.uniform_int(1, length - 1);
      std::tie(c1, c2) = single_point_crossover(population[pa].plan,
                                                population[pb].plan, point);
    }
    mutate_plan(c1, *state.site_choices, config.mutation_probability, rng);
    mutate_plan(c2, *state.site_choices, config.mutation_probability, rng);
    next.push_back(evaluate_chromosome(std::move(c1), state, weights));
    if (static_cast<int>(next.size()) < n)
      next.push_back(evaluate_chromosome(std::move(c2), state, weights));
  }
  return next;
}

inline void close_ga_iteration(RunTracker& tracker, int generation,
                               const std::vector<Chromosome>& population) {
  double best_native = population.front().native;
  double best_sphere = population.front().sphere;
  for (const auto& c : population) {
    best_native = std::min(best_native, c.native);
    best_sphere = std::min(best_sphere, c.sphere);
  }
  tracker.close_iteration(generation, best_native, best_sphere);
}

inline OptimizationReport finish_ga_report(
    const std::string& algorithm, const GaConfig& config,
    std::vector<Chromosome> population, const RunTracker& tracker,
    const std::string& reason) {
  OptimizationReport report;
  report.algorithm = algorithm;
  report.mode = "discrete";
  report.config = {
      {"algorithm", algorithm},
      {"mode", "discrete"},
      {"population_size", config.population_size},
      {"crossover_probability", config.crossover_probability},
      {"mutation_probability", config.mutation_probability},
      {"weights",
       {config.weights.qac, config.weights.qlc, config.weights.lpc}},
      {"seed", config.seed},
      {"max_iterations", config.termination.max_iterations},
      {"top_k", config.termination.top_k},
      {"qc_threshold", config.termination.qc_threshold},
      {"stagnation_window", config.termination.stagnation_window},
  };

  std::stable_sort(population.begin(), population.end(),
                   [](const Chromosome& a, const Chromosome& b) {
                     if (a.native != b.native) return a.native < b.native;
                     return a.plan < b.plan;
                   });
  for (auto& c : population)
    report.ranked.push_back({std::move(c.plan), c.cost, c.native, c.sphere});

  report.trace = tracker.trace();
  report.iterations_to_topk = tracker.iterations_to_topk();
  report.termination_reason = reason;
  report.evaluations = tracker.evaluations();
  return report;
}

// Initial population: uniform valid plans, deduplicated best-effort.
inline std::vector<Chromosome> ga_init(const GaConfig& config,
                                       const GaRunState& state,
                                       const Weights* weights,
                                       RngStream& rng) {
  std::vector<Chromosome> population;
  population.reserve(config.population_size);
  std::set<QueryPlan> seen;
  int retries = 0;
  const int max_retries = 20 * config.population_size;
  while (static_cast<int>(population.size()) < config.population_size) {
    QueryPlan plan = sample_plan(*state.site_choices, rng);
    if (seen.count(plan) != 0 && retries < max_retries) {
      ++retries;
      continue;
    }
    seen.insert(plan);
    population.push_back(evaluate_chromosome(std::move(plan), state, weights));
  }
  return population;
}

template <typename MakeParentSelector>
OptimizationReport run_ga_common(const RelationSiteMatrix& rsm,
                                 const Catalog& catalog, const Query& query,
                                 const GaConfig& config,
                                 const std::string& algorithm,
                                 const Weights* weights,
                                 const std::function<std::size_t(
                                     const std::vector<Chromosome>&)>& pick_elite,
                                 MakeParentSelector make_parent_selector,
                                 const GaObserver& observer) {
  validate(config);
  const auto choices = site_choices_for(rsm, query);
  const CostContext cost(catalog, query);
  RngStream rng(config.seed);
  RunTracker tracker(config.termination.top_k,
                     config.termination.qc_threshold);
  GaRunState state{&choices, &cost, &tracker};

  std::vector<Chromosome> population = ga_init(config, state, weights, rng);
  close_ga_iteration(tracker, 0, population);
  if (observer) observer(0, population);

  std::string reason;
  auto stop_now = [&]() {
    if (config.termination.top_k > 0 && tracker.topk_reached()) {
      reason = "top_k";
      return true;
    }
    if (tracker.stagnated(config.termination.stagnation_window)) {
      reason = "stagnation";
      return true;
    }
    return false;
  };

  if (!stop_now()) {
    for (int g = 1; g <= config.termination.max_iterations; ++g) {
      const Chromosome elite = population[pick_elite(population)];
      auto next_parents = make_parent_selector(population, rng);
      population = breed_generation(population, elite, next_parents, config,
                                    state, weights, rng);
      close_ga_iteration(tracker, g, population);
      if (observer) observer(g, population);
      if (stop_now()) break;
    }
    if (reason.empty()) reason = "max_iterations";
  }

  return finish_ga_report(algorithm, config, std::move(population), tracker,
                          reason);
}

}  // namespace detail

// Single-objective GA over the weighted aggregation of the three costs:
// binary tournament selection, single-point crossover, per-gene mutation,
// elitism of one.
inline OptimizationReport run_ga_aggregation(const RelationSiteMatrix& rsm,
                                             const Catalog& catalog,
                                             const Query& query,
                                             const GaConfig& config,
                                             const GaObserver& observer = {}) {
  auto make_selector = [](const std::vector<Chromosome>& population,
                          RngStream& rng) {
    return [&population, &rng]() -> std::pair<std::size_t, std::size_t> {
      auto key = [&population](std::size_t i) {
        return population[i].native;
      };
      const std::size_t a = binary_tournament(population.size(), key, rng);
      const std::size_t b = binary_tournament(population.size(), key, rng);
      return {a, b};
    };
  };
  auto pick_elite = [](const std::vector<Chromosome>& population) {
    return detail::best_index(population);
  };
  return detail::run_ga_common(rsm, catalog, query, config, "agga",
                               &config.weights, pick_elite, make_selector,
                               observer);
}

// VEGA: selection is partitioned into three subpopulations, each running
// binary tournaments on a single objective (qac, qlc, lpc); the pooled
// parents are shuffled, then crossover/mutation proceed as in the
// aggregation GA. The elite and the final ranking use sphere fitness, the
// cross-algorithm comparison score.
inline OptimizationReport run_vega(const RelationSiteMatrix& rsm,
                                   const Catalog& catalog, const Query& query,
                                   const GaConfig& config,
                                   const GaObserver& observer = {}) {
  vega_subgroup_sizes(config.population_size);  // validates size >= 3

  auto make_selector = [](const std::vector<Chromosome>& population,
                          RngStream& rng) {
    const auto sizes = vega_subgroup_sizes(static_cast<int>(population.size()));
    std::vector<std::size_t> pool;
    pool.reserve(population.size());
    for (int objective = 0; objective < 3; ++objective) {
      auto key = [&population, objective](std::size_t i) {
        const CostVector& cv = population[i].cost;
        return objective == 0 ? cv.qac : objective == 1 ? cv.qlc : cv.lpc;
      };
      for (int s = 0; s < sizes[objective]; ++s)
        pool.push_back(binary_tournament(population.size(), key, rng));
    }
    // Fisher-Yates so mates mix across objectives
    for (std::size_t i = pool.size() - 1; i > 0; --i) {
      const std::size_t j =
          static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(i)));
      std::swap(pool[i], pool[j]);
    }
    auto cursor = std::make_shared<std::size_t>(0);
    return [pool, cursor]() -> std::pair<std::size_t, std::size_t> {
      const std::size_t a = pool[*cursor % pool.size()];
      const std::size_t b = pool[(*cursor + 1) % pool.size()];
      *cursor += 2;
      return {a, b};
    };
  };
  auto pick_elite = [](const std::vector<Chromosome>& population) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < population.size(); ++i)
      if (population[i].sphere < population[best].sphere) best = i;
    return best;
  };
  return detail::run_ga_common(rsm, catalog, query, config, "vega", nullptr,
                               pick_elite, make_selector, observer);
}

}  // namespace planforge
