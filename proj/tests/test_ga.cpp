#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "fixtures.hpp"
#include "planforge/planforge.hpp"

using namespace planforge;

TEST_CASE("single point crossover swaps tails") {
  const QueryPlan a{1, 1, 2, 2, 2, 3, 5, 3};
  const QueryPlan b{3, 5, 7, 8, 15, 3, 5, 3};
  const auto [c1, c2] = single_point_crossover(a, b, 4);
  CHECK(c1 == QueryPlan{1, 1, 2, 2, 15, 3, 5, 3});
  CHECK(c2 == QueryPlan{3, 5, 7, 8, 2, 3, 5, 3});

  SECTION("every cut point keeps genes at their positions") {
    for (int point = 1; point < 8; ++point) {
      const auto [x, y] = single_point_crossover(a, b, point);
      for (int i = 0; i < 8; ++i) {
        CHECK((x[i] == a[i] || x[i] == b[i]));
        CHECK((y[i] == a[i] || y[i] == b[i]));
      }
    }
  }
  SECTION("out-of-range points are rejected") {
    CHECK_THROWS_AS(single_point_crossover(a, b, 0), ValidationError);
    CHECK_THROWS_AS(single_point_crossover(a, b, 8), ValidationError);
    CHECK_THROWS_AS(single_point_crossover(a, {1, 2}, 1), ValidationError);
  }
}

TEST_CASE("mutation redraws genes only from replica sites") {
  const auto inst = fixtures::reference_instance();
  const auto choices = site_choices_for(inst.rsm, inst.query);
  const QueryPlan original{1, 1, 2, 2, 2, 3, 5, 3};

  SECTION("probability zero leaves the plan alone") {
    QueryPlan plan = original;
    RngStream rng(1);
    mutate_plan(plan, choices, 0.0, rng);
    CHECK(plan == original);
  }
  SECTION("mutants are always valid") {
    RngStream rng(2);
    for (int i = 0; i < 200; ++i) {
      QueryPlan plan = original;
      mutate_plan(plan, choices, 0.5, rng);
      CHECK(plan_is_valid(plan, inst.rsm, inst.query));
    }
  }
  SECTION("draw order: per gene a coin, then the redraw") {
    RngStream rng(3), shadow(3);
    QueryPlan plan = original;
    mutate_plan(plan, choices, 1.0, rng);
    for (std::size_t i = 0; i < plan.size(); ++i) {
      shadow.uniform();  // the coin, always below pm = 1
      const auto& sites = choices[i];
      const int idx =
          shadow.uniform_int(0, static_cast<int>(sites.size()) - 1);
      CHECK(plan[i] == sites[idx]);
    }
  }
}

TEST_CASE("vega subgroup sizes split the population near-evenly") {
  CHECK(vega_subgroup_sizes(20) == std::array<int, 3>{7, 7, 6});
  CHECK(vega_subgroup_sizes(21) == std::array<int, 3>{7, 7, 7});
  CHECK(vega_subgroup_sizes(22) == std::array<int, 3>{8, 7, 7});
  CHECK(vega_subgroup_sizes(3) == std::array<int, 3>{1, 1, 1});
  CHECK_THROWS_AS(vega_subgroup_sizes(2), ConfigError);
  for (int n = 3; n < 50; ++n) {
    const auto sizes = vega_subgroup_sizes(n);
    CHECK(sizes[0] + sizes[1] + sizes[2] == n);
    CHECK(sizes[0] - sizes[2] <= 1);
  }
}

TEST_CASE("binary tournament follows the two-pick contract") {
  auto key = [](std::size_t i) { return static_cast<double>(i % 3); };
  RngStream rng(77), shadow(77);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t a = static_cast<std::size_t>(shadow.uniform_int(0, 9));
    const std::size_t b = static_cast<std::size_t>(shadow.uniform_int(0, 9));
    const std::size_t expected =
        key(a) < key(b) ? a : key(b) < key(a) ? b : std::min(a, b);
    CHECK(binary_tournament(10, key, rng) == expected);
  }
}

TEST_CASE("ga runs are bitwise deterministic per seed") {
  const auto inst = fixtures::reference_instance();
  GaConfig config;
  config.seed = 31;
  config.termination.max_iterations = 10;

  const auto a1 = run_ga_aggregation(inst.rsm, inst.catalog, inst.query,
                                     config);
  const auto a2 = run_ga_aggregation(inst.rsm, inst.catalog, inst.query,
                                     config);
  CHECK(to_json(a1).dump() == to_json(a2).dump());

  const auto v1 = run_vega(inst.rsm, inst.catalog, inst.query, config);
  const auto v2 = run_vega(inst.rsm, inst.catalog, inst.query, config);
  CHECK(to_json(v1).dump() == to_json(v2).dump());

  CHECK(to_json(a1).dump() != to_json(v1).dump());
  config.seed = 32;
  const auto a3 = run_ga_aggregation(inst.rsm, inst.catalog, inst.query,
                                     config);
  CHECK(to_json(a1).dump() != to_json(a3).dump());
}

TEST_CASE("aggregation ga keeps plans valid and elite fitness monotone") {
  const auto inst = fixtures::reference_instance();
  GaConfig config;
  config.seed = 13;
  config.termination.max_iterations = 12;
  const CostContext cost(inst.catalog, inst.query);
  const Weights weights = config.weights;

  double previous_best = std::numeric_limits<double>::infinity();
  int generations = 0;
  auto observer = [&](int, const std::vector<Chromosome>& population) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& c : population) {
      REQUIRE(plan_is_valid(c.plan, inst.rsm, inst.query));
      const CostVector cv = cost.evaluate(c.plan);
      CHECK(c.native == weighted_fitness(cv, weights));
      CHECK(c.sphere == sphere_fitness(cv));
      best = std::min(best, c.native);
    }
    CHECK(best <= previous_best);  // elitism of one
    previous_best = best;
    ++generations;
  };
  const auto report =
      run_ga_aggregation(inst.rsm, inst.catalog, inst.query, config, observer);
  CHECK(generations == 13);
  CHECK(report.algorithm == "agga");
  CHECK(report.termination_reason == "max_iterations");
  CHECK(report.evaluations == 20 + 19 * 12);  // init + children per round
  REQUIRE(report.ranked.size() == 20);
  for (std::size_t i = 1; i < report.ranked.size(); ++i)
    CHECK(report.ranked[i - 1].fitness <= report.ranked[i].fitness);
  // native fitness of the ranking is the weighted aggregation
  for (const auto& r : report.ranked) {
    CHECK(r.fitness == weighted_fitness(r.cost, weights));
    CHECK(r.sphere == sphere_fitness(r.cost));
  }
}

TEST_CASE("vega keeps plans valid and its sphere elite monotone") {
  const auto inst = fixtures::reference_instance();
  GaConfig config;
  config.seed = 17;
  config.termination.max_iterations = 12;

  double previous_best = std::numeric_limits<double>::infinity();
  auto observer = [&](int, const std::vector<Chromosome>& population) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& c : population) {
      REQUIRE(plan_is_valid(c.plan, inst.rsm, inst.query));
      CHECK(c.native == c.sphere);  // cross-algorithm comparison score
      best = std::min(best, c.sphere);
    }
    CHECK(best <= previous_best);
    previous_best = best;
  };
  const auto report =
      run_vega(inst.rsm, inst.catalog, inst.query, config, observer);
  CHECK(report.algorithm == "vega");
  for (const auto& r : report.ranked) CHECK(r.fitness == r.sphere);
}

TEST_CASE("ga top_k accounting matches the trace") {
  const auto inst = fixtures::reference_instance();
  GaConfig config;
  config.seed = 41;
  config.termination.max_iterations = 100;
  config.termination.top_k = 5;
  config.termination.qc_threshold = 0.6;
  for (const auto& report :
       {run_ga_aggregation(inst.rsm, inst.catalog, inst.query, config),
        run_vega(inst.rsm, inst.catalog, inst.query, config)}) {
    if (report.iterations_to_topk) {
      CHECK(report.termination_reason == "top_k");
      CHECK(report.trace.back().iteration == *report.iterations_to_topk);
      CHECK(report.trace.back().plans_at_threshold >= 5);
    } else {
      CHECK(report.termination_reason == "max_iterations");
    }
    for (std::size_t i = 1; i < report.trace.size(); ++i)
      CHECK(report.trace[i].plans_at_threshold >=
            report.trace[i - 1].plans_at_threshold);
  }
}

TEST_CASE("ga configuration validation") {
  GaConfig config;
  SECTION("population size") {
    config.population_size = 1;
    CHECK_THROWS_AS(validate(config), ConfigError);
  }
  SECTION("probabilities must lie in [0,1]") {
    config.crossover_probability = 1.5;
    CHECK_THROWS_AS(validate(config), ConfigError);
    config.crossover_probability = 0.8;
    config.mutation_probability = -0.1;
    CHECK_THROWS_AS(validate(config), ConfigError);
  }
  SECTION("weights must be a convex combination") {
    config.weights.qac = 0.9;  // now sums to 1.7
    CHECK_THROWS_AS(validate(config), ConfigError);
  }
  SECTION("vega needs at least three chromosomes") {
    const auto inst = fixtures::reference_instance();
    config.population_size = 2;
    CHECK_THROWS_AS(run_vega(inst.rsm, inst.catalog, inst.query, config),
                    ConfigError);
  }
  SECTION("defaults validate") { CHECK_NOTHROW(validate(config)); }
}
