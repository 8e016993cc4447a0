#pragma once

#include <cmath>
#include <functional>
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

// faithful: learners live in cost space (position = (qac, qlc, lpc) of a
//           fixed plan pool) and every move is accepted, reproducing the
//           reference teaching/learning dynamics.
// discrete: learners live in site-index space; candidates are repaired to
//           valid plans and accepted only on strict improvement.
enum class TlboMode { faithful, discrete };

inline std::string to_string(TlboMode mode) {
  return mode == TlboMode::faithful ? "faithful" : "discrete";
}

struct TlboConfig {
  int population_size = 20;
  TlboMode mode = TlboMode::discrete;
  std::uint64_t seed = 1;
  Termination termination;
};

inline void validate(const TlboConfig& config) {
  if (config.population_size < 2)
    throw ConfigError("population_size must be at least 2");
  validate_termination(config.termination);
}

struct Learner {
  std::vector<double> position;  // cost triple (faithful) or relaxed sites
  QueryPlan plan;                // discrete: kept in sync via repair
  CostVector cost;
  double fitness = 0.0;
};

// Minimization: lowest fitness wins, ties keep the earliest learner.
inline std::size_t select_teacher(const std::vector<Learner>& population) {
  if (population.empty())
    throw ConfigError("cannot select a teacher from an empty population");
  std::size_t best = 0;
  for (std::size_t i = 1; i < population.size(); ++i)
    if (population[i].fitness < population[best].fitness) best = i;
  return best;
}

// Per-dimension arithmetic mean of learner positions.
inline std::vector<double> mean_result(const std::vector<Learner>& population) {
  if (population.empty())
    throw ConfigError("cannot average an empty population");
  std::vector<double> mean(population[0].position.size(), 0.0);
  for (const auto& learner : population)
    for (std::size_t d = 0; d < mean.size(); ++d)
      mean[d] += learner.position[d];
  for (double& m : mean) m /= static_cast<double>(population.size());
  return mean;
}

// T_F = round(1 + u) for u ~ U[0,1): 1 when u < 0.5, else 2.
inline int teaching_factor_from_uniform(double u) {
  return static_cast<int>(std::lround(1.0 + u));
}

inline int teaching_factor(RngStream& rng) {
  return teaching_factor_from_uniform(rng.uniform());
}

// Maps a relaxed position to a valid plan: round each coordinate, then snap
// to the replica site with the smallest id distance (ties toward the lower
// id). Integer positions on valid sites are fixed points.
inline QueryPlan repair(const std::vector<double>& position,
                        const std::vector<std::vector<SiteId>>& site_choices) {
  if (position.size() != site_choices.size())
    throw ValidationError("position length does not match relation count");
  QueryPlan plan;
  plan.reserve(position.size());
  for (std::size_t i = 0; i < position.size(); ++i) {
    double value = position[i];
    if (!std::isfinite(value)) value = 0.0;
    value = std::max(-1e12, std::min(1e12, value));
    const long long rounded = std::llround(value);
    SiteId best = site_choices[i].front();
    long long best_dist = std::llabs(rounded - best);
    for (SiteId site : site_choices[i]) {  // ascending: strict < keeps low id
      const long long dist = std::llabs(rounded - site);
      if (dist < best_dist) {
        best = site;
        best_dist = dist;
      }
    }
    plan.push_back(best);
  }
  return plan;
}

inline QueryPlan repair(const std::vector<double>& position,
                        const RelationSiteMatrix& rsm, const Query& query) {
  return repair(position, site_choices_for(rsm, query));
}

namespace detail {

inline double sum_of_squares(const std::vector<double>& v) {
  double total = 0.0;
  for (double x : v) total += x * x;
  return total;
}

}  // namespace detail

// Shared hooks the phases need; cost/choices are only consulted in
// discrete mode, tracker is optional.
struct TlboPhaseContext {
  TlboMode mode = TlboMode::faithful;
  const CostContext* cost = nullptr;
  const std::vector<std::vector<SiteId>>* site_choices = nullptr;
  RunTracker* tracker = nullptr;
};

// Applies an externally supplied Difference_Mean vector: every learner gets
// the same shift. Faithful mode accepts unconditionally; discrete mode
// repairs the shifted position and keeps it only on strict improvement.
inline void apply_teacher_shift(std::vector<Learner>& population,
                                const std::vector<double>& difference_mean,
                                const TlboPhaseContext& ctx) {
  for (auto& learner : population) {
    std::vector<double> candidate = learner.position;
    for (std::size_t d = 0; d < candidate.size(); ++d)
      candidate[d] += difference_mean[d];

    if (ctx.mode == TlboMode::faithful) {
      learner.position = std::move(candidate);
      learner.fitness = detail::sum_of_squares(learner.position);
      if (learner.position.size() == 3) {
        learner.cost.qac = learner.position[0];
        learner.cost.qlc = learner.position[1];
        learner.cost.lpc = learner.position[2];
      }
      if (ctx.tracker) ctx.tracker->note_scalar_evaluation();
      continue;
    }

    QueryPlan plan = repair(candidate, *ctx.site_choices);
    const CostVector cv = ctx.cost->evaluate(plan);
    const double fitness = sphere_fitness(cv);
    if (ctx.tracker) ctx.tracker->note_evaluation(plan, fitness);
    if (fitness < learner.fitness) {
      learner.position = std::move(candidate);
      learner.plan = std::move(plan);
      learner.cost = cv;
      learner.fitness = fitness;
    }
  }
}

// Teacher phase. Draw order per phase: the teaching factor first, then one
// r per dimension (shared by all learners); the shift is
// r_d * (teacher_d - T_F * mean_d).
inline std::vector<double> teacher_phase(std::vector<Learner>& population,
                                         RngStream& rng,
                                         const TlboPhaseContext& ctx) {
  const std::size_t dim = population.front().position.size();
  const int tf = teaching_factor(rng);
  std::vector<double> r(dim);
  for (std::size_t d = 0; d < dim; ++d) r[d] = rng.uniform();

  const std::vector<double> mean = mean_result(population);
  const Learner& teacher = population[select_teacher(population)];
  std::vector<double> difference_mean(dim);
  for (std::size_t d = 0; d < dim; ++d)
    difference_mean[d] =
        r[d] * (teacher.position[d] - static_cast<double>(tf) * mean[d]);

  apply_teacher_shift(population, difference_mean, ctx);
  return difference_mean;
}

// Candidate for learner i paired with j under minimization: move away from
// a worse partner, toward a better one.
inline std::vector<double> learner_candidate(const std::vector<double>& xi,
                                             const std::vector<double>& xj,
                                             bool i_is_better, double r) {
  std::vector<double> out(xi.size());
  for (std::size_t d = 0; d < xi.size(); ++d) {
    const double delta = i_is_better ? xi[d] - xj[d] : xj[d] - xi[d];
    out[d] = xi[d] + r * delta;
  }
  return out;
}

// Learner phase. Draw order per learner: the partner index, then a single
// scalar r. Candidates are accepted only on strict improvement; updates are
// applied in place, so later learners can pair with already-updated ones.
inline void learner_phase(std::vector<Learner>& population, RngStream& rng,
                          const TlboPhaseContext& ctx) {
  const int n = static_cast<int>(population.size());
  if (n < 2) throw ConfigError("learner phase requires at least 2 learners");
  for (int i = 0; i < n; ++i) {
    int j = rng.uniform_int(0, n - 2);
    if (j >= i) ++j;
    const double r = rng.uniform();

    Learner& self = population[i];
    const Learner& partner = population[j];
    std::vector<double> candidate = learner_candidate(
        self.position, partner.position, self.fitness < partner.fitness, r);

    if (ctx.mode == TlboMode::faithful) {
      const double fitness = detail::sum_of_squares(candidate);
      if (ctx.tracker) ctx.tracker->note_scalar_evaluation();
      if (fitness < self.fitness) {
        self.position = std::move(candidate);
        self.fitness = fitness;
        if (self.position.size() == 3) {
          self.cost.qac = self.position[0];
          self.cost.qlc = self.position[1];
          self.cost.lpc = self.position[2];
        }
      }
      continue;
    }

    QueryPlan plan = repair(candidate, *ctx.site_choices);
    const CostVector cv = ctx.cost->evaluate(plan);
    const double fitness = sphere_fitness(cv);
    if (ctx.tracker) ctx.tracker->note_evaluation(plan, fitness);
    if (fitness < self.fitness) {
      self.position = std::move(candidate);
      self.plan = std::move(plan);
      self.cost = cv;
      self.fitness = fitness;
    }
  }
}

// Uniform random valid plans, deduplicated best-effort: duplicate draws are
// retried a bounded number of times, after which repeats are admitted (a
// single-site matrix yields an all-identical population).
inline std::vector<Learner> init_population(const RelationSiteMatrix& rsm,
                                            const Catalog& catalog,
                                            const Query& query,
                                            const TlboConfig& config,
                                            RngStream& rng,
                                            RunTracker* tracker = nullptr) {
  const auto choices = site_choices_for(rsm, query);
  const CostContext cost(catalog, query);

  std::vector<Learner> population;
  population.reserve(config.population_size);
  std::set<QueryPlan> seen;
  int retries = 0;
  const int max_retries = 20 * config.population_size;
  while (static_cast<int>(population.size()) < config.population_size) {
    QueryPlan plan = sample_plan(choices, rng);
    if (seen.count(plan) != 0 && retries < max_retries) {
      ++retries;
      continue;
    }
    seen.insert(plan);

    Learner learner;
    learner.cost = cost.evaluate(plan);
    learner.fitness = sphere_fitness(learner.cost);
    if (config.mode == TlboMode::faithful)
      learner.position = {learner.cost.qac, learner.cost.qlc,
                          learner.cost.lpc};
    else
      learner.position.assign(plan.begin(), plan.end());
    learner.plan = std::move(plan);
    if (tracker) tracker->note_evaluation(learner.plan, learner.fitness);
    population.push_back(std::move(learner));
  }
  return population;
}

using IterationObserver =
    std::function<void(int iteration, const std::vector<Learner>&)>;

namespace detail {

inline int faithful_hit_count(const std::vector<Learner>& population,
                              double qc_threshold) {
  if (qc_threshold <= 0.0) return 0;
  std::set<QueryPlan> distinct;
  for (const auto& learner : population)
    if (learner.fitness <= qc_threshold) distinct.insert(learner.plan);
  return static_cast<int>(distinct.size());
}

inline void close_tlbo_iteration(RunTracker& tracker, int iteration,
                                 const std::vector<Learner>& population,
                                 const TlboConfig& config) {
  double best = population.front().fitness;
  for (const auto& learner : population) best = std::min(best, learner.fitness);
  const int override_hits =
      config.mode == TlboMode::faithful
          ? faithful_hit_count(population, config.termination.qc_threshold)
          : -1;
  tracker.close_iteration(iteration, best, best, override_hits);
}

}  // namespace detail

inline OptimizationReport run_tlbo(const RelationSiteMatrix& rsm,
                                   const Catalog& catalog, const Query& query,
                                   const TlboConfig& config,
                                   const IterationObserver& observer = {}) {
  validate(config);

  const auto choices = site_choices_for(rsm, query);
  const CostContext cost(catalog, query);
  RngStream rng(config.seed);
  RunTracker tracker(config.termination.top_k,
                     config.termination.qc_threshold);

  TlboPhaseContext ctx;
  ctx.mode = config.mode;
  ctx.cost = &cost;
  ctx.site_choices = &choices;
  ctx.tracker = &tracker;

  std::vector<Learner> population =
      init_population(rsm, catalog, query, config, rng, &tracker);
  detail::close_tlbo_iteration(tracker, 0, population, config);
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
    for (int t = 1; t <= config.termination.max_iterations; ++t) {
      teacher_phase(population, rng, ctx);
      learner_phase(population, rng, ctx);
      detail::close_tlbo_iteration(tracker, t, population, config);
      if (observer) observer(t, population);
      if (stop_now()) break;
    }
    if (reason.empty()) reason = "max_iterations";
  }

  OptimizationReport report;
  report.algorithm = "tlbo";
  report.mode = to_string(config.mode);
  report.config = {
      {"algorithm", "tlbo"},
      {"mode", to_string(config.mode)},
      {"population_size", config.population_size},
      {"seed", config.seed},
      {"max_iterations", config.termination.max_iterations},
      {"top_k", config.termination.top_k},
      {"qc_threshold", config.termination.qc_threshold},
      {"stagnation_window", config.termination.stagnation_window},
  };

  std::vector<std::size_t> order(population.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     if (population[a].fitness != population[b].fitness)
                       return population[a].fitness < population[b].fitness;
                     return population[a].plan < population[b].plan;
                   });
  for (std::size_t idx : order) {
    const Learner& learner = population[idx];
    report.ranked.push_back({learner.plan, learner.cost, learner.fitness,
                             config.mode == TlboMode::faithful
                                 ? learner.fitness
                                 : sphere_fitness(learner.cost)});
  }

  report.trace = tracker.trace();
  report.iterations_to_topk = tracker.iterations_to_topk();
  report.termination_reason = reason;
  report.evaluations = tracker.evaluations();
  return report;
}

}  // namespace planforge
