#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "planforge/cost.hpp"
#include "planforge/plan.hpp"

namespace planforge {

// One entry of the final ranking. `fitness` is the score the algorithm
// optimized; `sphere` is always carried alongside so runs of different
// algorithms stay comparable.
struct RankedPlan {
  QueryPlan plan;
  CostVector cost;
  double fitness = 0.0;
  double sphere = 0.0;
};

struct IterationStat {
  int iteration = 0;          // 0 is the initial population
  double best_fitness = 0.0;  // algorithm-native
  double best_sphere = 0.0;
  int plans_at_threshold = 0;  // distinct plans scoring <= qc_threshold
};

struct OptimizationReport {
  std::string algorithm;
  std::string mode;
  nlohmann::ordered_json config;  // full effective configuration
  std::vector<RankedPlan> ranked;
  std::vector<IterationStat> trace;
  std::optional<int> iterations_to_topk;
  std::string termination_reason;
  std::uint64_t evaluations = 0;

  double best_sphere() const {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& r : ranked) best = std::min(best, r.sphere);
    return best;
  }
};

inline nlohmann::ordered_json to_json(const OptimizationReport& report) {
  nlohmann::ordered_json j;
  j["algorithm"] = report.algorithm;
  j["mode"] = report.mode;
  j["config"] = report.config;
  j["termination_reason"] = report.termination_reason;
  j["evaluations"] = report.evaluations;
  if (report.iterations_to_topk)
    j["iterations_to_topk"] = *report.iterations_to_topk;
  else
    j["iterations_to_topk"] = nullptr;

  nlohmann::ordered_json ranked = nlohmann::ordered_json::array();
  for (const auto& r : report.ranked) {
    nlohmann::ordered_json e;
    e["plan"] = r.plan;
    e["qac"] = r.cost.qac;
    e["qlc"] = r.cost.qlc;
    e["lpc"] = r.cost.lpc;
    e["control_site"] = r.cost.control_site;
    e["fitness"] = r.fitness;
    e["sphere"] = r.sphere;
    ranked.push_back(std::move(e));
  }
  j["ranked"] = std::move(ranked);

  nlohmann::ordered_json trace = nlohmann::ordered_json::array();
  for (const auto& t : report.trace) {
    nlohmann::ordered_json e;
    e["iteration"] = t.iteration;
    e["best_fitness"] = t.best_fitness;
    e["best_sphere"] = t.best_sphere;
    e["plans_at_threshold"] = t.plans_at_threshold;
    trace.push_back(std::move(e));
  }
  j["trace"] = std::move(trace);
  return j;
}

}  // namespace planforge
