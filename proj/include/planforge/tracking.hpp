#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "planforge/error.hpp"
#include "planforge/plan.hpp"
#include "planforge/query.hpp"
#include "planforge/report.hpp"
#include "planforge/rng.hpp"
#include "planforge/rsm.hpp"

namespace planforge {

// Stopping rules shared by every optimizer. A zero disables a criterion:
// top_k counts distinct plans scoring at most qc_threshold (sphere scale),
// stagnation_window is the number of iterations tolerated without a new
// best fitness.
struct Termination {
  int max_iterations = 100;
  int top_k = 0;
  double qc_threshold = 0.0;
  int stagnation_window = 0;
};

inline void validate_termination(const Termination& t) {
  if (t.max_iterations < 1)
    throw ConfigError("max_iterations must be at least 1");
  if (t.top_k < 0) throw ConfigError("top_k must be nonnegative");
  if (t.qc_threshold < 0.0)
    throw ConfigError("qc_threshold must be nonnegative");
  if (t.stagnation_window < 0)
    throw ConfigError("stagnation_window must be nonnegative");
  if (t.top_k > 0 && t.qc_threshold <= 0.0)
    throw ConfigError("top_k termination requires a positive qc_threshold");
}

// Valid site choices per plan position, in FROM order.
inline std::vector<std::vector<SiteId>> site_choices_for(
    const RelationSiteMatrix& rsm, const Query& query) {
  std::vector<std::vector<SiteId>> choices;
  choices.reserve(query.relations.size());
  for (const auto& r : query.relations) choices.push_back(sites_holding(rsm, r));
  return choices;
}

// One uniform draw per position over that relation's replica sites, so any
// sampled plan is valid by construction.
inline QueryPlan sample_plan(const std::vector<std::vector<SiteId>>& choices,
                             RngStream& rng) {
  QueryPlan plan;
  plan.reserve(choices.size());
  for (const auto& sites : choices) {
    const int idx = rng.uniform_int(0, static_cast<int>(sites.size()) - 1);
    plan.push_back(sites[idx]);
  }
  return plan;
}

// Bookkeeping for a single optimizer run: evaluation count, the cumulative
// set of distinct discovered plans scoring at or below the threshold, the
// per-iteration trace, and stagnation state.
class RunTracker {
 public:
  RunTracker(int top_k, double qc_threshold)
      : top_k_(top_k), qc_threshold_(qc_threshold) {}

  // Every plan evaluation funnels through here. `sphere` is the sphere
  // fitness of the evaluated plan.
  void note_evaluation(const QueryPlan& plan, double sphere) {
    ++evaluations_;
    if (qc_threshold_ > 0.0 && sphere <= qc_threshold_) hits_.insert(plan);
  }

  // Cost-space runs have a fixed plan pool; only the evaluation count is
  // meaningful.
  void note_scalar_evaluation() { ++evaluations_; }

  int discovered_hits() const { return static_cast<int>(hits_.size()); }

  // Close iteration `iteration` with the current bests. `hit_count`
  // overrides the cumulative count for modes that measure the current
  // population instead (pass -1 to use the cumulative set).
  void close_iteration(int iteration, double best_fitness, double best_sphere,
                       int hit_count = -1) {
    const int hits = hit_count >= 0 ? hit_count : discovered_hits();
    trace_.push_back({iteration, best_fitness, best_sphere, hits});
    if (!iterations_to_topk_ && top_k_ > 0 && hits >= top_k_)
      iterations_to_topk_ = iteration;
    if (best_fitness < best_ever_ - 0.0) {
      best_ever_ = best_fitness;
      last_improvement_ = iteration;
    }
  }

  bool topk_reached() const { return iterations_to_topk_.has_value(); }

  bool stagnated(int window) const {
    if (window <= 0 || trace_.empty()) return false;
    return trace_.back().iteration - last_improvement_ >= window;
  }

  const std::vector<IterationStat>& trace() const { return trace_; }
  std::optional<int> iterations_to_topk() const { return iterations_to_topk_; }
  std::uint64_t evaluations() const { return evaluations_; }

 private:
  int top_k_;
  double qc_threshold_;
  std::set<QueryPlan> hits_;
  std::vector<IterationStat> trace_;
  std::optional<int> iterations_to_topk_;
  std::uint64_t evaluations_ = 0;
  double best_ever_ = std::numeric_limits<double>::infinity();
  int last_improvement_ = 0;
};

}  // namespace planforge
