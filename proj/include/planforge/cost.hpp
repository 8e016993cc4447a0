#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "planforge/catalog.hpp"
#include "planforge/error.hpp"
#include "planforge/plan.hpp"
#include "planforge/query.hpp"
#include "planforge/rsm.hpp"

namespace planforge {

// The three objectives scored for a site-assignment plan, plus the control
// site chosen while scoring localization.
struct CostVector {
  double qac = 0.0;  // allocation dispersion over sites
  double qlc = 0.0;  // fraction of bytes shipped to the control site
  double lpc = 0.0;  // bottleneck processing load
  SiteId control_site = 0;
};

// Query allocation cost: sum over the distinct sites of the plan of
// (K_i/N)(1 - K_i/N), where K_i positions run at site i and N is the plan
// length. 0 when everything is co-located; grows with dispersion.
inline double qac(const QueryPlan& plan) {
  if (plan.empty()) throw ValidationError("qac of an empty plan is undefined");
  const double n = static_cast<double>(plan.size());
  double total = 0.0;
  for (const auto& occ : occupancy(plan)) {
    const double share = static_cast<double>(occ.count) / n;
    total += share * (1.0 - share);
  }
  return total;
}

struct QlcResult {
  double cost = 0.0;
  SiteId control_site = 0;
};

// Relation processing cost: the relation's surviving-tuple share of the
// query's total tuple volume.
inline double rpc(const std::string& relation, const Catalog& catalog,
                  const Query& query) {
  if (query.relation_index(relation) < 0)
    throw SemanticError("relation " + relation + " is not part of the query");
  double total = 0.0;
  for (const auto& r : query.relations)
    total += static_cast<double>(catalog.stats(r).tuple_count);
  if (total <= 0.0)
    throw ValidationError(
        "total tuple count of the query relations is zero; costs undefined");
  const auto& st = catalog.stats(relation);
  return static_cast<double>(st.tuple_count) * st.selectivity / total;
}

namespace detail {

struct SiteGroup {
  SiteId site;
  int count;
  double size_sum;
  double max_rpc;
};

// Groups plan positions by site, ascending by site id. `size` and `rel_rpc`
// are aligned with plan positions.
inline std::vector<SiteGroup> group_by_site(const QueryPlan& plan,
                                            const std::vector<double>& size,
                                            const std::vector<double>& rel_rpc) {
  std::vector<std::pair<SiteId, std::size_t>> order(plan.size());
  for (std::size_t i = 0; i < plan.size(); ++i) order[i] = {plan[i], i};
  std::sort(order.begin(), order.end());
  std::vector<SiteGroup> groups;
  for (std::size_t i = 0; i < order.size();) {
    SiteGroup g{order[i].first, 0, 0.0, 0.0};
    std::size_t j = i;
    for (; j < order.size() && order[j].first == g.site; ++j) {
      g.count += 1;
      g.size_sum += size[order[j].second];
      g.max_rpc = std::max(g.max_rpc, rel_rpc[order[j].second]);
    }
    groups.push_back(g);
    i = j;
  }
  return groups;
}

}  // namespace detail

// Precomputed per-(catalog, query) quantities so the per-plan evaluation in
// search loops and the exhaustive oracle stays cheap. The collective join
// load does not depend on the site assignment, so it is computed once.
class CostContext {
 public:
  CostContext(const Catalog& catalog, const Query& query) {
    if (query.relations.empty())
      throw ValidationError("query has no relations; costs undefined");
    size_.reserve(query.relations.size());
    for (const auto& r : query.relations) {
      const auto& st = catalog.stats(r);  // SemanticError when missing
      size_.push_back(static_cast<double>(st.tuple_count));
      selectivity_.push_back(st.selectivity);
    }
    total_size_ = 0.0;
    for (double s : size_) total_size_ += s;
    if (total_size_ <= 0.0)
      throw ValidationError(
          "total tuple count of the query relations is zero; costs undefined");
    rpc_.reserve(size_.size());
    for (std::size_t i = 0; i < size_.size(); ++i)
      rpc_.push_back(size_[i] * selectivity_[i] / total_size_);

    clpc_ = 0.0;
    for (const auto& p : query.join_predicates) {
      int li = query.relation_index(p.left.relation);
      int ri = query.relation_index(p.right.relation);
      if (li < 0 || ri < 0)
        throw SemanticError("join predicate references a relation outside "
                            "the query: " +
                            p.left.relation + " / " + p.right.relation);
      const double sj =
          catalog.join_selectivity(p.left.relation, p.right.relation);
      const double est_join_tuples = size_[li] * size_[ri] * sj;
      clpc_ = std::max(clpc_, est_join_tuples * sj / total_size_);
    }
  }

  std::size_t relation_count() const { return size_.size(); }
  double total_size() const { return total_size_; }
  double collective_lpc() const { return clpc_; }
  double rpc_at(std::size_t position) const { return rpc_[position]; }
  const std::vector<double>& sizes() const { return size_; }
  const std::vector<double>& rpcs() const { return rpc_; }

  // Scores a plan without validity checks; callers guarantee the plan is
  // positionally aligned with the query.
  CostVector evaluate(const QueryPlan& plan) const {
    if (plan.size() != size_.size())
      throw ValidationError("plan length " + std::to_string(plan.size()) +
                            " does not match query relation count " +
                            std::to_string(size_.size()));
    const auto groups = detail::group_by_site(plan, size_, rpc_);
    const double n = static_cast<double>(plan.size());

    CostVector cv;
    double best_ship = 0.0;
    bool first = true;
    for (const auto& g : groups) {
      const double share = static_cast<double>(g.count) / n;
      cv.qac += share * (1.0 - share);
      const double ship = (total_size_ - g.size_sum) / total_size_;
      if (first || ship < best_ship) {  // groups ascend by site id: ties keep
        best_ship = ship;               // the lowest site
        cv.control_site = g.site;
        first = false;
      }
    }
    cv.qlc = best_ship;
    for (const auto& g : groups)
      if (g.site != cv.control_site) cv.lpc += g.max_rpc;
    cv.lpc += clpc_;
    return cv;
  }

 private:
  std::vector<double> size_;
  std::vector<double> selectivity_;
  std::vector<double> rpc_;
  double total_size_ = 0.0;
  double clpc_ = 0.0;
};

// Query localization cost: cheapest choice of control site among the sites
// used by the plan, measured as the shipped fraction of total tuple volume.
// Ties break toward the lowest site id.
inline QlcResult qlc(const QueryPlan& plan, const Catalog& catalog,
                     const Query& query) {
  CostContext ctx(catalog, query);
  CostVector cv = ctx.evaluate(plan);
  return {cv.qlc, cv.control_site};
}

// Local processing cost given a control site: every non-control site
// contributes its heaviest relation load, plus the plan-independent
// collective join load.
inline double lpc(const QueryPlan& plan, const Catalog& catalog,
                  const Query& query, SiteId control_site) {
  CostContext ctx(catalog, query);
  if (plan.size() != query.relations.size())
    throw ValidationError("plan length does not match query relation count");
  const auto groups = detail::group_by_site(plan, ctx.sizes(), ctx.rpcs());
  double total = 0.0;
  for (const auto& g : groups)
    if (g.site != control_site) total += g.max_rpc;
  return total + ctx.collective_lpc();
}

// Full scoring: validates the plan against the allocation matrix, then
// derives the control site from qlc and scores all three objectives.
inline CostVector cost_vector(const QueryPlan& plan,
                              const RelationSiteMatrix& rsm,
                              const Catalog& catalog, const Query& query) {
  ensure_plan_valid(plan, rsm, query);
  CostContext ctx(catalog, query);
  return ctx.evaluate(plan);
}

inline double sphere_fitness(double qac_value, double qlc_value,
                             double lpc_value) {
  return qac_value * qac_value + qlc_value * qlc_value +
         lpc_value * lpc_value;
}

inline double sphere_fitness(const CostVector& cv) {
  return sphere_fitness(cv.qac, cv.qlc, cv.lpc);
}

// Nonnegative objective weights that sum to 1 (within 1e-9).
struct Weights {
  double qac = 0.2;
  double qlc = 0.5;
  double lpc = 0.3;

  static Weights make(double w_qac, double w_qlc, double w_lpc) {
    if (w_qac < 0.0 || w_qlc < 0.0 || w_lpc < 0.0)
      throw ValidationError("objective weights must be nonnegative");
    const double sum = w_qac + w_qlc + w_lpc;
    if (std::abs(sum - 1.0) > 1e-9)
      throw ValidationError("objective weights must sum to 1, got " +
                            std::to_string(sum));
    return Weights{w_qac, w_qlc, w_lpc};
  }
};

inline double weighted_fitness(const CostVector& cv, const Weights& w) {
  return w.qac * cv.qac + w.qlc * cv.qlc + w.lpc * cv.lpc;
}

}  // namespace planforge
