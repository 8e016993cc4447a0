#pragma once

#include <algorithm>
#include <sstream>
#include <string>
#include <vector>

#include "planforge/error.hpp"
#include "planforge/query.hpp"
#include "planforge/rsm.hpp"

namespace planforge {

// A site assignment: plan[i] is the site that serves position i of the
// query's FROM list.
using QueryPlan = std::vector<SiteId>;

struct SiteOccupancy {
  SiteId site;
  int count;
};

// Per-site position counts, ascending by site id.
inline std::vector<SiteOccupancy> occupancy(const QueryPlan& plan) {
  QueryPlan sorted = plan;
  std::sort(sorted.begin(), sorted.end());
  std::vector<SiteOccupancy> out;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    out.push_back({sorted[i], static_cast<int>(j - i)});
    i = j;
  }
  return out;
}

inline std::size_t distinct_site_count(const QueryPlan& plan) {
  return occupancy(plan).size();
}

inline bool plan_is_valid(const QueryPlan& plan, const RelationSiteMatrix& rsm,
                          const Query& query) {
  if (plan.size() != query.relations.size()) return false;
  for (std::size_t i = 0; i < plan.size(); ++i)
    if (!rsm.stores(plan[i], query.relations[i])) return false;
  return true;
}

inline std::string format_plan(const QueryPlan& plan) {
  std::ostringstream out;
  out << '[';
  for (std::size_t i = 0; i < plan.size(); ++i) {
    if (i) out << ',';
    out << plan[i];
  }
  out << ']';
  return out.str();
}

// Throws naming the first offending (relation, site) pair.
inline void ensure_plan_valid(const QueryPlan& plan,
                              const RelationSiteMatrix& rsm,
                              const Query& query) {
  if (plan.size() != query.relations.size())
    throw ValidationError("plan " + format_plan(plan) + " has " +
                          std::to_string(plan.size()) +
                          " entries for a query over " +
                          std::to_string(query.relations.size()) +
                          " relations");
  for (std::size_t i = 0; i < plan.size(); ++i) {
    if (!rsm.stores(plan[i], query.relations[i]))
      throw ValidationError("plan assigns relation " + query.relations[i] +
                            " to site " + std::to_string(plan[i]) +
                            ", which stores no replica of it");
  }
}

}  // namespace planforge
