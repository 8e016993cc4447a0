#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <ostream>
#include <queue>
#include <sstream>
#include <string>
#include <vector>

#include "planforge/cost.hpp"
#include "planforge/error.hpp"
#include "planforge/plan.hpp"
#include "planforge/query.hpp"
#include "planforge/rsm.hpp"
#include "planforge/tracking.hpp"

namespace planforge {

inline constexpr std::uint64_t kDefaultPlanBound = 100'000'000ULL;

struct PlanCount {
  std::uint64_t value = 0;  // exact when not saturated
  bool saturated = false;
};

// Product of replica-set sizes over the query's relations, computed against
// `bound` so oversized spaces saturate instead of overflowing.
inline PlanCount count_plans(const RelationSiteMatrix& rsm, const Query& query,
                             std::uint64_t bound = kDefaultPlanBound) {
  PlanCount out;
  out.value = 1;
  for (const auto& relation : query.relations) {
    const std::uint64_t factor = sites_holding(rsm, relation).size();
    if (factor == 0 || out.value > bound / factor) {
      out.saturated = true;
      out.value = 0;
      return out;
    }
    out.value *= factor;
    if (out.value > bound) {
      out.saturated = true;
      out.value = 0;
      return out;
    }
  }
  return out;
}

// Rough size of the plan space for saturation messages; exact values do not
// matter once the bound is exceeded.
inline double count_plans_estimate(const RelationSiteMatrix& rsm,
                                   const Query& query) {
  double est = 1.0;
  for (const auto& relation : query.relations)
    est *= static_cast<double>(sites_holding(rsm, relation).size());
  return est;
}

struct FitnessSpec {
  enum class Kind { sphere, weighted };
  Kind kind = Kind::sphere;
  Weights weights;

  static FitnessSpec sphere() { return {}; }
  static FitnessSpec weighted(const Weights& w) {
    FitnessSpec spec;
    spec.kind = Kind::weighted;
    spec.weights = w;
    return spec;
  }

  double score(const CostVector& cv) const {
    return kind == Kind::sphere ? sphere_fitness(cv)
                                : weighted_fitness(cv, weights);
  }
};

struct OraclePlan {
  QueryPlan plan;
  CostVector cost;
  double fitness = 0.0;
};

// Enumerates every valid plan and returns the k best by fitness, ascending,
// ties broken toward the lexicographically smaller plan. Throws
// SaturationError when the space exceeds `bound`.
inline std::vector<OraclePlan> exact_topk(
    const RelationSiteMatrix& rsm, const Catalog& catalog, const Query& query,
    std::size_t k, const FitnessSpec& fitness = FitnessSpec::sphere(),
    std::uint64_t bound = kDefaultPlanBound) {
  const PlanCount count = count_plans(rsm, query, bound);
  if (count.saturated) {
    const double estimate = count_plans_estimate(rsm, query);
    std::ostringstream msg;
    msg << "plan space holds about " << estimate
        << " plans, above the enumeration bound of " << bound;
    throw SaturationError(msg.str(), estimate);
  }
  if (k == 0) return {};

  const auto choices = site_choices_for(rsm, query);
  const CostContext cost(catalog, query);

  struct Entry {
    double fitness;
    QueryPlan plan;
    CostVector cost;
  };
  auto worse = [](const Entry& a, const Entry& b) {
    if (a.fitness != b.fitness) return a.fitness < b.fitness;
    return a.plan < b.plan;
  };
  // max-heap of the k best so far; top is the current worst keeper
  std::priority_queue<Entry, std::vector<Entry>, decltype(worse)> keep(worse);

  QueryPlan plan(choices.size());
  std::vector<std::size_t> digit(choices.size(), 0);
  for (std::size_t i = 0; i < choices.size(); ++i) plan[i] = choices[i][0];

  while (true) {
    const CostVector cv = cost.evaluate(plan);
    const double score = fitness.score(cv);
    if (keep.size() < k) {
      keep.push({score, plan, cv});
    } else if (score < keep.top().fitness ||
               (score == keep.top().fitness && plan < keep.top().plan)) {
      keep.pop();
      keep.push({score, plan, cv});
    }

    // mixed-radix increment over the replica-site lists
    std::size_t pos = 0;
    while (pos < choices.size()) {
      if (++digit[pos] < choices[pos].size()) {
        plan[pos] = choices[pos][digit[pos]];
        break;
      }
      digit[pos] = 0;
      plan[pos] = choices[pos][0];
      ++pos;
    }
    if (pos == choices.size()) break;
  }

  std::vector<OraclePlan> out;
  out.resize(keep.size());
  for (std::size_t i = keep.size(); i-- > 0;) {
    out[i] = {keep.top().plan, keep.top().cost, keep.top().fitness};
    keep.pop();
  }
  return out;
}

namespace detail {

inline std::string format_double(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", value);
  return buf;
}

}  // namespace detail

// CSV shape: rank,plan,qac,qlc,lpc,fitness,control_site with the plan as
// space-separated site ids.
inline void write_oracle_csv(const std::vector<OraclePlan>& plans,
                             std::ostream& out) {
  out << "rank,plan,qac,qlc,lpc,fitness,control_site\n";
  for (std::size_t i = 0; i < plans.size(); ++i) {
    const auto& p = plans[i];
    out << (i + 1) << ',';
    for (std::size_t j = 0; j < p.plan.size(); ++j) {
      if (j) out << ' ';
      out << p.plan[j];
    }
    out << ',' << detail::format_double(p.cost.qac) << ','
        << detail::format_double(p.cost.qlc) << ','
        << detail::format_double(p.cost.lpc) << ','
        << detail::format_double(p.fitness) << ',' << p.cost.control_site
        << '\n';
  }
}

struct OracleCsvRow {
  int rank = 0;
  QueryPlan plan;
  double qac = 0.0;
  double qlc = 0.0;
  double lpc = 0.0;
  double fitness = 0.0;
  SiteId control_site = 0;
};

inline std::vector<OracleCsvRow> parse_oracle_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line))
    throw ParseError("oracle CSV is empty", 1);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "rank,plan,qac,qlc,lpc,fitness,control_site")
    throw ParseError("unexpected oracle CSV header: " + line, 1);

  std::vector<OracleCsvRow> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string field;
    OracleCsvRow row;
    try {
      std::getline(fields, field, ',');
      row.rank = std::stoi(field);
      std::getline(fields, field, ',');
      std::istringstream plan_in(field);
      for (int site; plan_in >> site;) row.plan.push_back(site);
      std::getline(fields, field, ',');
      row.qac = std::stod(field);
      std::getline(fields, field, ',');
      row.qlc = std::stod(field);
      std::getline(fields, field, ',');
      row.lpc = std::stod(field);
      std::getline(fields, field, ',');
      row.fitness = std::stod(field);
      std::getline(fields, field, ',');
      row.control_site = std::stoi(field);
    } catch (const std::exception&) {
      throw ParseError("malformed oracle CSV row: " + line, line_no);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace planforge
