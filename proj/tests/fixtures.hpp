#pragma once

// Shared fixtures: the 16x8 reference instance shipped under data/ and the
// frozen golden tables used by the cost-model and teacher-phase tests.

#include <array>
#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "planforge/instance.hpp"
#include "planforge/tlbo.hpp"

namespace fixtures {

inline std::filesystem::path data_dir() { return PLANFORGE_DATA_DIR; }

inline planforge::Instance reference_instance() {
  const auto dir = data_dir();
  return planforge::load_instance(dir / "rsm.csv", dir / "catalog.txt",
                                  dir / "q1.sql");
}

// |a - b| <= tol with a hair of slack: several golden deltas sit exactly at
// the published rounding tolerance.
inline bool within(double a, double b, double tol) {
  return std::abs(a - b) <= tol + 1e-12;
}

// One row of the initial-population table: the site-assignment plan and its
// published cost triple plus aggregate fitness. Six of the twenty rows have
// 7 or 9 entries in the source table; those are kept verbatim (the plan is
// raw arithmetic input for qac) but flagged not well-formed.
struct InitialRow {
  std::vector<int> plan;
  double qac;
  double qlc;
  double lpc;
  double fitness1;
  bool well_formed;  // exactly one site per query relation (length 8)
};

inline const std::vector<InitialRow>& initial_rows() {
  static const std::vector<InitialRow> rows = {
      {{1, 1, 2, 2, 2, 3, 5, 3}, 0.7188, 0.5354, 0.2667, 0.8744, true},
      {{3, 5, 7, 15, 4, 6, 8}, 0.8438, 0.6691, 0.3466, 1.2797, false},
      {{6, 7, 8, 11, 16, 6, 8, 9}, 0.8125, 0.5374, 0.3878, 1.0994, true},
      {{10, 11, 11, 15, 16, 11, 16, 14}, 0.7500, 0.4315, 0.3853, 0.8971, true},
      {{8, 8, 10, 14, 16, 11, 11, 14}, 0.7813, 0.6691, 0.3724, 1.1967, true},
      {{15, 12, 13, 11, 15, 15, 11, 12}, 0.7188, 0.6691, 0.2615, 1.0327, true},
      {{1, 2, 5, 7, 2, 4, 6, 8}, 0.8438, 0.6691, 0.4651, 1.3760, true},
      {{3, 5, 7, 8, 15, 3, 5, 3}, 0.7500, 0.6691, 0.3337, 1.1215, true},
      {{2, 2, 2, 2, 3, 5, 3}, 0.5313, 0.3130, 0.1430, 0.4007, false},
      {{2, 1, 11, 13, 2, 15, 3, 5, 3}, 0.8125, 0.6691, 0.3517, 1.2316, false},
      {{8, 8, 16, 14, 16, 15, 16, 14}, 0.7188, 0.5215, 0.2899, 0.8726, true},
      {{3, 7, 7, 8, 16, 7, 16, 3}, 0.7188, 0.4315, 0.3054, 0.7960, true},
      {{2, 2, 2, 2, 15, 16, 14}, 0.5625, 0.3130, 0.1945, 0.4522, false},
      {{1, 1, 8, 8, 2, 7, 8, 8}, 0.6563, 0.3091, 0.2925, 0.6117, true},
      {{8, 8, 8, 2, 7, 8, 9}, 0.4063, 0.0867, 0.2100, 0.2167, false},
      {{5, 16, 15, 15, 16, 6, 8, 9}, 0.8125, 0.5513, 0.4007, 1.1247, true},
      {{1, 1, 1, 1, 15, 15, 16, 14}, 0.6563, 0.3289, 0.2667, 0.6100, true},
      {{10, 11, 11, 8, 7, 3, 5, 3}, 0.8125, 0.5023, 0.4136, 1.0835, true},
      {{15, 16, 15, 15, 15, 16, 14}, 0.5313, 0.4090, 0.1430, 0.4700, false},
      {{1, 1, 8, 8, 1, 7, 8, 8}, 0.5938, 0.3091, 0.1688, 0.4765, true},
  };
  return rows;
}

// Population after the teacher-phase shift, paired with the aggregate
// fitness recomputed from the shifted triples.
struct ShiftedRow {
  double qac;
  double qlc;
  double lpc;
  double fitness2;
};

inline const std::vector<ShiftedRow>& shifted_rows() {
  static const std::vector<ShiftedRow> rows = {
      {0.1281, -0.2506, 0.0868, 0.0868},
      {0.2531, -0.1169, 0.1667, 0.1055},
      {0.2219, -0.2486, 0.2079, 0.1543},
      {0.1594, -0.3545, 0.2054, 0.1933},
      {0.1906, -0.1169, 0.1925, 0.0871},
      {0.1281, -0.1169, 0.0816, 0.0368},
      {0.2531, -0.1169, 0.2853, 0.1591},
      {0.1594, -0.1169, 0.1538, 0.0627},
      {-0.0594, -0.4730, -0.0369, 0.2286},
      {0.2219, -0.1169, 0.1719, 0.0924},
      {0.1281, -0.2645, 0.1100, 0.0985},
      {0.1281, -0.3545, 0.1255, 0.1579},
      {-0.0281, -0.4730, 0.0146, 0.2247},
      {0.0656, -0.4770, 0.1126, 0.2445},
      {-0.1844, -0.6993, 0.0301, 0.5240},
      {0.2219, -0.2348, 0.2208, 0.1531},
      {0.0656, -0.4571, 0.0868, 0.2208},
      {0.2219, -0.2837, 0.2337, 0.1843},
      {-0.0594, -0.3770, -0.0369, 0.1470},
      {0.0031, -0.4770, -0.0111, 0.2276},
  };
  return rows;
}

// Published per-objective mean of the initial population and the shift
// vector that produced the updated population, plus the r values recovered
// from diff = r * (teacher - 2 * mean).
inline constexpr std::array<double, 3> kMeanGolden = {0.7015, 0.4797, 0.2999};
inline constexpr std::array<double, 3> kDiffGolden = {-0.5906, -0.7860,
                                                      -0.1799};
inline constexpr std::array<double, 3> kBackSolvedR = {0.5926, 0.9006, 0.4615};
inline constexpr std::size_t kTeacherIndex = 14;  // learner 15, 0-based

// Faithful-mode population seeded from the documented initial table: each
// learner's position is its printed cost triple and its fitness is the
// sphere score of that triple.
inline std::vector<planforge::Learner> published_population() {
  std::vector<planforge::Learner> population;
  for (const InitialRow& row : initial_rows()) {
    planforge::Learner learner;
    learner.position = {row.qac, row.qlc, row.lpc};
    learner.plan = row.plan;
    learner.cost.qac = row.qac;
    learner.cost.qlc = row.qlc;
    learner.cost.lpc = row.lpc;
    learner.fitness = planforge::sphere_fitness(row.qac, row.qlc, row.lpc);
    population.push_back(std::move(learner));
  }
  return population;
}

}  // namespace fixtures
