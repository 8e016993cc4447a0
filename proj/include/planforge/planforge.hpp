#pragma once

// Umbrella header for the distributed query-plan optimization library:
// cost models (allocation, localization, processing), a teaching-learning
// optimizer, genetic baselines, an exhaustive oracle, and instance tooling.

#include "planforge/catalog.hpp"
#include "planforge/cost.hpp"
#include "planforge/error.hpp"
#include "planforge/fsio.hpp"
#include "planforge/ga.hpp"
#include "planforge/instance.hpp"
#include "planforge/oracle.hpp"
#include "planforge/plan.hpp"
#include "planforge/query.hpp"
#include "planforge/report.hpp"
#include "planforge/rng.hpp"
#include "planforge/rsm.hpp"
#include "planforge/sweep.hpp"
#include "planforge/tlbo.hpp"
#include "planforge/tracking.hpp"
