#pragma once

// Straggler-replication scheduling toolkit: execution-time models,
// extreme-value asymptotics of single- and multi-fork policies, exact job
// simulation, sampling-based estimation, and heuristic policy search.

#include "sfork/analytic.hpp"
#include "sfork/distribution.hpp"
#include "sfork/estimate.hpp"
#include "sfork/evt.hpp"
#include "sfork/multifork.hpp"
#include "sfork/numeric.hpp"
#include "sfork/optimize.hpp"
#include "sfork/policy.hpp"
#include "sfork/random.hpp"
#include "sfork/residual.hpp"
#include "sfork/sim.hpp"
#include "sfork/trace.hpp"
