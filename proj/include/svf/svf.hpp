#pragma once

// Umbrella header for the set-valued fractal toolkit.

#include "svf/bernstein.hpp"
#include "svf/compact_set.hpp"
#include "svf/dimension.hpp"
#include "svf/error.hpp"
#include "svf/fractal.hpp"
#include "svf/graph.hpp"
#include "svf/metrics.hpp"
#include "svf/scalar_expr.hpp"
#include "svf/set_valued_map.hpp"
