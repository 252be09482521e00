#pragma once

#include "flockwalk/config.hpp"
#include "flockwalk/engine.hpp"
#include "flockwalk/error.hpp"
#include "flockwalk/experiments.hpp"
#include "flockwalk/format.hpp"
#include "flockwalk/graph.hpp"
#include "flockwalk/graph_io.hpp"
#include "flockwalk/metrics.hpp"
#include "flockwalk/rng.hpp"
#include "flockwalk/simulation.hpp"
#include "flockwalk/visited_set.hpp"
