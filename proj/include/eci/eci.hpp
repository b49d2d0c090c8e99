#pragma once

// Convenience umbrella: the whole library in one include.
#include "eci/cli.hpp"
#include "eci/config.hpp"
#include "eci/core.hpp"
#include "eci/engine.hpp"
#include "eci/exports.hpp"
#include "eci/ids.hpp"
#include "eci/kns_graph.hpp"
#include "eci/matching.hpp"
#include "eci/metrics.hpp"
#include "eci/rng.hpp"
#include "eci/synthgen.hpp"
