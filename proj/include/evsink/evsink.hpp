#pragma once

// Event-based countersink inspection toolkit: synthetic sweep generation,
// motion-compensated event imaging, hole segmentation, robust concentric
// circle fitting and metric depth estimation.

#include "evsink/circle_fit.hpp"
#include "evsink/cluster.hpp"
#include "evsink/core.hpp"
#include "evsink/errors.hpp"
#include "evsink/geometry.hpp"
#include "evsink/inspect.hpp"
#include "evsink/io.hpp"
#include "evsink/motion_comp.hpp"
#include "evsink/parallel.hpp"
#include "evsink/sweep_sim.hpp"
