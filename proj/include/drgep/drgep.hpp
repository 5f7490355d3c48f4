#pragma once

// Umbrella header for the DRGEP mechanism-reduction toolkit.

#include "drgep/bench.hpp"
#include "drgep/common.hpp"
#include "drgep/graph.hpp"
#include "drgep/heaps.hpp"
#include "drgep/kinetics.hpp"
#include "drgep/mechanism.hpp"
#include "drgep/reduction.hpp"
#include "drgep/search.hpp"
