#pragma once

// Umbrella header for the multilevel optimal transport library.

#include "mlot/cost.hpp"
#include "mlot/measure.hpp"
#include "mlot/mesh.hpp"
#include "mlot/multilevel.hpp"
#include "mlot/network_simplex.hpp"
#include "mlot/problems.hpp"
#include "mlot/study.hpp"
#include "mlot/transport.hpp"
#include "mlot/transport_types.hpp"
