#pragma once

// Umbrella header: simulate, reconstruct, predict, and optimize sensor
// placement for distributed parameter systems.

#include "sensopt/cost.hpp"
#include "sensopt/csv.hpp"
#include "sensopt/experiment.hpp"
#include "sensopt/grid.hpp"
#include "sensopt/initial_condition.hpp"
#include "sensopt/optimizer.hpp"
#include "sensopt/pde.hpp"
#include "sensopt/predictor.hpp"
#include "sensopt/reconstruct.hpp"
#include "sensopt/rng.hpp"
#include "sensopt/sensor_weights.hpp"
#include "sensopt/simulator_map.hpp"
#include "sensopt/spline.hpp"
#include "sensopt/train.hpp"
#include "sensopt/version.hpp"
