#pragma once

// Umbrella header: transverse-mode tooling, Gaussian states, multipixel
// detection analysis, stochastic verification, scenario front end.

#include "detection.hpp"
#include "errors.hpp"
#include "gaussian_state.hpp"
#include "grid.hpp"
#include "hermite_gauss.hpp"
#include "io.hpp"
#include "mode.hpp"
#include "mode_basis.hpp"
#include "montecarlo.hpp"
#include "multi_measurement.hpp"
#include "pixel_layout.hpp"
#include "scenario.hpp"
#include "state_analysis.hpp"
#include "state_io.hpp"
#include "two_zone.hpp"
