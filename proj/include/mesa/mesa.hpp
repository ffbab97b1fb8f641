#pragma once

// Umbrella header.

#include "baseline.hpp"
#include "core.hpp"
#include "estimator.hpp"
#include "forecast.hpp"
#include "selection.hpp"
#include "spectrum.hpp"
#include "synth.hpp"
#include "validate.hpp"
