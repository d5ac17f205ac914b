#pragma once

// Umbrella header.
#include "bounds.hpp"
#include "divergences.hpp"
#include "error.hpp"
#include "lasso.hpp"
#include "matops.hpp"
#include "model.hpp"
#include "penalty.hpp"
#include "sim.hpp"
#include "typical_set.hpp"
