#pragma once
// Umbrella header for the hypercond belief-conditioning library.

#include "belief_state.hpp"
#include "conditioning_core.hpp"
#include "formula_io.hpp"
#include "frame_algebra.hpp"
#include "fusion_rules.hpp"
