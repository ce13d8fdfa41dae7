#pragma once

// MUSIC direction-of-arrival estimation on planar sensor arrays, with a
// closed-form first-order perturbation of the estimate and a Monte-Carlo
// harness comparing uniform against progressively spaced linear arrays.

#include "musicdoa/geometry.hpp"
#include "musicdoa/harness.hpp"
#include "musicdoa/perturbation.hpp"
#include "musicdoa/rmse.hpp"
#include "musicdoa/rng.hpp"
#include "musicdoa/signal.hpp"
#include "musicdoa/subspace.hpp"
#include "musicdoa/types.hpp"
