#pragma once

// Umbrella header for the sparsity-aware randomized-smoothing certification
// engine.

#include "sparsecert/certify.hpp"
#include "sparsecert/classifiers.hpp"
#include "sparsecert/confidence.hpp"
#include "sparsecert/errors.hpp"
#include "sparsecert/exactmath.hpp"
#include "sparsecert/oracle.hpp"
#include "sparsecert/rational.hpp"
#include "sparsecert/regions.hpp"
#include "sparsecert/rng.hpp"
#include "sparsecert/smoothing.hpp"
#include "sparsecert/types.hpp"
#include "sparsecert/votes_io.hpp"
