#pragma once

// Umbrella header for the solver library. The command-line layer (cli.hpp)
// pulls in CLI11 and nlohmann/json and is included separately.

#include "lassokit/arc.hpp"
#include "lassokit/ball.hpp"
#include "lassokit/duality.hpp"
#include "lassokit/error.hpp"
#include "lassokit/facebasis.hpp"
#include "lassokit/io.hpp"
#include "lassokit/lbfgs.hpp"
#include "lassokit/linesearch.hpp"
#include "lassokit/model.hpp"
#include "lassokit/probgen.hpp"
#include "lassokit/rng.hpp"
#include "lassokit/rootfind.hpp"
#include "lassokit/solver.hpp"
