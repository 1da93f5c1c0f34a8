#pragma once

// Exact finite-horizon POMDP machinery, header-only and templated on scalar.

#include "m2m/pomdp/belief.hpp"
#include "m2m/pomdp/brute_force.hpp"
#include "m2m/pomdp/model.hpp"
#include "m2m/pomdp/prune.hpp"
#include "m2m/pomdp/solver.hpp"
