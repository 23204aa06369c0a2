#pragma once

// Umbrella header for the crossworld mediation toolkit.

#include "crossworld/audit.hpp"
#include "crossworld/bounds.hpp"
#include "crossworld/errors.hpp"
#include "crossworld/gformula.hpp"
#include "crossworld/grid.hpp"
#include "crossworld/io.hpp"
#include "crossworld/lsem.hpp"
#include "crossworld/math.hpp"
#include "crossworld/model.hpp"
#include "crossworld/oracle.hpp"
#include "crossworld/parallel.hpp"
#include "crossworld/quadrature.hpp"
#include "crossworld/rng.hpp"
