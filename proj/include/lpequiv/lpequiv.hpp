#pragma once

#include "lpequiv/config.hpp"
#include "lpequiv/instance.hpp"
#include "lpequiv/decomposition.hpp"
#include "lpequiv/polyhedron.hpp"
#include "lpequiv/polytope.hpp"
#include "lpequiv/solvers.hpp"
#include "lpequiv/equivalence.hpp"
#include "lpequiv/report.hpp"
