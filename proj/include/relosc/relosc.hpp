#pragma once

#include "relosc/banded_lu.hpp"
#include "relosc/block_matrix.hpp"
#include "relosc/complex.hpp"
#include "relosc/dense_eigen.hpp"
#include "relosc/diagnostics.hpp"
#include "relosc/hermite_basis.hpp"
#include "relosc/level_solver.hpp"
#include "relosc/moment_solver.hpp"
#include "relosc/operator.hpp"
#include "relosc/results.hpp"
#include "relosc/scalar.hpp"
