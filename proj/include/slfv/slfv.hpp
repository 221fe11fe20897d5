#pragma once

#include "slfv/core/error.hpp"
#include "slfv/core/point.hpp"
#include "slfv/core/poly.hpp"
#include "slfv/geometry/cubic.hpp"
#include "slfv/geometry/spline.hpp"
#include "slfv/geometry/domain.hpp"
#include "slfv/geometry/cut_cell_grid.hpp"
#include "slfv/geometry/partition.hpp"
#include "slfv/quadrature/gauss_legendre.hpp"
#include "slfv/quadrature/cell_rule.hpp"
#include "slfv/flow/fields.hpp"
#include "slfv/flow/rk_scheme.hpp"
#include "slfv/flow/pathline.hpp"
#include "slfv/reconstruction/basis.hpp"
#include "slfv/reconstruction/fit.hpp"
#include "slfv/reconstruction/lattice.hpp"
#include "slfv/reconstruction/reconstructor.hpp"
#include "slfv/boundary/intersect.hpp"
#include "slfv/solver/problem.hpp"
#include "slfv/solver/solver.hpp"
#include "slfv/harness/expression.hpp"
#include "slfv/harness/cases.hpp"
#include "slfv/harness/norms.hpp"
#include "slfv/harness/convergence.hpp"
#include "slfv/harness/config_file.hpp"
#include "slfv/harness/checks.hpp"
