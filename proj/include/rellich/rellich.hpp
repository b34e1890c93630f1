#pragma once

#include "rellich/constants.hpp"
#include "rellich/emden_fowler.hpp"
#include "rellich/jet.hpp"
#include "rellich/quadrature_nd.hpp"
#include "rellich/reduced_solvers.hpp"
#include "rellich/symmetry_breaking.hpp"
#include "rellich/asymptotics.hpp"
