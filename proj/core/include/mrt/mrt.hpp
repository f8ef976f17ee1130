#pragma once

#include "mrt/error.hpp"
#include "mrt/estimation.hpp"
#include "mrt/linalg.hpp"
#include "mrt/lp.hpp"
#include "mrt/manygood.hpp"
#include "mrt/moments.hpp"
#include "mrt/parallel.hpp"
#include "mrt/population.hpp"
#include "mrt/qp.hpp"
#include "mrt/quadrature.hpp"
#include "mrt/quantiles.hpp"
#include "mrt/random.hpp"
#include "mrt/symmetric_tensor.hpp"
#include "mrt/twogood_tests.hpp"
