#pragma once

#include "analytic.hpp"
#include "asymptotics.hpp"
#include "core_algebra.hpp"
#include "dop853.hpp"
#include "error.hpp"
#include "floquet.hpp"
#include "io.hpp"
#include "models.hpp"
#include "propagator.hpp"
#include "scalar.hpp"
#include "specfun.hpp"
