#pragma once

#include "prw/gas.hpp"
#include "prw/euler_waves.hpp"
#include "prw/burgers.hpp"
#include "prw/profile_norms.hpp"
#include "prw/approx_wave.hpp"
#include "prw/grid.hpp"
#include "prw/solver.hpp"
#include "prw/diagnostics.hpp"
#include "prw/checkpoint.hpp"
#include "prw/run.hpp"
#include "prw/config.hpp"
#include "prw/studies.hpp"
