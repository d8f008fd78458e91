#pragma once

#include "symcool/bessel.hpp"
#include "symcool/budget.hpp"
#include "symcool/constants.hpp"
#include "symcool/crystal.hpp"
#include "symcool/dynamics.hpp"
#include "symcool/error.hpp"
#include "symcool/fitting.hpp"
#include "symcool/io.hpp"
#include "symcool/lineshape.hpp"
#include "symcool/parallel.hpp"
#include "symcool/radiation.hpp"
#include "symcool/rng.hpp"
#include "symcool/scenario.hpp"
#include "symcool/species.hpp"
#include "symcool/spectrum.hpp"
#include "symcool/trap.hpp"
#include "symcool/units.hpp"
#include "symcool/vec.hpp"
