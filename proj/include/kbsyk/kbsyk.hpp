#pragma once

#include "kbsyk/contour_green.hpp"
#include "kbsyk/equilibrium.hpp"
#include "kbsyk/errors.hpp"
#include "kbsyk/keldysh_slice.hpp"
#include "kbsyk/lindblad.hpp"
#include "kbsyk/observables.hpp"
#include "kbsyk/quench.hpp"
#include "kbsyk/snapshot.hpp"
#include "kbsyk/threshold_scan.hpp"
#include "kbsyk/time_lattice.hpp"
