#ifndef STALIGHT_STALIGHT_HPP
#define STALIGHT_STALIGHT_HPP

#include "stalight/config.hpp"
#include "stalight/eit.hpp"
#include "stalight/errors.hpp"
#include "stalight/grid.hpp"
#include "stalight/hoc.hpp"
#include "stalight/io.hpp"
#include "stalight/mbe.hpp"
#include "stalight/numerics.hpp"
#include "stalight/phasematch.hpp"
#include "stalight/raman.hpp"
#include "stalight/scenarios.hpp"
#include "stalight/schedule.hpp"
#include "stalight/spectra.hpp"
#include "stalight/types.hpp"

#endif
