#pragma once

// Umbrella header for the rmt numerical laboratory.

#include "rmt/accumulator.hpp"
#include "rmt/ensemble.hpp"
#include "rmt/entry_distribution.hpp"
#include "rmt/moment_match.hpp"
#include "rmt/moments.hpp"
#include "rmt/observable.hpp"
#include "rmt/quadrature.hpp"
#include "rmt/rng.hpp"
#include "rmt/sine_kernel.hpp"
#include "rmt/spectra.hpp"
#include "rmt/statistics.hpp"
#include "rmt/types.hpp"
#include "rmt/variance_profile.hpp"
