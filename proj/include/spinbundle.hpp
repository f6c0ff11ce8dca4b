#pragma once

// Umbrella header for the library (the CLI front end lives in spinbundle/cli.hpp).

#include "spinbundle/types.hpp"
#include "spinbundle/config_space.hpp"
#include "spinbundle/sampling.hpp"
#include "spinbundle/line_bundle.hpp"
#include "spinbundle/polynomial.hpp"
#include "spinbundle/section_algebra.hpp"
#include "spinbundle/transport.hpp"
#include "spinbundle/berry_robbins.hpp"
#include "spinbundle/experiments.hpp"
