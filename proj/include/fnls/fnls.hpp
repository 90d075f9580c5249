#pragma once

// Umbrella header for the numerical library (the CLI layer lives in fnls/cli.hpp).
#include "fnls/analysis.hpp"
#include "fnls/config.hpp"
#include "fnls/errors.hpp"
#include "fnls/evolution.hpp"
#include "fnls/fft.hpp"
#include "fnls/functionals.hpp"
#include "fnls/grid.hpp"
#include "fnls/ground_state.hpp"
#include "fnls/model.hpp"
#include "fnls/orbit.hpp"
#include "fnls/report.hpp"
#include "fnls/riesz.hpp"
#include "fnls/snapshot.hpp"
#include "fnls/spectral.hpp"
