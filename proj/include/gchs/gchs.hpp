#pragma once

// Umbrella header (core library; scenario.hpp and report.hpp additionally need nlohmann/json).

#include "gchs/brackets.hpp"
#include "gchs/bridge.hpp"
#include "gchs/derivatives.hpp"
#include "gchs/dual.hpp"
#include "gchs/dynamics.hpp"
#include "gchs/errors.hpp"
#include "gchs/field.hpp"
#include "gchs/integrate.hpp"
#include "gchs/parser.hpp"
#include "gchs/phasespace.hpp"
