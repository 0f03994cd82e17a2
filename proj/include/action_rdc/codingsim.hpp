#pragma once

#include "action_rdc/codingsim/binning.hpp"
#include "action_rdc/codingsim/simulators.hpp"
