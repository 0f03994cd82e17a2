#pragma once

#include "action_rdc/regions/closed_forms.hpp"
#include "action_rdc/regions/encoder.hpp"
#include "action_rdc/regions/extensions.hpp"
#include "action_rdc/regions/lossless.hpp"
#include "action_rdc/regions/lossy.hpp"
#include "action_rdc/regions/model.hpp"
