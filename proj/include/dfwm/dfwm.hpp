#pragma once

#include "dfwm/designer.hpp"
#include "dfwm/doppler.hpp"
#include "dfwm/errors.hpp"
#include "dfwm/numeric.hpp"
#include "dfwm/output.hpp"
#include "dfwm/propagation.hpp"
#include "dfwm/response.hpp"
#include "dfwm/scenario.hpp"
#include "dfwm/scheme.hpp"
