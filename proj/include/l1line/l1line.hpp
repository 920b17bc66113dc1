#pragma once

#include "l1line/baseline.hpp"
#include "l1line/coordinate_fit.hpp"
#include "l1line/core.hpp"
#include "l1line/errors.hpp"
#include "l1line/fixed_lambda.hpp"
#include "l1line/oracle.hpp"
#include "l1line/path.hpp"
#include "l1line/synth.hpp"
#include "l1line/types.hpp"
