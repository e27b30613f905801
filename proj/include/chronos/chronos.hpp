#pragma once

#include "chronos/dispatch.hpp"
#include "chronos/error.hpp"
#include "chronos/experiment.hpp"
#include "chronos/generate.hpp"
#include "chronos/io.hpp"
#include "chronos/miqcp.hpp"
#include "chronos/model.hpp"
#include "chronos/optimizer.hpp"
#include "chronos/rational.hpp"
#include "chronos/scenario.hpp"
#include "chronos/sim.hpp"
