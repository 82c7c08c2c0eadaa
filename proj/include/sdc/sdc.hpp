#pragma once

#include "sdc/bounds.hpp"
#include "sdc/error.hpp"
#include "sdc/experiment.hpp"
#include "sdc/linalg.hpp"
#include "sdc/matrix.hpp"
#include "sdc/protocol.hpp"
#include "sdc/random.hpp"
#include "sdc/rip.hpp"
#include "sdc/solvers.hpp"
