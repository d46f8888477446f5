#pragma once

#include "spinboson/types.hpp"
#include "spinboson/fock.hpp"
#include "spinboson/liealg.hpp"
#include "spinboson/models.hpp"
#include "spinboson/solver.hpp"
#include "spinboson/reduction.hpp"
#include "spinboson/exact.hpp"
#include "spinboson/io.hpp"
