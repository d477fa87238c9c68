#pragma once

#include "trisac/admm/solver.hpp"
#include "trisac/bench.hpp"
#include "trisac/channel.hpp"
#include "trisac/config.hpp"
#include "trisac/metrics.hpp"
#include "trisac/oracle.hpp"
#include "trisac/recovery.hpp"
