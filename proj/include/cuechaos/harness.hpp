#pragma once

#include "cuechaos/harness/config.hpp"
#include "cuechaos/harness/experiments.hpp"
#include "cuechaos/harness/parallel.hpp"
#include "cuechaos/harness/report.hpp"
