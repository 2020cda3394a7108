#pragma once

#include "cuechaos/asymptotics.hpp"
#include "cuechaos/chaos_measure.hpp"
#include "cuechaos/cue_sampler.hpp"
#include "cuechaos/errors.hpp"
#include "cuechaos/fft.hpp"
#include "cuechaos/gaussian_field.hpp"
#include "cuechaos/rng.hpp"
#include "cuechaos/stats.hpp"
#include "cuechaos/symbol_toeplitz.hpp"
