// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "fadebound/bounds.hpp"
#include "fadebound/channel.hpp"
#include "fadebound/constellation.hpp"
#include "fadebound/error.hpp"
#include "fadebound/io.hpp"
#include "fadebound/numeric.hpp"
#include "fadebound/parallel.hpp"
#include "fadebound/presets.hpp"
#include "fadebound/random.hpp"
#include "fadebound/scheme.hpp"
#include "fadebound/simulate.hpp"
#include "fadebound/sweep.hpp"
