#pragma once

// Umbrella header for the whole library.

#include "hoi/distribution.hpp"
#include "hoi/error.hpp"
#include "hoi/estimation.hpp"
#include "hoi/io.hpp"
#include "hoi/metrics.hpp"
#include "hoi/models.hpp"
#include "hoi/random.hpp"
