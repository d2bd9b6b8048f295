#pragma once

// Umbrella header.

#include "gnfr/distances.hpp"
#include "gnfr/io.hpp"
#include "gnfr/kernel.hpp"
#include "gnfr/objects.hpp"
#include "gnfr/projections.hpp"
#include "gnfr/regression.hpp"
#include "gnfr/simulate.hpp"
#include "gnfr/transport.hpp"
