// Convenience umbrella header for the whole toolkit.

#pragma once

#include "landing/cli.hpp"
#include "landing/diagnostics.hpp"
#include "landing/fields.hpp"
#include "landing/flow.hpp"
#include "landing/geometry.hpp"
#include "landing/linalg.hpp"
#include "landing/objective.hpp"
#include "landing/problems.hpp"
#include "landing/rng.hpp"
#include "landing/serialize.hpp"
