#pragma once

#include "geoq/dfs.hpp"
#include "geoq/engine.hpp"
#include "geoq/fit.hpp"
#include "geoq/harness.hpp"
#include "geoq/io.hpp"
#include "geoq/linalg.hpp"
#include "geoq/schedule.hpp"
