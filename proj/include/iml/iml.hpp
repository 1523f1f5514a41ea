#pragma once

#include "iml/core.hpp"
#include "iml/map.hpp"
#include "iml/curve.hpp"
#include "iml/domain.hpp"
#include "iml/riemann.hpp"
#include "iml/riemann_cache.hpp"
#include "iml/serialize.hpp"
#include "iml/metrics.hpp"
#include "iml/bergman.hpp"
#include "iml/distance.hpp"
#include "iml/extrapolate.hpp"
#include "iml/tolerances.hpp"
#include "iml/schedule.hpp"
#include "iml/catalog.hpp"
#include "iml/scenarios.hpp"
#include "iml/suite.hpp"
