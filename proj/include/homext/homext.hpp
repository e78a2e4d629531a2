#pragma once

// Umbrella header.

#include "homext/boundary.hpp"
#include "homext/catalog.hpp"
#include "homext/dist1d.hpp"
#include "homext/jet.hpp"
#include "homext/oracle.hpp"
#include "homext/polar.hpp"
#include "homext/quadrature.hpp"
#include "homext/rational.hpp"
#include "homext/report.hpp"
#include "homext/rng.hpp"
#include "homext/scenario.hpp"
#include "homext/smooth.hpp"
#include "homext/tempered.hpp"
#include "homext/testfn.hpp"
#include "homext/version.hpp"
#include "homext/zoom.hpp"
