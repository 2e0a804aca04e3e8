#pragma once

#include "bmcarpet/carpet.hpp"
#include "bmcarpet/connectivity.hpp"
#include "bmcarpet/errors.hpp"
#include "bmcarpet/gaps.hpp"
#include "bmcarpet/grid.hpp"
#include "bmcarpet/labeling.hpp"
#include "bmcarpet/rational.hpp"
#include "bmcarpet/render.hpp"
#include "bmcarpet/theory.hpp"
#include "bmcarpet/union_find.hpp"
#include "bmcarpet/version.hpp"
