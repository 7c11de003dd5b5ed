#pragma once

#include "relfit/error.hpp"
#include "relfit/rational.hpp"
#include "relfit/linalg.hpp"
#include "relfit/lp.hpp"
#include "relfit/geometry.hpp"
#include "relfit/model.hpp"
#include "relfit/fit.hpp"
