#pragma once

#include "chaosmm/analysis.hpp"
#include "chaosmm/ensemble.hpp"
#include "chaosmm/error.hpp"
#include "chaosmm/integrate.hpp"
#include "chaosmm/kam.hpp"
#include "chaosmm/model.hpp"
#include "chaosmm/version.hpp"
