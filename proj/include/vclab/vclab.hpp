#pragma once

#include "vclab/core.hpp"
#include "vclab/descriptor.hpp"
#include "vclab/dsl.hpp"
#include "vclab/dual_interval.hpp"
#include "vclab/entropy.hpp"
#include "vclab/families.hpp"
#include "vclab/fit.hpp"
#include "vclab/shatter.hpp"
#include "vclab/ulln.hpp"
