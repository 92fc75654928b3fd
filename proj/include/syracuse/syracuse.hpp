#pragma once

#include "syracuse/error.hpp"
#include "syracuse/integer.hpp"
#include "syracuse/interval.hpp"
#include "syracuse/map.hpp"
#include "syracuse/cycle.hpp"
#include "syracuse/census.hpp"
#include "syracuse/diophantine.hpp"
#include "syracuse/bounds.hpp"
#include "syracuse/oscillations.hpp"
#include "syracuse/families.hpp"
#include "syracuse/sweep.hpp"
#include "syracuse/acceptance.hpp"
