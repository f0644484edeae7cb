#pragma once

#include "hetcache/analytics.hpp"
#include "hetcache/bitsim.hpp"
#include "hetcache/error.hpp"
#include "hetcache/grouping.hpp"
#include "hetcache/model.hpp"
#include "hetcache/oracle.hpp"
#include "hetcache/stochastic.hpp"
#include "hetcache/subsets.hpp"
