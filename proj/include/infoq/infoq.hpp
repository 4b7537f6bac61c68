#pragma once

#include "infoq/equilibrium.hpp"
#include "infoq/error.hpp"
#include "infoq/model.hpp"
#include "infoq/params.hpp"
#include "infoq/policy.hpp"
#include "infoq/pricing_access.hpp"
#include "infoq/pricing_info.hpp"
#include "infoq/search.hpp"
#include "infoq/simulation.hpp"
