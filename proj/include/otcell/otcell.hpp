#pragma once

#include "otcell/association.hpp"
#include "otcell/channel.hpp"
#include "otcell/density.hpp"
#include "otcell/metrics.hpp"
#include "otcell/oracle.hpp"
#include "otcell/partition.hpp"
#include "otcell/scenario.hpp"
#include "otcell/scenario_io.hpp"
