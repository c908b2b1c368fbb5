#pragma once

#include "pvrfid/config.hpp"
#include "pvrfid/constants.hpp"
#include "pvrfid/csv.hpp"
#include "pvrfid/error.hpp"
#include "pvrfid/ic_load.hpp"
#include "pvrfid/link_budget.hpp"
#include "pvrfid/pv_model.hpp"
#include "pvrfid/simulator.hpp"
#include "pvrfid/sizing.hpp"
#include "pvrfid/storage.hpp"
