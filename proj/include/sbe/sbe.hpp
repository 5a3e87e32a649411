#pragma once

#include "sbe/collision.hpp"
#include "sbe/collision_probe.hpp"
#include "sbe/equilibrium.hpp"
#include "sbe/error.hpp"
#include "sbe/evolution.hpp"
#include "sbe/fields.hpp"
#include "sbe/functionals.hpp"
#include "sbe/parallel.hpp"
#include "sbe/root_finding.hpp"
#include "sbe/state.hpp"
#include "sbe/velocity_grid.hpp"

#include "sbe/experiment/audit.hpp"
#include "sbe/experiment/check.hpp"
#include "sbe/experiment/config.hpp"
#include "sbe/experiment/diagnostics.hpp"
#include "sbe/experiment/rate.hpp"
#include "sbe/experiment/records.hpp"
#include "sbe/experiment/runner.hpp"
#include "sbe/experiment/snapshot.hpp"
