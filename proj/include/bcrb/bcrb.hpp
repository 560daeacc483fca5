#pragma once

#include "comms.hpp"
#include "csv.hpp"
#include "error.hpp"
#include "figures.hpp"
#include "gaussian_beam.hpp"
#include "link_budget.hpp"
#include "ray_matrix.hpp"
#include "scenario.hpp"
#include "scenario_io.hpp"
#include "search.hpp"
