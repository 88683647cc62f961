#pragma once

#include "bohmian.hpp"
#include "coin_game.hpp"
#include "errors.hpp"
#include "experiment_stats.hpp"
#include "io.hpp"
#include "pauli_grid.hpp"
#include "physical_config.hpp"
#include "random.hpp"
#include "spinor_field.hpp"
#include "trajectory.hpp"
#include "two_state.hpp"
#include "vec3.hpp"
