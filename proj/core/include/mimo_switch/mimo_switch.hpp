#pragma once

#include "mimo_switch/asymptotics.hpp"
#include "mimo_switch/baselines.hpp"
#include "mimo_switch/experiments.hpp"
#include "mimo_switch/high_snr.hpp"
#include "mimo_switch/model.hpp"
#include "mimo_switch/mse_min.hpp"
#include "mimo_switch/rate_max.hpp"
#include "mimo_switch/record_io.hpp"
#include "mimo_switch/scenario.hpp"
#include "mimo_switch/scenario_io.hpp"
#include "mimo_switch/switch_pattern.hpp"
#include "mimo_switch/types.hpp"
