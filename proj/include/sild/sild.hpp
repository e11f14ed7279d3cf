#pragma once

#include <sild/analysis.hpp>
#include <sild/batch.hpp>
#include <sild/error.hpp>
#include <sild/grid.hpp>
#include <sild/metrics.hpp>
#include <sild/mixed_mode.hpp>
#include <sild/network.hpp>
#include <sild/pulse.hpp>
#include <sild/report.hpp>
#include <sild/skew.hpp>
#include <sild/synth.hpp>
#include <sild/synth_spec.hpp>
#include <sild/touchstone.hpp>
#include <sild/units.hpp>
