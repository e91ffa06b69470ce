#pragma once

#include "scriptor/error.hpp"
#include "scriptor/trace.hpp"
#include "scriptor/segmentation.hpp"
#include "scriptor/features.hpp"
#include "scriptor/distributions.hpp"
#include "scriptor/stats.hpp"
#include "scriptor/report.hpp"
#include "scriptor/synth.hpp"
#include "scriptor/cli.hpp"
