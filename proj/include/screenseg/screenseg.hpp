#pragma once

#include "screenseg/block.hpp"
#include "screenseg/error.hpp"
#include "screenseg/evalkit.hpp"
#include "screenseg/geometry.hpp"
#include "screenseg/gridblocks.hpp"
#include "screenseg/heuristic.hpp"
#include "screenseg/hierarchy.hpp"
#include "screenseg/image_io.hpp"
#include "screenseg/losses.hpp"
#include "screenseg/nms.hpp"
#include "screenseg/pipeline.hpp"
#include "screenseg/proposals.hpp"
#include "screenseg/raster.hpp"
#include "screenseg/rng.hpp"
#include "screenseg/scenetext.hpp"
#include "screenseg/synthgen.hpp"
#include "screenseg/textblocks.hpp"
