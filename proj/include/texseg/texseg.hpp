#pragma once

// Umbrella header.

#include "texseg/clustering.hpp"
#include "texseg/diagnostics.hpp"
#include "texseg/experiments.hpp"
#include "texseg/features.hpp"
#include "texseg/grid.hpp"
#include "texseg/io.hpp"
#include "texseg/matching.hpp"
#include "texseg/mosaic.hpp"
#include "texseg/parallel.hpp"
#include "texseg/pipeline.hpp"
#include "texseg/points.hpp"
#include "texseg/random.hpp"
#include "texseg/synth.hpp"
#include "texseg/union_find.hpp"
