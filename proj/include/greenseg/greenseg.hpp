#pragma once

// Umbrella header for the GreenSeg ground-segmentation toolkit.

#include "greenseg/cloud_io.hpp"
#include "greenseg/errors.hpp"
#include "greenseg/ground_fit.hpp"
#include "greenseg/ground_truth.hpp"
#include "greenseg/local_geometry.hpp"
#include "greenseg/metrics.hpp"
#include "greenseg/params.hpp"
#include "greenseg/preprocess.hpp"
#include "greenseg/region_growing.hpp"
#include "greenseg/simulate.hpp"
#include "greenseg/spatial_index.hpp"
#include "greenseg/types.hpp"
