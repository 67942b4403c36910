#pragma once

#include "accelerators.hpp"
#include "baselines.hpp"
#include "batch_io.hpp"
#include "calibration.hpp"
#include "errors.hpp"
#include "evaluation.hpp"
#include "generators.hpp"
#include "hungarian.hpp"
#include "json_util.hpp"
#include "kernel_config.hpp"
#include "linalg.hpp"
#include "optimizer.hpp"
#include "pairwise.hpp"
#include "parallel.hpp"
#include "parity.hpp"
#include "point_batch.hpp"
#include "reference_io.hpp"
#include "rng.hpp"
#include "specfun.hpp"
#include "spectral.hpp"
#include "wristband_map.hpp"
