#pragma once

// Umbrella header for the three-branch anomaly scoring library.

#include "trifuse/action_branch.hpp"
#include "trifuse/autoencoder.hpp"
#include "trifuse/config.hpp"
#include "trifuse/core.hpp"
#include "trifuse/dataset.hpp"
#include "trifuse/errors.hpp"
#include "trifuse/evaluation.hpp"
#include "trifuse/fusion.hpp"
#include "trifuse/geometry.hpp"
#include "trifuse/gmm.hpp"
#include "trifuse/hmof.hpp"
#include "trifuse/mask.hpp"
#include "trifuse/model_io.hpp"
#include "trifuse/motion_branch.hpp"
#include "trifuse/object_branch.hpp"
#include "trifuse/pipeline.hpp"
#include "trifuse/rng.hpp"
#include "trifuse/synthetic.hpp"
