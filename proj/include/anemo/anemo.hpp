#pragma once

// Umbrella header.

#include "anemo/copulas.hpp"
#include "anemo/dataset.hpp"
#include "anemo/distributions.hpp"
#include "anemo/error.hpp"
#include "anemo/joint.hpp"
#include "anemo/marginals.hpp"
#include "anemo/matrix.hpp"
#include "anemo/model_io.hpp"
#include "anemo/optimize.hpp"
#include "anemo/preprocess.hpp"
#include "anemo/quadrature.hpp"
#include "anemo/regression.hpp"
#include "anemo/rng.hpp"
#include "anemo/series.hpp"
#include "anemo/special_functions.hpp"
#include "anemo/stats.hpp"
