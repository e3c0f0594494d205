#pragma once

//! Umbrella header for the LP copula toolkit.

#include "lpcop/bench.hpp"
#include "lpcop/comeans.hpp"
#include "lpcop/copula_model.hpp"
#include "lpcop/dataset.hpp"
#include "lpcop/inference.hpp"
#include "lpcop/json_io.hpp"
#include "lpcop/lp_basis.hpp"
#include "lpcop/margins.hpp"
#include "lpcop/reference_copulas.hpp"
#include "lpcop/rng.hpp"
