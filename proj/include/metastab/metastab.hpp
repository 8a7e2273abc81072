#pragma once

// Umbrella header: the whole library in one include.

#include "metastab/certify.hpp"
#include "metastab/driver.hpp"
#include "metastab/errors.hpp"
#include "metastab/expr.hpp"
#include "metastab/family.hpp"
#include "metastab/funcspace.hpp"
#include "metastab/logic.hpp"
#include "metastab/metastability.hpp"
#include "metastab/numeric.hpp"
#include "metastab/parallel.hpp"
#include "metastab/rate.hpp"
#include "metastab/rational.hpp"
#include "metastab/sampling.hpp"
#include "metastab/sequence.hpp"
#include "metastab/trace.hpp"
