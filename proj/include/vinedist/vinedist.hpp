#pragma once

#include "vinedist/assignment.hpp"
#include "vinedist/bounds.hpp"
#include "vinedist/complex.hpp"
#include "vinedist/errors.hpp"
#include "vinedist/experiments.hpp"
#include "vinedist/geodesics.hpp"
#include "vinedist/io.hpp"
#include "vinedist/mds.hpp"
#include "vinedist/persistence.hpp"
#include "vinedist/vineyard.hpp"
#include "vinedist/wasserstein.hpp"
#include "vinedist/weighting.hpp"
