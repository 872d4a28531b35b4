#pragma once

#include "nldiff/admissibility.hpp"
#include "nldiff/config.hpp"
#include "nldiff/errors.hpp"
#include "nldiff/experiment.hpp"
#include "nldiff/functionals.hpp"
#include "nldiff/grid.hpp"
#include "nldiff/io.hpp"
#include "nldiff/params.hpp"
#include "nldiff/profiles.hpp"
#include "nldiff/ratefit.hpp"
#include "nldiff/rescaling.hpp"
#include "nldiff/separable.hpp"
#include "nldiff/solver.hpp"
