#ifndef CTRM_CTRM_HPP
#define CTRM_CTRM_HPP

#include "ctrm/error.hpp"
#include "ctrm/experiment.hpp"
#include "ctrm/govern.hpp"
#include "ctrm/laplace.hpp"
#include "ctrm/limits.hpp"
#include "ctrm/model.hpp"
#include "ctrm/parallel.hpp"
#include "ctrm/process.hpp"
#include "ctrm/quadrature.hpp"
#include "ctrm/rng.hpp"

#endif
