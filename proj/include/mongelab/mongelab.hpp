#pragma once
// Umbrella header for the whole library.

#include "mongelab/config.hpp"
#include "mongelab/convex.hpp"
#include "mongelab/domain.hpp"
#include "mongelab/field.hpp"
#include "mongelab/fit.hpp"
#include "mongelab/norms.hpp"
#include "mongelab/ode.hpp"
#include "mongelab/pogorelov.hpp"
#include "mongelab/quadrature.hpp"
#include "mongelab/reports.hpp"
#include "mongelab/rng.hpp"
#include "mongelab/singularity.hpp"
#include "mongelab/verify.hpp"
