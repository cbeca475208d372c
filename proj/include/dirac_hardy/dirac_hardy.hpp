#pragma once

// Numerical core. The batch front end (experiment.hpp) is separate because
// it pulls in the JSON reader.

#include "dirac_hardy/channel.hpp"
#include "dirac_hardy/eigensolver.hpp"
#include "dirac_hardy/error.hpp"
#include "dirac_hardy/extension.hpp"
#include "dirac_hardy/forms.hpp"
#include "dirac_hardy/grid.hpp"
#include "dirac_hardy/oracle.hpp"
#include "dirac_hardy/potential.hpp"
#include "dirac_hardy/sampling.hpp"
#include "dirac_hardy/shooting.hpp"
#include "dirac_hardy/spectrum.hpp"
#include "dirac_hardy/tridiagonal.hpp"
#include "dirac_hardy/version.hpp"
