#pragma once

#include "qmem/damped_oscillator.hpp"
#include "qmem/error.hpp"
#include "qmem/extrema.hpp"
#include "qmem/gaussian.hpp"
#include "qmem/lindblad.hpp"
#include "qmem/ode.hpp"
#include "qmem/qstate.hpp"
#include "qmem/witness.hpp"
