#pragma once

#include "orrlab/config.hpp"
#include "orrlab/core.hpp"
#include "orrlab/elliptic.hpp"
#include "orrlab/evolve.hpp"
#include "orrlab/fft.hpp"
#include "orrlab/jet.hpp"
#include "orrlab/lyapunov.hpp"
#include "orrlab/parallel.hpp"
#include "orrlab/profiles.hpp"
#include "orrlab/run.hpp"
#include "orrlab/spectral.hpp"
#include "orrlab/stencil.hpp"
#include "orrlab/verify.hpp"
