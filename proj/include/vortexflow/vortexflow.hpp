#pragma once

#include "vortexflow/core.hpp"
#include "vortexflow/experiments.hpp"
#include "vortexflow/grid.hpp"
#include "vortexflow/interface.hpp"
#include "vortexflow/io.hpp"
#include "vortexflow/parallel.hpp"
#include "vortexflow/particles.hpp"
#include "vortexflow/poisson.hpp"
#include "vortexflow/rigid.hpp"
#include "vortexflow/runner.hpp"
#include "vortexflow/scene.hpp"
#include "vortexflow/smoothing.hpp"
#include "vortexflow/solver.hpp"
#include "vortexflow/stencil.hpp"
