#pragma once

#include "spectral/analysis.hpp"
#include "spectral/basis.hpp"
#include "spectral/cluster.hpp"
#include "spectral/dense.hpp"
#include "spectral/edge_list.hpp"
#include "spectral/generators.hpp"
#include "spectral/graph.hpp"
#include "spectral/grid.hpp"
#include "spectral/io.hpp"
#include "spectral/kernel_smoothing.hpp"
#include "spectral/lanczos.hpp"
#include "spectral/laplacian.hpp"
#include "spectral/maxent.hpp"
#include "spectral/moments.hpp"
#include "spectral/perturbation.hpp"
