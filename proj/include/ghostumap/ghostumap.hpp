#ifndef GHOSTUMAP_GHOSTUMAP_HPP
#define GHOSTUMAP_GHOSTUMAP_HPP

#include "random.hpp"
#include "core.hpp"
#include "parallel.hpp"
#include "knn_graph.hpp"
#include "curve.hpp"
#include "forces.hpp"
#include "layout.hpp"
#include "ghosts.hpp"
#include "stability.hpp"
#include "datasets.hpp"
#include "io.hpp"
#include "bench.hpp"

#endif
